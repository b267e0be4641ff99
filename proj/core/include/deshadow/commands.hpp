#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "deshadow/evaluate.hpp"

namespace deshadow {

// Command implementations shared by the CLI binary and the test suites.
// They throw on failure; the CLI maps exception classes to exit codes
// (ConfigError -> 1, data errors -> 2, everything else -> 3).

struct SimulateOptions {
    std::filesystem::path config;
    std::filesystem::path out_dir;
    bool force = false;
    std::optional<std::uint64_t> seed_override;
};

// Writes <out>/images|masks|ground_truth/phantom_NNNN.png triples, the
// auto-generated rois.tsv, a dataset manifest.tsv and the run manifest.
void cmd_simulate(const SimulateOptions& options);

struct TrainOptions {
    std::filesystem::path config;
    std::filesystem::path data_dir;
    std::filesystem::path out_dir;
    std::optional<std::filesystem::path> resume;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> threads;
    // Stop after this many completed phases (testing hook for resume).
    std::optional<int> max_phases;
};

void cmd_train(const TrainOptions& options);

struct InferOptions {
    std::filesystem::path checkpoint;
    std::filesystem::path in_dir;
    std::filesystem::path out_dir;
    int bit_depth = 16;
    std::optional<int> threads;
};

// Deshadows every raster in in_dir, writing same-named outputs; per-file
// failures are reported and skipped. Throws IoError at the end when any
// file failed.
void cmd_infer(const InferOptions& options);

struct EvaluateCmdOptions {
    std::filesystem::path checkpoint;
    std::filesystem::path data_dir;
    std::filesystem::path roi_file;
    std::filesystem::path out_dir;
    bool with_compensation = false;
    std::optional<int> threads;
};

EvalReport cmd_evaluate(const EvaluateCmdOptions& options);

}  // namespace deshadow

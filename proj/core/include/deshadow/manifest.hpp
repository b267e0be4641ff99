#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace deshadow {

// One ledger line per completed training phase.
struct PhaseRecord {
    int index = 0;
    int cycle = -1;  // -1 for pretraining
    std::string kind;
    int epochs = 0;
    double mean_loss = 0.0;
};

// Every artifact directory carries exactly one run_manifest.json describing
// how to reproduce its contents.
struct RunManifest {
    std::string command;
    std::string code_version;
    std::string config_hash;  // hex64 of the canonical config
    std::uint64_t seed = 0;
    int threads = 0;
    std::string backbone_mode;      // "pretrained" | "random_seeded" | "none"
    std::string backbone_checksum;  // hex64 of the backbone weights
    std::vector<int> backbone_taps;
    std::vector<PhaseRecord> phase_ledger;
    std::vector<std::string> outputs;
    std::map<std::string, std::string> notes;

    void write(const std::filesystem::path& dir) const;
    static RunManifest read(const std::filesystem::path& dir);
    static constexpr const char* kFileName = "run_manifest.json";
};

}  // namespace deshadow

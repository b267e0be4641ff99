#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "deshadow/augment.hpp"
#include "deshadow/backbone.hpp"
#include "deshadow/checkpoint.hpp"
#include "deshadow/config.hpp"
#include "deshadow/dataset.hpp"
#include "deshadow/detector.hpp"
#include "deshadow/losses.hpp"
#include "deshadow/manifest.hpp"
#include "deshadow/remover.hpp"

namespace deshadow {

// Alternating schedule per cycle after a one-off detector pretraining:
// remover once, then the detector on regenerated deshadowed outputs, then
// the detector on the original images, all against the manual masks.
struct TrainSchedule {
    int detector_pretrain = 5;
    int remover = 1;
    int detector_on_removed = 5;
    int detector_on_gt = 5;
};

struct TrainConfig {
    double lr = 1e-5;
    int batch = 2;
    int lr_halving_period = 10;  // epochs, per network's own accumulated count
    TrainSchedule schedule;
    int cycles = 10;
    int image_size = 512;
    // Stop when the probe loss improves by less than `early_stop_improvement`
    // (relative) over `early_stop_window` consecutive cycles.
    double early_stop_improvement = 0.01;
    int early_stop_window = 3;
    int probe_images = 4;
    std::uint64_t seed = 7;

    static TrainConfig from_config(const Config& cfg);
    void to_config(Config& cfg) const;
    void validate() const;
};

enum class PhaseKind { detector_pretrain, remover, detector_on_removed, detector_on_gt };
const char* to_string(PhaseKind kind);

// Shared config -> network plumbing (also used to rebuild networks from the
// config embedded in a checkpoint).
torch::Dtype train_dtype_from(const Config& cfg);
DetectorConfig detector_config_from(const Config& cfg, std::uint64_t master_seed,
                                    torch::Dtype dtype);
RemoverConfig remover_config_from(const Config& cfg, std::uint64_t master_seed,
                                  torch::Dtype dtype);
BackboneConfig backbone_config_from(const Config& cfg, std::uint64_t master_seed,
                                    torch::Dtype dtype);

class Trainer {
public:
    Trainer(const Config& run_config, std::vector<TrainSample> data,
            const std::filesystem::path& out_dir);

    // Continues a run from a phase-boundary checkpoint; the stored config
    // hash must match the current one.
    void resume(const std::filesystem::path& checkpoint_path);

    // Executes the remaining schedule, checkpointing at every phase boundary.
    void run();

    // Executes exactly one phase (testing hook for interrupt/resume).
    void run_single_phase();

    // Single-phase entry points (the schedule is built from these).
    double run_detector_pretrain_phase();
    double run_remover_phase(int cycle);
    double run_detector_on_removed_phase(int cycle);
    double run_detector_on_gt_phase(int cycle);

    // Total loss of the remover on the fixed probe batch, evaluation mode.
    double probe_total_loss();

    Detector& detector() { return *detector_; }
    Remover& remover() { return *remover_; }
    const Backbone& backbone() const { return *backbone_; }

    double detector_lr() const;
    double remover_lr() const;
    std::int64_t detector_epochs() const { return detector_epochs_; }
    std::int64_t remover_epochs() const { return remover_epochs_; }
    int next_phase_index() const { return next_phase_index_; }
    bool stopped_early() const { return stopped_early_; }
    const std::vector<PhaseRecord>& ledger() const { return ledger_; }
    const TrainConfig& train_config() const { return train_cfg_; }
    std::filesystem::path checkpoint_path() const;

    RunManifest manifest() const;

private:
    struct Batch {
        torch::Tensor images;
        torch::Tensor masks;  // undefined for remover batches
    };

    // Shared detector-epoch runner over (input image, binary mask) pairs of
    // matching shapes; inputs are baselines (native) or regenerated
    // deshadowed outputs (network size).
    double detector_epoch(int phase_index, int epoch, const std::vector<const Image*>& inputs,
                          const std::vector<const Image*>& masks, int cycle, PhaseKind kind);
    double remover_epoch(int phase_index, int epoch, int cycle);
    std::vector<Image> regenerate_deshadowed();
    Batch make_detector_batch(int phase_index, int epoch, const std::vector<const Image*>& inputs,
                              const std::vector<const Image*>& masks,
                              const std::vector<std::size_t>& order, std::size_t begin);
    torch::Tensor make_remover_batch(int phase_index, int epoch,
                                     const std::vector<std::size_t>& order, std::size_t begin);
    std::vector<std::size_t> epoch_order(int phase_index, int epoch) const;
    void write_checkpoint();
    void append_log(const std::string& net, int cycle, PhaseKind kind, int epoch, double lr,
                    std::optional<double> bce, const std::optional<LossBreakdown>& breakdown);
    void run_phase(int phase_index);
    int phase_count() const { return 1 + 3 * train_cfg_.cycles; }
    double lr_for(std::int64_t accumulated_epochs) const;

    Config run_config_;
    TrainConfig train_cfg_;
    AugmentConfig augment_cfg_;
    LossWeights weights_;
    std::vector<TrainSample> data_;
    std::filesystem::path out_dir_;

    std::unique_ptr<Backbone> backbone_;
    std::unique_ptr<Detector> detector_;
    std::unique_ptr<Remover> remover_;
    std::unique_ptr<AdamOptimizer> detector_opt_;
    std::unique_ptr<AdamOptimizer> remover_opt_;

    std::uint64_t master_seed_ = 0;
    int next_phase_index_ = 0;
    std::int64_t detector_epochs_ = 0;
    std::int64_t remover_epochs_ = 0;
    std::int64_t global_step_ = 0;
    std::vector<double> probe_history_;
    std::vector<PhaseRecord> ledger_;
    bool stopped_early_ = false;
    torch::Dtype dtype_ = torch::kFloat32;
};

}  // namespace deshadow

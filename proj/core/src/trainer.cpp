#include "deshadow/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "deshadow/geometry.hpp"
#include "deshadow/hashing.hpp"
#include "deshadow/tensor_bridge.hpp"
#include "deshadow/version.hpp"

namespace deshadow {

namespace {

std::vector<std::pair<std::string, torch::Tensor>> named_parameters_of(torch::nn::Module& m) {
    std::vector<std::pair<std::string, torch::Tensor>> out;
    for (const auto& p : m.named_parameters(/*recurse=*/true)) out.emplace_back(p.key(), p.value());
    return out;
}

}  // namespace

torch::Dtype train_dtype_from(const Config& cfg) {
    const std::string s = cfg.get_string("train.dtype", "float32");
    if (s == "float32") return torch::kFloat32;
    if (s == "float64") return torch::kFloat64;
    throw ConfigError("train.dtype must be float32 or float64, got '" + s + "'");
}

DetectorConfig detector_config_from(const Config& cfg, std::uint64_t master_seed,
                                    torch::Dtype dtype) {
    DetectorConfig det;
    det.base_filters = static_cast<int>(cfg.get_int("detector.base_filters", 64));
    det.init_seed = derive_seed(master_seed, "init-detector");
    det.dtype = dtype;
    return det;
}

RemoverConfig remover_config_from(const Config& cfg, std::uint64_t master_seed,
                                  torch::Dtype dtype) {
    RemoverConfig rem;
    rem.base_filters = static_cast<int>(cfg.get_int("remover.base_filters", 64));
    rem.dropout_p = cfg.get_double("remover.dropout_p", 0.5);
    rem.leaky_slope = cfg.get_double("remover.leaky_slope", 0.2);
    rem.init_seed = derive_seed(master_seed, "init-remover");
    rem.dtype = dtype;
    return rem;
}

BackboneConfig backbone_config_from(const Config& cfg, std::uint64_t master_seed,
                                    torch::Dtype dtype) {
    BackboneConfig bb;
    const std::string mode = cfg.get_string("backbone.mode", "random_seeded");
    if (mode == "pretrained")
        bb.mode = BackboneConfig::Mode::pretrained;
    else if (mode == "random_seeded")
        bb.mode = BackboneConfig::Mode::random_seeded;
    else
        throw ConfigError("backbone.mode must be pretrained or random_seeded");
    std::filesystem::path weights = cfg.get_string("backbone.weights", "");
    if (bb.mode == BackboneConfig::Mode::pretrained && !weights.empty() &&
        weights.is_relative() && weights.string().find('/') == std::string::npos) {
        // Bare filenames resolve against the weights cache directory.
        if (const char* dir = std::getenv("DESHADOW_WEIGHTS_DIR")) weights = std::filesystem::path(dir) / weights;
    }
    bb.weights_path = weights;
    bb.width_scale = cfg.get_double("backbone.width_scale", 1.0);
    if (cfg.has("backbone.taps")) {
        bb.tap_ids.clear();
        for (double v : cfg.get_doubles("backbone.taps")) bb.tap_ids.push_back(static_cast<int>(v));
    }
    bb.seed = cfg.has("backbone.seed")
                  ? static_cast<std::uint64_t>(cfg.get_int("backbone.seed"))
                  : derive_seed(master_seed, "init-backbone");
    bb.dtype = dtype;
    return bb;
}

const char* to_string(PhaseKind kind) {
    switch (kind) {
        case PhaseKind::detector_pretrain: return "detector_pretrain";
        case PhaseKind::remover: return "remover";
        case PhaseKind::detector_on_removed: return "detector_on_removed";
        case PhaseKind::detector_on_gt: return "detector_on_gt";
    }
    return "?";
}

TrainConfig TrainConfig::from_config(const Config& cfg) {
    TrainConfig t;
    t.lr = cfg.get_double("train.lr", t.lr);
    t.batch = static_cast<int>(cfg.get_int("train.batch", t.batch));
    t.lr_halving_period = static_cast<int>(cfg.get_int("train.lr_halving_period", t.lr_halving_period));
    t.schedule.detector_pretrain =
        static_cast<int>(cfg.get_int("train.schedule.detector_pretrain", t.schedule.detector_pretrain));
    t.schedule.remover = static_cast<int>(cfg.get_int("train.schedule.remover", t.schedule.remover));
    t.schedule.detector_on_removed = static_cast<int>(
        cfg.get_int("train.schedule.detector_on_removed", t.schedule.detector_on_removed));
    t.schedule.detector_on_gt =
        static_cast<int>(cfg.get_int("train.schedule.detector_on_gt", t.schedule.detector_on_gt));
    t.cycles = static_cast<int>(cfg.get_int("train.cycles", t.cycles));
    t.image_size = static_cast<int>(cfg.get_int("train.image_size", t.image_size));
    t.early_stop_improvement = cfg.get_double("train.early_stop_improvement", t.early_stop_improvement);
    t.early_stop_window = static_cast<int>(cfg.get_int("train.early_stop_window", t.early_stop_window));
    t.probe_images = static_cast<int>(cfg.get_int("train.probe_images", t.probe_images));
    t.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<std::int64_t>(t.seed)));
    t.validate();
    return t;
}

void TrainConfig::to_config(Config& cfg) const {
    cfg.set_double("train.lr", lr);
    cfg.set_int("train.batch", batch);
    cfg.set_int("train.lr_halving_period", lr_halving_period);
    cfg.set_int("train.schedule.detector_pretrain", schedule.detector_pretrain);
    cfg.set_int("train.schedule.remover", schedule.remover);
    cfg.set_int("train.schedule.detector_on_removed", schedule.detector_on_removed);
    cfg.set_int("train.schedule.detector_on_gt", schedule.detector_on_gt);
    cfg.set_int("train.cycles", cycles);
    cfg.set_int("train.image_size", image_size);
    cfg.set_double("train.early_stop_improvement", early_stop_improvement);
    cfg.set_int("train.early_stop_window", early_stop_window);
    cfg.set_int("train.probe_images", probe_images);
    cfg.set_int("seed", static_cast<std::int64_t>(seed));
}

void TrainConfig::validate() const {
    if (lr <= 0.0) throw ConfigError("train.lr must be > 0");
    if (batch < 1) throw ConfigError("train.batch must be >= 1");
    if (lr_halving_period < 1) throw ConfigError("train.lr_halving_period must be >= 1");
    if (schedule.detector_pretrain < 1 || schedule.remover < 1 ||
        schedule.detector_on_removed < 1 || schedule.detector_on_gt < 1)
        throw ConfigError("every schedule phase needs at least 1 epoch");
    if (cycles < 1) throw ConfigError("train.cycles must be >= 1");
    if (image_size % 256 != 0) throw ConfigError("train.image_size must be a multiple of 256");
    if (early_stop_window < 1) throw ConfigError("train.early_stop_window must be >= 1");
    if (probe_images < 1) throw ConfigError("train.probe_images must be >= 1");
}

Trainer::Trainer(const Config& run_config, std::vector<TrainSample> data,
                 const std::filesystem::path& out_dir)
    : run_config_(run_config),
      train_cfg_(TrainConfig::from_config(run_config)),
      augment_cfg_(AugmentConfig::from_config(run_config)),
      weights_(LossWeights::from_config(run_config)),
      data_(std::move(data)),
      out_dir_(out_dir) {
    if (data_.empty()) throw ValidationError("training needs a nonempty dataset");
    std::filesystem::create_directories(out_dir_);

    master_seed_ = train_cfg_.seed;
    dtype_ = train_dtype_from(run_config);

    // Augmentation renders at the network input size.
    augment_cfg_.out_rows = train_cfg_.image_size;
    augment_cfg_.out_cols = train_cfg_.image_size;

    backbone_ = std::make_unique<Backbone>(backbone_config_from(run_config, master_seed_, dtype_));
    detector_ = std::make_unique<Detector>(detector_config_from(run_config, master_seed_, dtype_));
    remover_ = std::make_unique<Remover>(remover_config_from(run_config, master_seed_, dtype_));

    detector_opt_ = std::make_unique<AdamOptimizer>(named_parameters_of(detector_->module()),
                                                    train_cfg_.lr);
    remover_opt_ = std::make_unique<AdamOptimizer>(named_parameters_of(remover_->module()),
                                                   train_cfg_.lr);
}

double Trainer::lr_for(std::int64_t accumulated_epochs) const {
    const auto halvings = accumulated_epochs / train_cfg_.lr_halving_period;
    return train_cfg_.lr * std::pow(0.5, static_cast<double>(halvings));
}

double Trainer::detector_lr() const { return lr_for(detector_epochs_); }
double Trainer::remover_lr() const { return lr_for(remover_epochs_); }

std::filesystem::path Trainer::checkpoint_path() const {
    return out_dir_ / "checkpoint_latest.ckpt";
}

std::vector<std::size_t> Trainer::epoch_order(int phase_index, int epoch) const {
    std::vector<std::size_t> order(data_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(master_seed_, "shuffle",
                        {static_cast<std::uint64_t>(phase_index), static_cast<std::uint64_t>(epoch)}));
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

Trainer::Batch Trainer::make_detector_batch(int phase_index, int epoch,
                                            const std::vector<const Image*>& inputs,
                                            const std::vector<const Image*>& masks,
                                            const std::vector<std::size_t>& order,
                                            std::size_t begin) {
    const int s = train_cfg_.image_size;
    std::vector<torch::Tensor> imgs, gts;
    for (std::size_t k = begin; k < begin + static_cast<std::size_t>(train_cfg_.batch); ++k) {
        const std::size_t idx = order[k];
        BScan img;
        img.pixels = *inputs[idx];
        ShadowMask mask;
        mask.kind = MaskKind::ground_truth_binary;
        mask.values = *masks[idx];
        if (augment_cfg_.enabled) {
            const auto seed = derive_seed(master_seed_, "augment",
                                          {static_cast<std::uint64_t>(phase_index),
                                           static_cast<std::uint64_t>(epoch), idx});
            auto [aug_img, aug_mask] = augment_pair(img, mask, augment_cfg_, seed);
            imgs.push_back(to_tensor(aug_img.pixels, dtype_));
            gts.push_back(to_tensor(aug_mask.values, dtype_));
        } else {
            imgs.push_back(to_tensor(resize(img, s, s).pixels, dtype_));
            gts.push_back(to_tensor(resize(mask, s, s).values, dtype_));
        }
    }
    return {torch::cat(imgs, 0), torch::cat(gts, 0)};
}

torch::Tensor Trainer::make_remover_batch(int phase_index, int epoch,
                                          const std::vector<std::size_t>& order,
                                          std::size_t begin) {
    const int s = train_cfg_.image_size;
    std::vector<torch::Tensor> imgs;
    for (std::size_t k = begin; k < begin + static_cast<std::size_t>(train_cfg_.batch); ++k) {
        const std::size_t idx = order[k];
        BScan img;
        img.pixels = data_[idx].image;
        if (augment_cfg_.enabled) {
            const auto seed = derive_seed(master_seed_, "augment",
                                          {static_cast<std::uint64_t>(phase_index),
                                           static_cast<std::uint64_t>(epoch), idx});
            imgs.push_back(to_tensor(augment_image(img, augment_cfg_, seed).pixels, dtype_));
        } else {
            imgs.push_back(to_tensor(resize(img, s, s).pixels, dtype_));
        }
    }
    return torch::cat(imgs, 0);
}

double Trainer::detector_epoch(int phase_index, int epoch, const std::vector<const Image*>& inputs,
                               const std::vector<const Image*>& masks, int cycle, PhaseKind kind) {
    detector_opt_->set_lr(lr_for(detector_epochs_));
    const auto order = epoch_order(phase_index, epoch);
    const std::size_t steps = data_.size() / static_cast<std::size_t>(train_cfg_.batch);
    if (steps == 0)
        throw ValidationError("dataset smaller than one batch; reduce train.batch");
    double loss_sum = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
        Batch batch = make_detector_batch(phase_index, epoch, inputs, masks, order,
                                          step * static_cast<std::size_t>(train_cfg_.batch));
        torch::Tensor loss = detector_bce_with_logits(detector_->forward_logits(batch.images),
                                                      batch.masks);
        detector_opt_->zero_grad();
        loss.backward();
        detector_opt_->step();
        const double value = loss.item<double>();
        loss_sum += value;
        ++global_step_;
        append_log("detector", cycle, kind, epoch, detector_opt_->lr(), value, std::nullopt);
    }
    ++detector_epochs_;
    return loss_sum / static_cast<double>(steps);
}

double Trainer::remover_epoch(int phase_index, int epoch, int cycle) {
    remover_opt_->set_lr(lr_for(remover_epochs_));
    const auto order = epoch_order(phase_index, epoch);
    const std::size_t steps = data_.size() / static_cast<std::size_t>(train_cfg_.batch);
    if (steps == 0)
        throw ValidationError("dataset smaller than one batch; reduce train.batch");
    double loss_sum = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
        const torch::Tensor baseline = make_remover_batch(
            phase_index, epoch, order, step * static_cast<std::size_t>(train_cfg_.batch));
        torch::Tensor pred_mask;
        {
            torch::NoGradGuard guard;
            pred_mask = detector_->forward(baseline);
        }
        // Dropout draws are re-seeded per step so resumed runs replay them.
        torch::manual_seed(derive_seed(master_seed_, "dropout",
                                       {static_cast<std::uint64_t>(phase_index),
                                        static_cast<std::uint64_t>(epoch),
                                        static_cast<std::uint64_t>(step)}));
        remover_->train(true);
        const torch::Tensor deshadowed = remover_->forward(baseline);
        TotalLossResult result =
            total_loss(baseline, deshadowed, pred_mask, *backbone_, *detector_, weights_);
        remover_opt_->zero_grad();
        result.total.backward();
        remover_opt_->step();
        remover_->train(false);
        loss_sum += result.values.total;
        ++global_step_;
        append_log("remover", cycle, PhaseKind::remover, epoch, remover_opt_->lr(), std::nullopt,
                   result.values);
    }
    ++remover_epochs_;
    return loss_sum / static_cast<double>(steps);
}

std::vector<Image> Trainer::regenerate_deshadowed() {
    const int s = train_cfg_.image_size;
    std::vector<Image> out;
    out.reserve(data_.size());
    remover_->train(false);
    torch::NoGradGuard guard;
    for (std::size_t begin = 0; begin < data_.size();
         begin += static_cast<std::size_t>(train_cfg_.batch)) {
        const std::size_t end = std::min(data_.size(), begin + static_cast<std::size_t>(train_cfg_.batch));
        std::vector<torch::Tensor> imgs;
        for (std::size_t i = begin; i < end; ++i) {
            BScan img;
            img.pixels = data_[i].image;
            imgs.push_back(to_tensor(resize(img, s, s).pixels, dtype_));
        }
        const torch::Tensor deshadowed = remover_->forward(torch::cat(imgs, 0));
        for (std::size_t i = begin; i < end; ++i)
            out.push_back(from_batch(deshadowed, static_cast<std::int64_t>(i - begin)));
    }
    return out;
}

double Trainer::run_detector_pretrain_phase() {
    const std::uint64_t remover_hash = remover_->weights_hash();
    std::vector<const Image*> inputs, masks;
    for (const TrainSample& s : data_) {
        inputs.push_back(&s.image);
        masks.push_back(&s.mask);
    }
    double mean = 0.0;
    for (int e = 0; e < train_cfg_.schedule.detector_pretrain; ++e)
        mean = detector_epoch(0, e, inputs, masks, -1, PhaseKind::detector_pretrain);
    if (remover_->weights_hash() != remover_hash)
        throw InternalError("remover weights changed during a detector phase");
    return mean;
}

double Trainer::run_remover_phase(int cycle) {
    const int phase_index = 1 + 3 * cycle;
    const std::uint64_t detector_hash = detector_->weights_hash();
    detector_->set_requires_grad(false);
    double mean = 0.0;
    for (int e = 0; e < train_cfg_.schedule.remover; ++e)
        mean = remover_epoch(phase_index, e, cycle);
    detector_->set_requires_grad(true);
    if (detector_->weights_hash() != detector_hash)
        throw InternalError("detector weights changed during the remover phase");
    return mean;
}

double Trainer::run_detector_on_removed_phase(int cycle) {
    const int phase_index = 2 + 3 * cycle;
    const std::uint64_t remover_hash = remover_->weights_hash();

    // Inputs are regenerated with the current remover at phase start, never
    // cached across phases. Masks are rendered once at the network size so
    // pairs share a shape.
    const std::vector<Image> deshadowed = regenerate_deshadowed();
    std::vector<Image> masks_at_size;
    masks_at_size.reserve(data_.size());
    const int s = train_cfg_.image_size;
    for (const TrainSample& sample : data_) {
        ShadowMask m;
        m.kind = MaskKind::ground_truth_binary;
        m.values = sample.mask;
        masks_at_size.push_back(resize(m, s, s).values);
    }
    std::vector<const Image*> inputs, masks;
    for (std::size_t i = 0; i < data_.size(); ++i) {
        inputs.push_back(&deshadowed[i]);
        masks.push_back(&masks_at_size[i]);
    }

    double mean = 0.0;
    for (int e = 0; e < train_cfg_.schedule.detector_on_removed; ++e)
        mean = detector_epoch(phase_index, e, inputs, masks, cycle, PhaseKind::detector_on_removed);
    if (remover_->weights_hash() != remover_hash)
        throw InternalError("remover weights changed during a detector phase");
    return mean;
}

double Trainer::run_detector_on_gt_phase(int cycle) {
    const int phase_index = 3 + 3 * cycle;
    const std::uint64_t remover_hash = remover_->weights_hash();
    std::vector<const Image*> inputs, masks;
    for (const TrainSample& s : data_) {
        inputs.push_back(&s.image);
        masks.push_back(&s.mask);
    }
    double mean = 0.0;
    for (int e = 0; e < train_cfg_.schedule.detector_on_gt; ++e)
        mean = detector_epoch(phase_index, e, inputs, masks, cycle, PhaseKind::detector_on_gt);
    if (remover_->weights_hash() != remover_hash)
        throw InternalError("remover weights changed during a detector phase");
    return mean;
}

double Trainer::probe_total_loss() {
    const int s = train_cfg_.image_size;
    const std::size_t n = std::min<std::size_t>(data_.size(),
                                                static_cast<std::size_t>(train_cfg_.probe_images));
    std::vector<torch::Tensor> imgs;
    for (std::size_t i = 0; i < n; ++i) {
        BScan img;
        img.pixels = data_[i].image;
        imgs.push_back(to_tensor(resize(img, s, s).pixels, dtype_));
    }
    torch::NoGradGuard guard;
    remover_->train(false);
    const torch::Tensor baseline = torch::cat(imgs, 0);
    const torch::Tensor pred_mask = detector_->forward(baseline);
    const torch::Tensor deshadowed = remover_->forward(baseline);
    const TotalLossResult result =
        total_loss(baseline, deshadowed, pred_mask, *backbone_, *detector_, weights_);
    return result.values.total;
}

void Trainer::run_phase(int phase_index) {
    PhaseRecord record;
    record.index = phase_index;
    if (phase_index == 0) {
        record.cycle = -1;
        record.kind = to_string(PhaseKind::detector_pretrain);
        record.epochs = train_cfg_.schedule.detector_pretrain;
        record.mean_loss = run_detector_pretrain_phase();
    } else {
        const int cycle = (phase_index - 1) / 3;
        record.cycle = cycle;
        switch ((phase_index - 1) % 3) {
            case 0:
                record.kind = to_string(PhaseKind::remover);
                record.epochs = train_cfg_.schedule.remover;
                record.mean_loss = run_remover_phase(cycle);
                break;
            case 1:
                record.kind = to_string(PhaseKind::detector_on_removed);
                record.epochs = train_cfg_.schedule.detector_on_removed;
                record.mean_loss = run_detector_on_removed_phase(cycle);
                break;
            case 2:
                record.kind = to_string(PhaseKind::detector_on_gt);
                record.epochs = train_cfg_.schedule.detector_on_gt;
                record.mean_loss = run_detector_on_gt_phase(cycle);
                break;
        }
    }
    ledger_.push_back(record);
    ++next_phase_index_;
    write_checkpoint();
    manifest().write(out_dir_);

    // Probe the remover after pretraining and at every cycle end; the probe
    // history drives early stopping and lives in the checkpoint.
    const bool cycle_end = phase_index > 0 && (phase_index - 1) % 3 == 2;
    if (phase_index == 0 || cycle_end) {
        probe_history_.push_back(probe_total_loss());
        write_checkpoint();
    }
}

void Trainer::run_single_phase() {
    if (next_phase_index_ >= phase_count())
        throw ValidationError("schedule already complete");
    run_phase(next_phase_index_);
}

void Trainer::run() {
    while (next_phase_index_ < phase_count() && !stopped_early_) {
        const int phase_index = next_phase_index_;
        run_phase(phase_index);

        const bool cycle_end = phase_index > 0 && (phase_index - 1) % 3 == 2;
        if (cycle_end &&
            probe_history_.size() > static_cast<std::size_t>(train_cfg_.early_stop_window)) {
            int stale = 0;
            for (std::size_t t = probe_history_.size() - 1;
                 t > 0 && stale < train_cfg_.early_stop_window; --t) {
                const double prev = probe_history_[t - 1];
                const double cur = probe_history_[t];
                const double rel = (prev - cur) / std::max(std::abs(prev), 1e-12);
                if (rel < train_cfg_.early_stop_improvement)
                    ++stale;
                else
                    break;
            }
            if (stale >= train_cfg_.early_stop_window) stopped_early_ = true;
        }
    }
    manifest().write(out_dir_);
}

void Trainer::write_checkpoint() {
    Checkpoint ckpt;
    ckpt.config_hash = run_config_.hash();
    ckpt.config_text = run_config_.canonical();
    ckpt.master_seed = master_seed_;
    ckpt.next_phase_index = next_phase_index_;
    ckpt.detector_epochs = detector_epochs_;
    ckpt.remover_epochs = remover_epochs_;
    ckpt.global_step = global_step_;
    ckpt.probe_history = probe_history_;
    ckpt.tensors = snapshot_module(detector_->module(), "detector");
    NamedTensors rem = snapshot_module(remover_->module(), "remover");
    for (auto& item : rem.items) ckpt.tensors.items.push_back(std::move(item));
    detector_opt_->export_state(ckpt.tensors, "opt.detector");
    remover_opt_->export_state(ckpt.tensors, "opt.remover");
    ckpt.save(checkpoint_path());
}

void Trainer::resume(const std::filesystem::path& checkpoint_path) {
    const Checkpoint ckpt = Checkpoint::load(checkpoint_path);
    if (ckpt.config_hash != run_config_.hash())
        throw ConfigError("checkpoint config hash " + hex64(ckpt.config_hash) +
                          " does not match the current config " + hex64(run_config_.hash()) +
                          "; refusing to resume");
    master_seed_ = ckpt.master_seed;
    next_phase_index_ = ckpt.next_phase_index;
    detector_epochs_ = ckpt.detector_epochs;
    remover_epochs_ = ckpt.remover_epochs;
    global_step_ = ckpt.global_step;
    probe_history_ = ckpt.probe_history;
    restore_module(detector_->module(), ckpt.tensors, "detector");
    restore_module(remover_->module(), ckpt.tensors, "remover");
    detector_opt_->import_state(ckpt.tensors, "opt.detector");
    remover_opt_->import_state(ckpt.tensors, "opt.remover");
}

void Trainer::append_log(const std::string& net, int cycle, PhaseKind kind, int epoch, double lr,
                         std::optional<double> bce, const std::optional<LossBreakdown>& breakdown) {
    const auto path = out_dir_ / "training_log.csv";
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot append to training log: " + path.string());
    if (fresh) out << "step,cycle,phase,epoch,net,lr,bce,content,style,shadow,tv,total\n";
    out.precision(12);
    out << global_step_ << ',' << cycle << ',' << to_string(kind) << ',' << epoch << ',' << net
        << ',' << lr << ',';
    if (bce) out << *bce;
    out << ',';
    if (breakdown)
        out << breakdown->content << ',' << breakdown->style << ',' << breakdown->shadow << ','
            << breakdown->tv << ',' << breakdown->total;
    else
        out << ",,,,";
    out << '\n';
}

RunManifest Trainer::manifest() const {
    RunManifest m;
    m.command = "train";
    m.code_version = kCodeVersion;
    m.config_hash = hex64(run_config_.hash());
    m.seed = master_seed_;
    m.threads = torch::get_num_threads();
    m.backbone_mode = backbone_->config().mode == BackboneConfig::Mode::pretrained
                          ? "pretrained"
                          : "random_seeded";
    m.backbone_checksum = hex64(backbone_->weights_hash());
    m.backbone_taps = backbone_->config().tap_ids;
    m.phase_ledger = ledger_;
    m.outputs = {"checkpoint_latest.ckpt", "training_log.csv"};
    m.notes["refine_activation"] = "relu after batch norm in refine modules";
    m.notes["final_decoder_skip"] = "stage 8 has no encoder partner at full resolution";
    m.notes["batching"] = "trailing partial batches are dropped during training";
    return m;
}

}  // namespace deshadow

#include "deshadow/commands.hpp"

#include <torch/torch.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "deshadow/errors.hpp"
#include "deshadow/hashing.hpp"
#include "deshadow/image_io.hpp"
#include "deshadow/manifest.hpp"
#include "deshadow/phantom.hpp"
#include "deshadow/rng.hpp"
#include "deshadow/trainer.hpp"
#include "deshadow/version.hpp"

namespace deshadow {

namespace {

void apply_threads(const std::optional<int>& threads) {
    if (threads && *threads > 0) torch::set_num_threads(*threads);
}

void require_empty_or_force(const std::filesystem::path& out_dir, bool force) {
    if (std::filesystem::exists(out_dir) && !std::filesystem::is_empty(out_dir) && !force)
        throw ConfigError("output directory exists and is not empty (use --force): " +
                          out_dir.string());
    std::filesystem::create_directories(out_dir);
}

std::string stem_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "phantom_%04d", index);
    return buf;
}

struct LoadedNets {
    Config config;
    std::unique_ptr<Remover> remover;
    std::unique_ptr<Detector> detector;
    int image_size = 512;
    std::uint64_t config_hash = 0;
};

LoadedNets nets_from_checkpoint(const std::filesystem::path& path) {
    const Checkpoint ckpt = Checkpoint::load(path);
    LoadedNets nets;
    nets.config = Config::parse_string(ckpt.config_text);
    nets.config_hash = ckpt.config_hash;
    const torch::Dtype dtype = train_dtype_from(nets.config);
    nets.detector = std::make_unique<Detector>(
        detector_config_from(nets.config, ckpt.master_seed, dtype));
    nets.remover = std::make_unique<Remover>(
        remover_config_from(nets.config, ckpt.master_seed, dtype));
    restore_module(nets.detector->module(), ckpt.tensors, "detector");
    restore_module(nets.remover->module(), ckpt.tensors, "remover");
    nets.image_size = static_cast<int>(nets.config.get_int("train.image_size", 512));
    return nets;
}

}  // namespace

void cmd_simulate(const SimulateOptions& options) {
    Config cfg = Config::parse_file(options.config);
    if (options.seed_override) cfg.set_int("seed", static_cast<std::int64_t>(*options.seed_override));
    const auto master_seed = static_cast<std::uint64_t>(cfg.get_int("seed", 7));
    const int count = static_cast<int>(cfg.get_int("simulate.count", 10));
    const int bit_depth = static_cast<int>(cfg.get_int("simulate.bit_depth", 16));
    const int n_shadows = static_cast<int>(cfg.get_int("shadow.count", 2));
    ShadowRanges ranges;
    ranges.width_min = static_cast<int>(cfg.get_int("shadow.width_min", ranges.width_min));
    ranges.width_max = static_cast<int>(cfg.get_int("shadow.width_max", ranges.width_max));
    ranges.alpha_min = cfg.get_double("shadow.alpha_min", ranges.alpha_min);
    ranges.alpha_max = cfg.get_double("shadow.alpha_max", ranges.alpha_max);
    const std::string start_policy = cfg.get_string("shadow.start", "surface");
    if (start_policy != "surface" && start_policy != "top")
        throw ConfigError("shadow.start must be 'surface' or 'top'");
    if (count < 1) throw ConfigError("simulate.count must be >= 1");

    require_empty_or_force(options.out_dir, options.force);
    std::filesystem::create_directories(options.out_dir / "images");
    std::filesystem::create_directories(options.out_dir / "masks");
    std::filesystem::create_directories(options.out_dir / "ground_truth");

    std::map<std::string, std::vector<RegionOfInterest>> all_rois;
    std::ofstream dataset_manifest(options.out_dir / "manifest.tsv");
    int without_rois = 0;

    for (int i = 0; i < count; ++i) {
        PhantomSpec spec = PhantomSpec::from_config(cfg);
        spec.rng_seed = derive_seed(master_seed, "phantom", {static_cast<std::uint64_t>(i)});
        const Phantom phantom = generate_phantom(spec);

        const std::optional<int> start_row =
            start_policy == "top" ? std::optional<int>(0) : std::nullopt;
        const ValidationPair pair =
            make_validation_pair(phantom.scan, n_shadows,
                                 derive_seed(master_seed, "shadows", {static_cast<std::uint64_t>(i)}),
                                 ranges, start_row);

        const std::string stem = stem_name(i);
        BScan shadowed = pair.shadowed;
        shadowed.source_id = stem;
        save_image(shadowed, options.out_dir / "images" / (stem + ".png"), bit_depth);
        save_mask(pair.mask, options.out_dir / "masks" / (stem + ".png"));
        BScan truth = pair.ground_truth;
        truth.source_id = stem;
        save_image(truth, options.out_dir / "ground_truth" / (stem + ".png"), bit_depth);
        dataset_manifest << stem << '\n';

        const auto rois = auto_rois(phantom, pair.mask);
        if (rois.empty()) {
            ++without_rois;
            std::cerr << "[simulate] warning: no ROI windows for '" << stem
                      << "' (all shadow bands too narrow)\n";
        } else {
            all_rois[stem] = rois;
        }
    }
    save_roi_file(options.out_dir / "rois.tsv", all_rois);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.code_version = kCodeVersion;
    manifest.config_hash = hex64(cfg.hash());
    manifest.seed = master_seed;
    manifest.threads = torch::get_num_threads();
    manifest.backbone_mode = "none";
    manifest.outputs = {"images/", "masks/", "ground_truth/", "rois.tsv", "manifest.tsv"};
    manifest.notes["images"] = std::to_string(count);
    manifest.notes["images_without_rois"] = std::to_string(without_rois);
    manifest.write(options.out_dir);
}

void cmd_train(const TrainOptions& options) {
    apply_threads(options.threads);
    Config cfg = Config::parse_file(options.config);
    if (options.seed_override) cfg.set_int("seed", static_cast<std::int64_t>(*options.seed_override));

    const auto entries = scan_dataset(options.data_dir, /*require_masks=*/true);
    auto samples = load_samples(entries);

    Trainer trainer(cfg, std::move(samples), options.out_dir);
    if (options.resume) trainer.resume(*options.resume);

    if (options.max_phases) {
        int remaining = *options.max_phases;
        const int total = 1 + 3 * trainer.train_config().cycles;
        while (remaining-- > 0 && trainer.next_phase_index() < total) {
            // One phase at a time via the public schedule entry points.
            const int index = trainer.next_phase_index();
            (void)index;
            trainer.run_single_phase();
        }
    } else {
        trainer.run();
    }
    std::cout << "training complete: " << trainer.ledger().size() << " phases, checkpoint at "
              << trainer.checkpoint_path().string() << "\n";
}

void cmd_infer(const InferOptions& options) {
    apply_threads(options.threads);
    if (options.bit_depth != 8 && options.bit_depth != 16)
        throw ConfigError("--bit-depth must be 8 or 16");
    LoadedNets nets = nets_from_checkpoint(options.checkpoint);

    if (!std::filesystem::is_directory(options.in_dir))
        throw IoError("input directory does not exist: " + options.in_dir.string());
    std::vector<std::filesystem::path> inputs;
    for (const auto& entry : std::filesystem::directory_iterator(options.in_dir))
        if (entry.is_regular_file() && is_supported_image_path(entry.path()))
            inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) throw ValidationError("no PNG/TIFF inputs in " + options.in_dir.string());

    std::filesystem::create_directories(options.out_dir);
    int failures = 0;
    double total_ms = 0.0;
    std::int64_t total_images = 0;
    for (const auto& path : inputs) {
        try {
            const BScan original = load_image(path);
            const BScan small = resize(original, nets.image_size, nets.image_size);
            BatchTimings timings;
            const auto deshadowed = nets.remover->infer_batch({small}, &timings);
            total_ms += timings.total_ms;
            total_images += timings.images;
            BScan restored = resize(deshadowed[0], original.height(), original.width());
            restored.source_id = original.source_id;
            save_image(restored, options.out_dir / path.filename(), options.bit_depth);
        } catch (const Error& e) {
            ++failures;
            std::cerr << "[infer] error on '" << path.filename().string() << "': " << e.what()
                      << "\n";
        }
    }

    RunManifest manifest;
    manifest.command = "infer";
    manifest.code_version = kCodeVersion;
    manifest.config_hash = hex64(nets.config_hash);
    manifest.seed = 0;
    manifest.threads = torch::get_num_threads();
    manifest.backbone_mode = "none";
    manifest.outputs = {std::to_string(total_images) + " deshadowed rasters"};
    manifest.notes["mean_ms_per_image"] =
        total_images ? std::to_string(total_ms / static_cast<double>(total_images)) : "n/a";
    manifest.write(options.out_dir);

    std::cout << "deshadowed " << total_images << " image(s), mean "
              << (total_images ? total_ms / static_cast<double>(total_images) : 0.0)
              << " ms/image\n";
    if (failures > 0)
        throw IoError(std::to_string(failures) + " input(s) failed; see messages above");
}

EvalReport cmd_evaluate(const EvaluateCmdOptions& options) {
    apply_threads(options.threads);
    if (!std::filesystem::exists(options.roi_file))
        throw IoError("ROI file does not exist: " + options.roi_file.string());
    LoadedNets nets = nets_from_checkpoint(options.checkpoint);
    const auto entries = scan_dataset(options.data_dir, /*require_masks=*/false);
    const auto rois = load_roi_file(options.roi_file);

    EvalOptions eval_options;
    eval_options.with_compensation = options.with_compensation;
    eval_options.image_size = nets.image_size;
    const EvalReport report =
        build_report(entries, *nets.remover, rois, options.out_dir, eval_options);

    RunManifest manifest;
    manifest.command = "evaluate";
    manifest.code_version = kCodeVersion;
    manifest.config_hash = hex64(nets.config_hash);
    manifest.seed = 0;
    manifest.threads = torch::get_num_threads();
    manifest.backbone_mode = "none";
    manifest.outputs = {"report.json", "report.csv", "profiles/"};
    manifest.notes["evaluated"] = std::to_string(report.evaluated);
    manifest.notes["skipped"] = std::to_string(report.skipped);
    manifest.write(options.out_dir);
    return report;
}

}  // namespace deshadow

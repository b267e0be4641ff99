// deshadow: detect and remove vessel shadows from OCT B-scans.
//
// Subcommands: simulate (synthetic phantom datasets), train (alternating
// adversarial schedule), infer (batch deshadowing), evaluate (intralayer
// contrast + restoration metrics against a trained checkpoint).

#include <CLI11.hpp>

#include <torch/torch.h>

#include <iostream>

#include "deshadow/commands.hpp"
#include "deshadow/errors.hpp"
#include "deshadow/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

int run(int argc, char** argv) {
    CLI::App app{"DeshadowGAN pipeline for OCT B-scan shadow removal"};
    app.set_version_flag("--version", deshadow::kCodeVersion);
    app.require_subcommand(1);

    // simulate
    deshadow::SimulateOptions sim;
    std::uint64_t seed_value = 0;
    auto* simulate = app.add_subcommand("simulate", "Generate a phantom dataset with shadows");
    simulate->add_option("--config", sim.config, "Run configuration file")->required();
    simulate->add_option("--out", sim.out_dir, "Output dataset directory")->required();
    simulate->add_flag("--force", sim.force, "Write into a non-empty output directory");
    auto* sim_seed = simulate->add_option("--seed", seed_value, "Override the config seed");

    // train
    deshadow::TrainOptions train;
    int threads = 0;
    auto* train_cmd = app.add_subcommand("train", "Run the alternating training schedule");
    train_cmd->add_option("--config", train.config, "Run configuration file")->required();
    train_cmd->add_option("--data", train.data_dir, "Dataset directory (images/ + masks/)")->required();
    train_cmd->add_option("--out", train.out_dir, "Output directory")->required();
    std::string resume_path;
    auto* resume_opt = train_cmd->add_option("--resume", resume_path, "Checkpoint to resume from");
    auto* train_seed = train_cmd->add_option("--seed", seed_value, "Override the config seed");
    auto* train_threads = train_cmd->add_option("--threads", threads, "Torch thread count");
    int max_phases = 0;
    auto* phases_opt =
        train_cmd->add_option("--max-phases", max_phases, "Stop after N phases (for testing)");

    // infer
    deshadow::InferOptions infer;
    auto* infer_cmd = app.add_subcommand("infer", "Deshadow every raster in a directory");
    infer_cmd->add_option("--checkpoint", infer.checkpoint, "Trained checkpoint")->required();
    infer_cmd->add_option("--in", infer.in_dir, "Input image directory")->required();
    infer_cmd->add_option("--out", infer.out_dir, "Output image directory")->required();
    infer_cmd->add_option("--bit-depth", infer.bit_depth, "Output bit depth (8 or 16)");
    auto* infer_threads = infer_cmd->add_option("--threads", threads, "Torch thread count");

    // evaluate
    deshadow::EvaluateCmdOptions eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Intralayer contrast and restoration report");
    eval_cmd->add_option("--checkpoint", eval.checkpoint, "Trained checkpoint")->required();
    eval_cmd->add_option("--data", eval.data_dir, "Dataset directory")->required();
    eval_cmd->add_option("--rois", eval.roi_file, "ROI definition file")->required();
    eval_cmd->add_option("--out", eval.out_dir, "Report output directory")->required();
    eval_cmd->add_flag("--with-compensation", eval.with_compensation,
                       "Include the compensation baseline columns");
    auto* eval_threads = eval_cmd->add_option("--threads", threads, "Torch thread count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) {
            if (!sim_seed->empty()) sim.seed_override = seed_value;
            deshadow::cmd_simulate(sim);
        } else if (train_cmd->parsed()) {
            if (!train_seed->empty()) train.seed_override = seed_value;
            if (!resume_opt->empty()) train.resume = resume_path;
            if (!train_threads->empty()) train.threads = threads;
            if (!phases_opt->empty()) train.max_phases = max_phases;
            deshadow::cmd_train(train);
        } else if (infer_cmd->parsed()) {
            if (!infer_threads->empty()) infer.threads = threads;
            deshadow::cmd_infer(infer);
        } else if (eval_cmd->parsed()) {
            if (!eval_threads->empty()) eval.threads = threads;
            deshadow::cmd_evaluate(eval);
        }
        return kExitOk;
    } catch (const deshadow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const deshadow::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitData;
    } catch (const deshadow::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return kExitData;
    } catch (const deshadow::ValidationError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const deshadow::PlacementError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

}  // namespace

int main(int argc, char** argv) {
    return run(argc, argv);
}

// Acceptance suite: one pass/fail line per criterion.
//
//  1 loss oracle equivalence          6 end-to-end phantom experiment
//  2 gradient checks                  7 no-hallucination check
//  3 architecture conformance         8 determinism + resume
//  4 schedule conformance             9 compensation baseline sanity
//  5 masking division of labor
//
// Criteria 6 and 7 share one training run (200 phantoms, width-scaled
// networks, 5 cycles); everything else is desk-quick.

#include <torch/torch.h>

#undef CHECK
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "deshadow/commands.hpp"
#include "deshadow/dataset.hpp"
#include "deshadow/evaluate.hpp"
#include "deshadow/hashing.hpp"
#include "deshadow/image_io.hpp"
#include "deshadow/losses.hpp"
#include "deshadow/phantom.hpp"
#include "deshadow/rng.hpp"
#include "deshadow/tensor_bridge.hpp"
#include "deshadow/trainer.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "tiny_run.hpp"

using namespace deshadow;
namespace fs = std::filesystem;

namespace {

struct Scorecard {
    int failures = 0;

    void record(int id, const std::string& name, bool passed, const std::string& detail,
                double seconds) {
        std::printf("[%s] criterion %d (%s): %s [%.1fs]\n", passed ? "PASS" : "FAIL", id,
                    name.c_str(), detail.c_str(), seconds);
        std::fflush(stdout);
        if (!passed) ++failures;
    }
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string fmt(double v, int precision = 6) {
    std::ostringstream out;
    out.precision(precision);
    out << v;
    return out.str();
}

// ---------------------------------------------------------------- criterion 1

bool criterion_loss_oracles(std::string* detail) {
    Rng rng(1001);
    double worst = 0.0;
    const auto note = [&](double err) { worst = std::max(worst, err); };

    // content + style on random taps up to 16x16
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<oracle::Tensor3> fa, fb;
        std::vector<torch::Tensor> ta, tb;
        for (int tap = 0; tap < 3; ++tap) {
            const int c = static_cast<int>(rng.uniform_int(1, 6));
            const int h = static_cast<int>(rng.uniform_int(1, 16));
            const int w = static_cast<int>(rng.uniform_int(1, 16));
            oracle::Tensor3 a(c, h, w), b(c, h, w);
            for (double& v : a.data) v = rng.uniform(-1, 1);
            for (double& v : b.data) v = rng.uniform(-1, 1);
            ta.push_back(torch::from_blob(a.data.data(), {1, c, h, w}, torch::kFloat64).clone());
            tb.push_back(torch::from_blob(b.data.data(), {1, c, h, w}, torch::kFloat64).clone());
            fa.push_back(std::move(a));
            fb.push_back(std::move(b));
        }
        note(std::abs(content_from_features(ta, tb).item<double>() -
                      oracle::content_distance(fa, fb)));
        note(std::abs(style_from_features(ta, tb).item<double>() -
                      oracle::style_distance(fa, fb)));
    }

    // tv on random images; checkerboard must be exactly 1
    for (int trial = 0; trial < 8; ++trial) {
        const int h = static_cast<int>(rng.uniform_int(2, 16));
        const int w = static_cast<int>(rng.uniform_int(2, 16));
        Image img(h, w);
        for (double& v : img.data) v = rng.uniform();
        note(std::abs(tv_loss(to_tensor(img, torch::kFloat64)).item<double>() -
                      oracle::total_variation(img)));
    }
    const torch::Tensor checker =
        torch::tensor({0.0, 1.0, 1.0, 0.0}, torch::kFloat64).reshape({1, 1, 2, 2});
    const bool checker_exact = tv_loss(checker).item<double>() == 1.0;

    // bce on random probabilities
    for (int trial = 0; trial < 8; ++trial) {
        const int n = static_cast<int>(rng.uniform_int(4, 16));
        std::vector<double> pred(static_cast<std::size_t>(n) * n), gt(pred.size());
        for (auto& v : pred) v = rng.uniform(0.005, 0.995);
        for (auto& v : gt) v = rng.uniform() < 0.4 ? 1.0 : 0.0;
        const auto tp = torch::from_blob(pred.data(), {1, 1, n, n}, torch::kFloat64).clone();
        const auto tg = torch::from_blob(gt.data(), {1, 1, n, n}, torch::kFloat64).clone();
        note(std::abs(detector_bce(tp, tg).item<double>() - oracle::bce_mean(pred, gt)));
    }

    *detail = "max |impl - oracle| = " + fmt(worst, 3) +
              std::string(checker_exact ? ", checkerboard exact" : ", CHECKERBOARD NOT EXACT");
    return worst <= 1e-6 && checker_exact;
}

// ---------------------------------------------------------------- criterion 2

bool criterion_gradient_checks(std::string* detail) {
    BackboneConfig bb_cfg;
    bb_cfg.width_scale = 0.25;
    bb_cfg.seed = 2002;
    bb_cfg.dtype = torch::kFloat64;
    const Backbone backbone(bb_cfg);

    DetectorConfig det_cfg;
    det_cfg.base_filters = 4;
    det_cfg.init_seed = 2003;
    det_cfg.dtype = torch::kFloat64;
    Detector tiny_detector(det_cfg);
    tiny_detector.set_requires_grad(false);

    const torch::Tensor baseline = torch::rand({1, 1, 32, 32}, torch::kFloat64);
    torch::Tensor mask = torch::zeros({1, 1, 32, 32}, torch::kFloat64);
    mask.index_put_({0, 0, torch::indexing::Slice(), torch::indexing::Slice(12, 19)}, 1.0);
    torch::Tensor x = torch::rand({1, 1, 32, 32}, torch::kFloat64).requires_grad_(true);

    double worst = 0.0;
    int checked = 0;
    const auto run = [&](const char*, const std::function<torch::Tensor()>& loss) {
        const auto res = testkit::check_input_gradient(x, loss, 10, 2004);
        worst = std::max(worst, res.max_rel_err);
        checked += res.probes_checked;
    };
    run("tv", [&] { return tv_loss(x); });
    run("content", [&] {
        auto [bm, dm] = mask_images(baseline, x, mask);
        return content_from_features(backbone.extract(bm), backbone.extract(dm));
    });
    run("style", [&] {
        auto [bm, dm] = mask_images(baseline, x, mask);
        return style_from_features(backbone.extract(bm), backbone.extract(dm));
    });
    run("shadow", [&] { return shadow_loss(x, tiny_detector); });

    *detail = "4 losses, " + std::to_string(checked) +
              " finite-difference probes, max rel err = " + fmt(worst, 3);
    return checked >= 30 && worst < 1e-3;
}

// ---------------------------------------------------------------- criterion 3

bool criterion_architecture(std::string* detail) {
    DetectorConfig det_cfg;  // full width
    Detector detector(det_cfg);
    const auto det_params = detector.parameter_count();
    const bool det_ok = det_params >= static_cast<std::int64_t>(13.4e6 * 0.85) &&
                        det_params <= static_cast<std::int64_t>(13.4e6 * 1.15);

    RemoverConfig rem_cfg;  // full width
    Remover remover(rem_cfg);
    const auto rem_params = remover.parameter_count();
    const bool rem_ok = rem_params >= static_cast<std::int64_t>(55.7e6 * 0.85) &&
                        rem_params <= static_cast<std::int64_t>(55.7e6 * 1.15);

    const torch::Tensor input = torch::rand({1, 1, 512, 512});
    torch::NoGradGuard guard;
    const torch::Tensor det_out = detector.forward(input);
    const torch::Tensor rem_out = remover.forward(input);
    const bool shapes_ok = det_out.sizes().equals(input.sizes()) &&
                           rem_out.sizes().equals(input.sizes());
    const bool ranges_ok = (det_out > 0).all().item<bool>() && (det_out < 1).all().item<bool>() &&
                           (rem_out > 0).all().item<bool>() && (rem_out < 1).all().item<bool>();

    const std::vector<int> expected_rem{256, 128, 64, 32, 16, 8, 4, 2};
    const bool halvings_ok = Remover::encoder_spatial_sizes(512) == expected_rem &&
                             detector.config().depth == 4 && (512 >> detector.config().depth) == 32;

    *detail = "detector " + std::to_string(det_params) + " params, remover " +
              std::to_string(rem_params) + " params, 512->512 outputs in (0,1), 8+4 halvings";
    return det_ok && rem_ok && shapes_ok && ranges_ok && halvings_ok;
}

// ---------------------------------------------------------------- criterion 4

bool criterion_schedule(const fs::path& workdir, std::string* detail) {
    const Config cfg = testkit::tiny_run_config(4004);
    const fs::path data_dir = workdir / "schedule_data";
    if (!fs::exists(data_dir / "rois.tsv")) testkit::write_tiny_dataset(data_dir, cfg);

    Trainer trainer(cfg, load_samples(scan_dataset(data_dir, true)), workdir / "schedule_run");

    // Pretrain: remover frozen.
    const auto rem_hash_0 = trainer.remover().weights_hash();
    trainer.run_single_phase();
    const bool frozen_1 = trainer.remover().weights_hash() == rem_hash_0;

    // Remover phase: detector frozen.
    const auto det_hash_1 = trainer.detector().weights_hash();
    trainer.run_single_phase();
    const bool frozen_2 = trainer.detector().weights_hash() == det_hash_1;

    // Adversarial detector phases: remover frozen through both.
    const auto rem_hash_2 = trainer.remover().weights_hash();
    trainer.run_single_phase();
    trainer.run_single_phase();
    const bool frozen_3 = trainer.remover().weights_hash() == rem_hash_2;

    const auto& ledger = trainer.ledger();
    const bool ledger_ok = ledger.size() == 4 && ledger[0].kind == "detector_pretrain" &&
                           ledger[0].epochs == 5 && ledger[1].kind == "remover" &&
                           ledger[1].epochs == 1 && ledger[2].kind == "detector_on_removed" &&
                           ledger[2].epochs == 5 && ledger[3].kind == "detector_on_gt" &&
                           ledger[3].epochs == 5;

    // lr decay: defaults 1e-5 halved every 10 epochs -> 2.5e-6 at 20 epochs.
    Config lr_cfg = cfg;
    lr_cfg.set_double("train.lr", 1e-5);
    lr_cfg.set_int("train.schedule.detector_pretrain", 20);
    Trainer lr_trainer(lr_cfg, load_samples(scan_dataset(data_dir, true)), workdir / "lr_run");
    lr_trainer.run_single_phase();
    const bool lr_ok = lr_trainer.detector_epochs() == 20 &&
                       std::abs(lr_trainer.detector_lr() - 2.5e-6) < 1e-18;

    *detail = std::string("ledger 5/1/5+5 ") + (ledger_ok ? "ok" : "WRONG") +
              ", frozen hashes " + ((frozen_1 && frozen_2 && frozen_3) ? "ok" : "CHANGED") +
              ", lr(20 epochs) = " + fmt(lr_trainer.detector_lr(), 3);
    return ledger_ok && frozen_1 && frozen_2 && frozen_3 && lr_ok;
}

// ---------------------------------------------------------------- criterion 5

bool criterion_masking_division(std::string* detail) {
    BackboneConfig bb_cfg;
    bb_cfg.width_scale = 0.125;
    bb_cfg.seed = 5005;
    bb_cfg.dtype = torch::kFloat64;
    const Backbone backbone(bb_cfg);

    DetectorConfig det_cfg;
    det_cfg.base_filters = 4;
    det_cfg.init_seed = 5006;
    det_cfg.dtype = torch::kFloat64;
    Detector detector(det_cfg);
    detector.set_requires_grad(false);
    LossWeights weights;

    Rng rng(5007);
    bool all_ok = true;
    for (int trial = 0; trial < 5; ++trial) {
        const torch::Tensor baseline = torch::rand({1, 1, 64, 64}, torch::kFloat64);
        torch::Tensor deshadowed = torch::rand({1, 1, 64, 64}, torch::kFloat64);
        torch::Tensor mask = torch::zeros_like(baseline);
        const int col = static_cast<int>(rng.uniform_int(4, 52));
        mask.index_put_({0, 0, torch::indexing::Slice(), torch::indexing::Slice(col, col + 8)},
                        1.0);

        const auto before = total_loss(baseline, deshadowed, mask, backbone, detector, weights);
        const int row = static_cast<int>(rng.uniform_int(2, 61));
        deshadowed.index_put_({0, 0, row, col + 3},
                              std::fmod(deshadowed[0][0][row][col + 3].item<double>() + 0.37, 1.0));
        const auto after = total_loss(baseline, deshadowed, mask, backbone, detector, weights);

        all_ok = all_ok && after.values.content == before.values.content &&
                 after.values.style == before.values.style && after.values.tv != before.values.tv &&
                 after.values.shadow != before.values.shadow;
    }
    *detail = all_ok ? "masked-pixel perturbations reach tv+shadow only (5 random cases)"
                     : "A MASKED PIXEL LEAKED INTO CONTENT/STYLE";
    return all_ok;
}

// ------------------------------------------------------- experiment (6 and 7)

struct ExperimentOutcome {
    bool ran = false;
    double contrast_base = 0.0;
    double contrast_desh = 0.0;
    double contrast_decrease_pct = 0.0;
    double mae_shadowed = 0.0;
    double mae_deshadowed = 0.0;
    double mae_improvement_pct = 0.0;
    double unmasked_mae_mean = 0.0;
    double unmasked_mae_worst = 0.0;
    int eval_images = 0;
    double train_seconds = 0.0;
};

Config experiment_config() {
    Config cfg;
    cfg.set_int("seed", 60001);
    cfg.set_int("simulate.count", 200);
    cfg.set_int("phantom.height", 256);
    cfg.set_int("phantom.width", 256);
    cfg.set_double("phantom.speckle_std", 0.025);
    cfg.set_double("phantom.wobble_px", 2);
    cfg.set_int("shadow.count", 2);
    cfg.set_int("shadow.width_min", 1);
    cfg.set_int("shadow.width_max", 100);
    cfg.set_double("shadow.alpha_min", 100);
    cfg.set_double("shadow.alpha_max", 300);
    cfg.set_int("train.image_size", 256);
    cfg.set_int("train.cycles", 5);
    cfg.set_int("train.batch", 2);
    cfg.set_double("train.lr", 3e-4);
    cfg.set_int("train.lr_halving_period", 10);
    cfg.set_int("train.probe_images", 4);
    cfg.set_int("detector.base_filters", 16);
    cfg.set_int("remover.base_filters", 16);
    cfg.set_double("backbone.width_scale", 0.25);
    cfg.set("augment.enabled", "true");
    return cfg;
}

ExperimentOutcome run_experiment(const fs::path& workdir, bool reuse) {
    ExperimentOutcome out;
    const fs::path train_data = workdir / "exp_train_data";
    const fs::path eval_data = workdir / "exp_eval_data";
    const fs::path run_dir = workdir / "exp_run";
    const fs::path report_dir = workdir / "exp_report";

    Config cfg = experiment_config();
    const fs::path cfg_path = workdir / "experiment.cfg";
    cfg.save(cfg_path);

    if (!reuse || !fs::exists(train_data / "rois.tsv")) {
        SimulateOptions sim;
        sim.config = cfg_path;
        sim.out_dir = train_data;
        sim.force = true;
        cmd_simulate(sim);

        Config eval_cfg = cfg;
        eval_cfg.set_int("seed", 60002);
        eval_cfg.set_int("simulate.count", 20);
        const fs::path eval_cfg_path = workdir / "experiment_eval.cfg";
        eval_cfg.save(eval_cfg_path);
        SimulateOptions sim_eval;
        sim_eval.config = eval_cfg_path;
        sim_eval.out_dir = eval_data;
        sim_eval.force = true;
        cmd_simulate(sim_eval);
    }

    const fs::path ckpt = run_dir / "checkpoint_latest.ckpt";
    const double t0 = now_seconds();
    if (!reuse || !fs::exists(ckpt)) {
        TrainOptions train;
        train.config = cfg_path;
        train.data_dir = train_data;
        train.out_dir = run_dir;
        cmd_train(train);
    }
    out.train_seconds = now_seconds() - t0;

    EvaluateCmdOptions eval;
    eval.checkpoint = ckpt;
    eval.data_dir = eval_data;
    eval.roi_file = eval_data / "rois.tsv";
    eval.out_dir = report_dir;
    eval.with_compensation = true;
    const EvalReport report = cmd_evaluate(eval);

    double base_sum = 0.0, desh_sum = 0.0;
    int layer_count = 0;
    double sh_mae_sum = 0.0, de_mae_sum = 0.0, un_sum = 0.0, un_worst = 0.0;
    int rest_count = 0;
    for (const ImageEval& img : report.images) {
        if (img.skipped) continue;
        for (const auto& [layer, m] : img.layers) {
            base_sum += m.baseline;
            desh_sum += m.deshadowed;
            ++layer_count;
        }
        if (img.has_restoration) {
            sh_mae_sum += img.shadowed_mae;
            de_mae_sum += img.deshadowed_mae;
            un_sum += img.unmasked_mae;
            un_worst = std::max(un_worst, img.unmasked_mae);
            ++rest_count;
        }
    }
    out.ran = layer_count > 0 && rest_count > 0;
    if (!out.ran) return out;
    out.eval_images = rest_count;
    out.contrast_base = base_sum / layer_count;
    out.contrast_desh = desh_sum / layer_count;
    out.contrast_decrease_pct = (out.contrast_base - out.contrast_desh) / out.contrast_base * 100.0;
    out.mae_shadowed = sh_mae_sum / rest_count;
    out.mae_deshadowed = de_mae_sum / rest_count;
    out.mae_improvement_pct = (out.mae_shadowed - out.mae_deshadowed) / out.mae_shadowed * 100.0;
    out.unmasked_mae_mean = un_sum / rest_count;
    out.unmasked_mae_worst = un_worst;
    return out;
}

bool criterion_experiment(const ExperimentOutcome& exp, std::string* detail) {
    if (!exp.ran) {
        *detail = "experiment produced no evaluable images";
        return false;
    }
    const bool contrast_ok = exp.contrast_decrease_pct >= 25.0;
    const bool mae_ok = exp.mae_improvement_pct >= 30.0;
    *detail = "contrast " + fmt(exp.contrast_base, 4) + " -> " + fmt(exp.contrast_desh, 4) +
              " (-" + fmt(exp.contrast_decrease_pct, 4) + "%, need >=25%), masked MAE " +
              fmt(exp.mae_shadowed, 4) + " -> " + fmt(exp.mae_deshadowed, 4) + " (-" +
              fmt(exp.mae_improvement_pct, 4) + "%, need >=30%), " +
              std::to_string(exp.eval_images) + " held-out images, train " +
              fmt(exp.train_seconds / 60.0, 3) + " min";
    return contrast_ok && mae_ok;
}

bool criterion_no_hallucination(const ExperimentOutcome& exp, std::string* detail) {
    if (!exp.ran) {
        *detail = "experiment produced no evaluable images";
        return false;
    }
    *detail = "unmasked MAE mean " + fmt(exp.unmasked_mae_mean, 4) + ", worst " +
              fmt(exp.unmasked_mae_worst, 4) + " (need mean < 0.02)";
    return exp.unmasked_mae_mean < 0.02;
}

// ---------------------------------------------------------------- criterion 8

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool criterion_determinism(const fs::path& workdir, std::string* detail) {
    // (a) simulate is byte-reproducible per seed.
    const Config cfg = testkit::tiny_run_config(8008);
    const fs::path cfg_path = workdir / "det.cfg";
    cfg.save(cfg_path);
    for (const char* dir : {"det_a", "det_b"}) {
        SimulateOptions sim;
        sim.config = cfg_path;
        sim.out_dir = workdir / dir;
        sim.force = true;
        cmd_simulate(sim);
    }
    bool simulate_ok = slurp(workdir / "det_a" / "rois.tsv") == slurp(workdir / "det_b" / "rois.tsv");
    for (const auto& entry : fs::directory_iterator(workdir / "det_a" / "images"))
        simulate_ok = simulate_ok && slurp(entry.path()) ==
                                         slurp(workdir / "det_b" / "images" / entry.path().filename());

    // (b) tiny training runs are reproducible end to end.
    const auto train_into = [&](const fs::path& out, std::optional<int> phases,
                                std::optional<fs::path> resume) {
        TrainOptions t;
        t.config = cfg_path;
        t.data_dir = workdir / "det_a";
        t.out_dir = out;
        t.max_phases = phases;
        t.resume = resume;
        cmd_train(t);
    };
    train_into(workdir / "det_run1", std::nullopt, std::nullopt);
    train_into(workdir / "det_run2", std::nullopt, std::nullopt);
    const bool train_ok = slurp(workdir / "det_run1" / "checkpoint_latest.ckpt") ==
                          slurp(workdir / "det_run2" / "checkpoint_latest.ckpt");

    // (c) interrupt + resume matches the uninterrupted run byte for byte.
    train_into(workdir / "det_run3", 2, std::nullopt);
    train_into(workdir / "det_run3", std::nullopt,
               workdir / "det_run3" / "checkpoint_latest.ckpt");
    const bool resume_ok = slurp(workdir / "det_run3" / "checkpoint_latest.ckpt") ==
                           slurp(workdir / "det_run1" / "checkpoint_latest.ckpt");

    *detail = std::string("simulate bytes ") + (simulate_ok ? "ok" : "DIFFER") +
              ", repeated train bytes " + (train_ok ? "ok" : "DIFFER") + ", resume " +
              (resume_ok ? "matches uninterrupted" : "DIVERGED");
    return simulate_ok && train_ok && resume_ok;
}

// ---------------------------------------------------------------- criterion 9

bool criterion_compensation(const fs::path& workdir, std::string* detail) {
    // Direct sanity on a phantom shadow.
    PhantomSpec spec;
    spec.height = 256;
    spec.width = 256;
    spec.speckle_std = 0.03;
    spec.rng_seed = 9009;
    const Phantom ph = generate_phantom(spec);
    ShadowSpec shadow;
    shadow.col_start = 80;
    shadow.width = 40;
    shadow.alpha = 140.0;
    shadow.start_row = detect_surface_row(ph.scan);
    const auto [shadowed, mask] = inject_shadow(ph.scan, shadow);
    const BScan compensated = compensate(shadowed);

    double before = 0.0, after = 0.0;
    int count = 0;
    for (int r = 128; r < 256; ++r)
        for (int c = 80; c < 120; ++c)
            if (mask.values.at(r, c) > 0.5) {
                before += shadowed.pixels.at(r, c);
                after += compensated.pixels.at(r, c);
                ++count;
            }
    const bool brightens = count > 0 && after > before;

    // Report structure: baseline/deshadowed/compensated columns per layer.
    // Reuses criterion 8's tiny run when present, otherwise builds its own.
    fs::path run_dir = workdir / "det_run1";
    fs::path data_dir = workdir / "det_a";
    if (!fs::exists(run_dir / "checkpoint_latest.ckpt")) {
        const Config cfg = testkit::tiny_run_config(9010);
        const fs::path cfg_path = workdir / "comp.cfg";
        cfg.save(cfg_path);
        data_dir = workdir / "comp_data";
        run_dir = workdir / "comp_run";
        SimulateOptions sim;
        sim.config = cfg_path;
        sim.out_dir = data_dir;
        sim.force = true;
        cmd_simulate(sim);
        TrainOptions train;
        train.config = cfg_path;
        train.data_dir = data_dir;
        train.out_dir = run_dir;
        train.max_phases = 1;
        cmd_train(train);
    }
    bool columns_ok = false;
    if (fs::exists(run_dir / "checkpoint_latest.ckpt")) {
        EvaluateCmdOptions eval;
        eval.checkpoint = run_dir / "checkpoint_latest.ckpt";
        eval.data_dir = data_dir;
        eval.roi_file = data_dir / "rois.tsv";
        eval.out_dir = workdir / "comp_report";
        eval.with_compensation = true;
        const EvalReport report = cmd_evaluate(eval);
        columns_ok = !report.aggregate.empty();
        for (const auto& [layer, metrics] : report.aggregate)
            columns_ok = columns_ok && metrics.count("baseline") && metrics.count("deshadowed") &&
                         metrics.count("compensated");
    }

    *detail = std::string("masked depth intensity ") +
              (brightens ? "rises under compensation" : "DOES NOT RISE") +
              ", report columns baseline/deshadowed/compensated " +
              (columns_ok ? "present" : "MISSING");
    return brightens && columns_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deshadow acceptance suite"};
    std::string only, skip;
    std::string workdir_arg;
    int threads = 0;
    bool reuse = false;
    app.add_option("--only", only, "Comma-separated criterion ids to run");
    app.add_option("--skip", skip, "Comma-separated criterion ids to skip");
    app.add_option("--workdir", workdir_arg, "Working directory (kept after the run)");
    app.add_option("--threads", threads, "Torch thread count");
    app.add_flag("--reuse", reuse, "Reuse existing experiment artifacts in the workdir");
    CLI11_PARSE(app, argc, argv);

    if (threads > 0) torch::set_num_threads(threads);

    const auto parse_set = [](const std::string& csv) {
        std::set<int> out;
        std::istringstream in(csv);
        std::string item;
        while (std::getline(in, item, ','))
            if (!item.empty()) out.insert(std::stoi(item));
        return out;
    };
    const std::set<int> only_set = parse_set(only);
    const std::set<int> skip_set = parse_set(skip);
    const auto enabled = [&](int id) {
        if (!only_set.empty()) return only_set.count(id) > 0;
        return skip_set.count(id) == 0;
    };

    fs::path workdir = workdir_arg.empty()
                           ? fs::temp_directory_path() / ("deshadow-acceptance-" +
                                                          std::to_string(::getpid()))
                           : fs::path(workdir_arg);
    fs::create_directories(workdir);
    std::printf("workdir: %s, torch threads: %d\n", workdir.string().c_str(),
                torch::get_num_threads());

    Scorecard score;
    const auto run = [&](int id, const char* name, const std::function<bool(std::string*)>& fn) {
        if (!enabled(id)) return;
        std::string detail;
        const double t0 = now_seconds();
        bool passed = false;
        try {
            passed = fn(&detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        score.record(id, name, passed, detail, now_seconds() - t0);
    };

    run(1, "loss oracle equivalence", criterion_loss_oracles);
    run(2, "gradient checks", criterion_gradient_checks);
    run(3, "architecture conformance", criterion_architecture);
    run(4, "schedule conformance",
        [&](std::string* d) { return criterion_schedule(workdir, d); });
    run(5, "masking division of labor", criterion_masking_division);

    ExperimentOutcome experiment;
    if (enabled(6) || enabled(7)) experiment = run_experiment(workdir, reuse);
    run(6, "end-to-end phantom experiment",
        [&](std::string* d) { return criterion_experiment(experiment, d); });
    run(7, "no-hallucination check",
        [&](std::string* d) { return criterion_no_hallucination(experiment, d); });

    run(8, "determinism and resume",
        [&](std::string* d) { return criterion_determinism(workdir, d); });
    run(9, "compensation baseline sanity",
        [&](std::string* d) { return criterion_compensation(workdir, d); });

    std::printf("%s: %d criterion(s) failed\n", score.failures == 0 ? "OK" : "FAILURES",
                score.failures);
    return score.failures;
}

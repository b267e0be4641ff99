#pragma once

// Shared desk-scale fixtures: a tiny phantom dataset on disk plus the
// matching run configuration (256x256, narrow networks, thin backbone).

#include <filesystem>
#include <string>

#include "deshadow/commands.hpp"
#include "deshadow/config.hpp"

namespace testkit {

inline deshadow::Config tiny_run_config(std::uint64_t seed = 11) {
    deshadow::Config cfg;
    cfg.set_int("seed", static_cast<std::int64_t>(seed));
    cfg.set_int("simulate.count", 4);
    cfg.set_int("phantom.height", 256);
    cfg.set_int("phantom.width", 256);
    cfg.set_double("phantom.speckle_std", 0.04);
    cfg.set_double("phantom.wobble_px", 2);
    cfg.set_int("shadow.width_min", 10);
    cfg.set_int("shadow.width_max", 60);
    cfg.set_int("train.image_size", 256);
    cfg.set_int("train.cycles", 1);
    cfg.set_int("train.batch", 2);
    cfg.set_double("train.lr", 1e-4);
    cfg.set_int("train.probe_images", 2);
    cfg.set_int("detector.base_filters", 2);
    cfg.set_int("remover.base_filters", 2);
    cfg.set_double("backbone.width_scale", 0.03125);
    cfg.set("augment.enabled", "true");
    return cfg;
}

inline void write_tiny_dataset(const std::filesystem::path& dir, const deshadow::Config& cfg) {
    const auto cfg_path = dir.parent_path() / (dir.filename().string() + ".cfg");
    cfg.save(cfg_path);
    deshadow::SimulateOptions options;
    options.config = cfg_path;
    options.out_dir = dir;
    options.force = true;
    deshadow::cmd_simulate(options);
}

}  // namespace testkit

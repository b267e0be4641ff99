#include "deshadow/augment.hpp"

#include <sstream>

#include "deshadow/rng.hpp"

namespace deshadow {

void AugmentConfig::validate() const {
    if (p_hflip < 0.0 || p_hflip > 1.0) throw ValidationError("p_hflip must lie in [0,1]");
    if (rot_deg_min > rot_deg_max || translate_frac_min > translate_frac_max ||
        scale_min > scale_max || shear_deg_min > shear_deg_max)
        throw ValidationError("augment range has min > max");
    if (scale_min <= 0.0) throw ValidationError("scale range must be positive");
    if (out_rows < 2 || out_cols < 2) throw ValidationError("augment out_size too small");
}

AugmentConfig AugmentConfig::from_config(const Config& cfg) {
    AugmentConfig a;
    a.p_hflip = cfg.get_double("augment.p_hflip", a.p_hflip);
    a.rot_deg_min = cfg.get_double("augment.rot_deg_min", a.rot_deg_min);
    a.rot_deg_max = cfg.get_double("augment.rot_deg_max", a.rot_deg_max);
    a.translate_frac_min = cfg.get_double("augment.translate_frac_min", a.translate_frac_min);
    a.translate_frac_max = cfg.get_double("augment.translate_frac_max", a.translate_frac_max);
    a.scale_min = cfg.get_double("augment.scale_min", a.scale_min);
    a.scale_max = cfg.get_double("augment.scale_max", a.scale_max);
    a.shear_deg_min = cfg.get_double("augment.shear_deg_min", a.shear_deg_min);
    a.shear_deg_max = cfg.get_double("augment.shear_deg_max", a.shear_deg_max);
    a.out_rows = static_cast<int>(cfg.get_int("augment.out_rows", a.out_rows));
    a.out_cols = static_cast<int>(cfg.get_int("augment.out_cols", a.out_cols));
    a.enabled = cfg.get_bool("augment.enabled", a.enabled);
    a.validate();
    return a;
}

void AugmentConfig::to_config(Config& cfg) const {
    cfg.set_double("augment.p_hflip", p_hflip);
    cfg.set_double("augment.rot_deg_min", rot_deg_min);
    cfg.set_double("augment.rot_deg_max", rot_deg_max);
    cfg.set_double("augment.translate_frac_min", translate_frac_min);
    cfg.set_double("augment.translate_frac_max", translate_frac_max);
    cfg.set_double("augment.scale_min", scale_min);
    cfg.set_double("augment.scale_max", scale_max);
    cfg.set_double("augment.shear_deg_min", shear_deg_min);
    cfg.set_double("augment.shear_deg_max", shear_deg_max);
    cfg.set_int("augment.out_rows", out_rows);
    cfg.set_int("augment.out_cols", out_cols);
    cfg.set("augment.enabled", enabled ? "true" : "false");
}

std::string AffineParams::describe() const {
    std::ostringstream out;
    out << "hflip=" << (hflip ? 1 : 0) << " rot=" << rot_deg << " tx=" << translate_x_frac
        << " ty=" << translate_y_frac << " scale=" << scale << " shear=" << shear_deg;
    return out.str();
}

AffineParams sample_params(const AugmentConfig& cfg, std::uint64_t draw_seed) {
    cfg.validate();
    Rng rng(draw_seed);
    AffineParams p;
    p.hflip = rng.uniform() < cfg.p_hflip;
    p.rot_deg = rng.uniform(cfg.rot_deg_min, cfg.rot_deg_max);
    p.translate_x_frac = rng.uniform(cfg.translate_frac_min, cfg.translate_frac_max);
    p.translate_y_frac = rng.uniform(cfg.translate_frac_min, cfg.translate_frac_max);
    p.scale = rng.uniform(cfg.scale_min, cfg.scale_max);
    p.shear_deg = rng.uniform(cfg.shear_deg_min, cfg.shear_deg_max);
    return p;
}

Affine build_affine(const AffineParams& params, int rows, int cols) {
    // Flip first, then rotate/scale/shear about the center, then translate.
    Affine m = Affine::identity();
    if (params.hflip) m = Affine::hflip(cols);
    Affine rss = Affine::rotation_deg(params.rot_deg)
                     .compose(Affine::scaling(params.scale, params.scale))
                     .compose(Affine::shear_x_deg(params.shear_deg));
    m = about_center(rss, rows, cols).compose(m);
    m = Affine::translation(params.translate_x_frac * cols, params.translate_y_frac * rows)
            .compose(m);
    return m;
}

std::pair<BScan, ShadowMask> augment_pair(const BScan& img, const ShadowMask& mask,
                                          const AugmentConfig& cfg, std::uint64_t draw_seed) {
    validate_pair(img, mask);
    const AffineParams params = sample_params(cfg, draw_seed);
    const Affine m = build_affine(params, img.height(), img.width());

    BScan out_img = img;
    out_img.pixels = warp_affine(img.pixels, m, img.height(), img.width(), Sampling::bilinear, 0.0);
    clip_in_place(out_img.pixels);

    ShadowMask out_mask = mask;
    const bool binary = mask.kind == MaskKind::ground_truth_binary;
    out_mask.values = warp_affine(mask.values, m, img.height(), img.width(),
                                  binary ? Sampling::nearest : Sampling::bilinear, 0.0);
    if (binary) binarize_in_place(out_mask.values);

    BScan resized_img = resize(out_img, cfg.out_rows, cfg.out_cols);
    ShadowMask resized_mask = resize(out_mask, cfg.out_rows, cfg.out_cols);
    return {std::move(resized_img), std::move(resized_mask)};
}

BScan augment_image(const BScan& img, const AugmentConfig& cfg, std::uint64_t draw_seed) {
    const AffineParams params = sample_params(cfg, draw_seed);
    const Affine m = build_affine(params, img.height(), img.width());
    BScan out = img;
    out.pixels = warp_affine(img.pixels, m, img.height(), img.width(), Sampling::bilinear, 0.0);
    clip_in_place(out.pixels);
    return resize(out, cfg.out_rows, cfg.out_cols);
}

}  // namespace deshadow

#pragma once

#include "deshadow/image.hpp"

namespace deshadow {

// 2-D affine map  (x', y') = (a*x + b*y + tx, c*x + d*y + ty)
// with x = column and y = row, both in pixel units.
struct Affine {
    double a = 1.0, b = 0.0, tx = 0.0;
    double c = 0.0, d = 1.0, ty = 0.0;

    static Affine identity() { return {}; }
    static Affine translation(double tx, double ty);
    static Affine scaling(double sx, double sy);
    static Affine rotation_deg(double degrees);
    static Affine shear_x_deg(double degrees);
    static Affine hflip(double width);

    // this ∘ other: apply `other` first, then this.
    Affine compose(const Affine& other) const;
    Affine inverse() const;

    void apply(double x, double y, double* out_x, double* out_y) const;
};

// Affine anchored at the image center: recenter, apply m, restore.
Affine about_center(const Affine& m, int rows, int cols);

enum class Sampling { bilinear, nearest };

// Warps src through the given forward map; each output pixel samples
// src at forward^-1(output). Pixels mapping outside src are filled with
// fill_value.
Image warp_affine(const Image& src, const Affine& forward, int out_rows, int out_cols,
                  Sampling sampling, double fill_value = 0.0);

Image resize_image(const Image& src, int out_rows, int out_cols, Sampling sampling);

// Bilinear resize; output stays in the value range of the input.
BScan resize(const BScan& img, int out_rows, int out_cols);

// Nearest-neighbor + re-binarization for ground-truth masks, bilinear for
// soft masks.
ShadowMask resize(const ShadowMask& mask, int out_rows, int out_cols);

void binarize_in_place(Image& img, double threshold = 0.5);

}  // namespace deshadow

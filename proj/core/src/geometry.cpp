#include "deshadow/geometry.hpp"

#include <cmath>
#include <numbers>

namespace deshadow {

namespace {
constexpr double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

double sample_bilinear(const Image& src, double x, double y, double fill) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto tap = [&](int yy, int xx) -> double {
        if (xx < 0 || yy < 0 || xx >= src.cols || yy >= src.rows) return fill;
        return src.at(yy, xx);
    };
    const double top = (1.0 - fx) * tap(y0, x0) + fx * tap(y0, x0 + 1);
    const double bot = (1.0 - fx) * tap(y0 + 1, x0) + fx * tap(y0 + 1, x0 + 1);
    return (1.0 - fy) * top + fy * bot;
}

double sample_nearest(const Image& src, double x, double y, double fill) {
    const int xx = static_cast<int>(std::lround(x));
    const int yy = static_cast<int>(std::lround(y));
    if (xx < 0 || yy < 0 || xx >= src.cols || yy >= src.rows) return fill;
    return src.at(yy, xx);
}
}  // namespace

Affine Affine::translation(double tx, double ty) {
    Affine m;
    m.tx = tx;
    m.ty = ty;
    return m;
}

Affine Affine::scaling(double sx, double sy) {
    Affine m;
    m.a = sx;
    m.d = sy;
    return m;
}

Affine Affine::rotation_deg(double degrees) {
    const double t = deg2rad(degrees);
    Affine m;
    m.a = std::cos(t);
    m.b = -std::sin(t);
    m.c = std::sin(t);
    m.d = std::cos(t);
    return m;
}

Affine Affine::shear_x_deg(double degrees) {
    Affine m;
    m.b = std::tan(deg2rad(degrees));
    return m;
}

Affine Affine::hflip(double width) {
    Affine m;
    m.a = -1.0;
    m.tx = width - 1.0;
    return m;
}

Affine Affine::compose(const Affine& o) const {
    Affine m;
    m.a = a * o.a + b * o.c;
    m.b = a * o.b + b * o.d;
    m.tx = a * o.tx + b * o.ty + tx;
    m.c = c * o.a + d * o.c;
    m.d = c * o.b + d * o.d;
    m.ty = c * o.tx + d * o.ty + ty;
    return m;
}

Affine Affine::inverse() const {
    const double det = a * d - b * c;
    if (det == 0.0) throw ValidationError("affine map is singular");
    Affine m;
    m.a = d / det;
    m.b = -b / det;
    m.c = -c / det;
    m.d = a / det;
    m.tx = -(m.a * tx + m.b * ty);
    m.ty = -(m.c * tx + m.d * ty);
    return m;
}

void Affine::apply(double x, double y, double* out_x, double* out_y) const {
    *out_x = a * x + b * y + tx;
    *out_y = c * x + d * y + ty;
}

Affine about_center(const Affine& m, int rows, int cols) {
    const double cx = (cols - 1) / 2.0;
    const double cy = (rows - 1) / 2.0;
    return Affine::translation(cx, cy).compose(m).compose(Affine::translation(-cx, -cy));
}

Image warp_affine(const Image& src, const Affine& forward, int out_rows, int out_cols,
                  Sampling sampling, double fill_value) {
    const Affine inv = forward.inverse();
    Image out(out_rows, out_cols);
    for (int r = 0; r < out_rows; ++r) {
        for (int c = 0; c < out_cols; ++c) {
            double sx, sy;
            inv.apply(static_cast<double>(c), static_cast<double>(r), &sx, &sy);
            out.at(r, c) = sampling == Sampling::bilinear ? sample_bilinear(src, sx, sy, fill_value)
                                                          : sample_nearest(src, sx, sy, fill_value);
        }
    }
    return out;
}

Image resize_image(const Image& src, int out_rows, int out_cols, Sampling sampling) {
    if (out_rows <= 0 || out_cols <= 0) throw ValidationError("resize target must be positive");
    if (src.rows == out_rows && src.cols == out_cols) return src;
    Image out(out_rows, out_cols);
    const double sy = static_cast<double>(src.rows) / out_rows;
    const double sx = static_cast<double>(src.cols) / out_cols;
    for (int r = 0; r < out_rows; ++r) {
        for (int c = 0; c < out_cols; ++c) {
            // Pixel-center mapping, clamped at the borders.
            double x = (c + 0.5) * sx - 0.5;
            double y = (r + 0.5) * sy - 0.5;
            x = std::clamp(x, 0.0, static_cast<double>(src.cols - 1));
            y = std::clamp(y, 0.0, static_cast<double>(src.rows - 1));
            out.at(r, c) = sampling == Sampling::bilinear ? sample_bilinear(src, x, y, 0.0)
                                                          : sample_nearest(src, x, y, 0.0);
        }
    }
    return out;
}

BScan resize(const BScan& img, int out_rows, int out_cols) {
    BScan out = img;
    out.pixels = resize_image(img.pixels, out_rows, out_cols, Sampling::bilinear);
    clip_in_place(out.pixels);
    return out;
}

ShadowMask resize(const ShadowMask& mask, int out_rows, int out_cols) {
    ShadowMask out = mask;
    if (mask.kind == MaskKind::ground_truth_binary) {
        out.values = resize_image(mask.values, out_rows, out_cols, Sampling::nearest);
        binarize_in_place(out.values);
    } else {
        out.values = resize_image(mask.values, out_rows, out_cols, Sampling::bilinear);
        clip_in_place(out.values);
    }
    return out;
}

void binarize_in_place(Image& img, double threshold) {
    for (double& v : img.data) v = v > threshold ? 1.0 : 0.0;
}

}  // namespace deshadow

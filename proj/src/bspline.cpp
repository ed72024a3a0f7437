#include "stainbench/bspline.hpp"

#include <cmath>
#include <stdexcept>

#include "stainbench/warp.hpp"

namespace stainbench {

DeformationGrid DeformationGrid::zero(int domain_w, int domain_h, double spacing) {
    if (domain_w <= 0 || domain_h <= 0 || spacing <= 0.0) {
        throw std::invalid_argument("deformation grid needs a positive domain and spacing");
    }
    DeformationGrid g;
    g.spacing = spacing;
    g.domain_w = domain_w;
    g.domain_h = domain_h;
    g.nx = static_cast<int>(std::ceil(domain_w / spacing)) + 3;
    g.ny = static_cast<int>(std::ceil(domain_h / spacing)) + 3;
    g.dx.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
    g.dy.assign(static_cast<std::size_t>(g.nx) * g.ny, 0.0);
    return g;
}

std::array<double, 2> DeformationGrid::displacement(double x, double y) const {
    const double u = x / spacing;
    const double v = y / spacing;
    int ix = static_cast<int>(std::floor(u));
    int iy = static_cast<int>(std::floor(v));
    double tx = u - ix;
    double ty = v - iy;
    if (ix < 0) { ix = 0; tx = 0.0; }
    if (iy < 0) { iy = 0; ty = 0.0; }
    if (ix > nx - 4) { ix = nx - 4; tx = 1.0; }
    if (iy > ny - 4) { iy = ny - 4; ty = 1.0; }
    const auto wx = bspline_weights(tx);
    const auto wy = bspline_weights(ty);
    double out_x = 0.0, out_y = 0.0;
    for (int b = 0; b < 4; ++b) {
        const std::size_t row = static_cast<std::size_t>(iy + b) * nx + ix;
        double row_x = 0.0, row_y = 0.0;
        for (int a = 0; a < 4; ++a) {
            row_x += wx[a] * dx[row + a];
            row_y += wx[a] * dy[row + a];
        }
        out_x += wy[b] * row_x;
        out_y += wy[b] * row_y;
    }
    return {out_x, out_y};
}

double DeformationGrid::mean_displacement_magnitude() const {
    double sum = 0.0;
    for (int y = 0; y < domain_h; ++y) {
        for (int x = 0; x < domain_w; ++x) {
            const auto d = displacement(x, y);
            sum += std::hypot(d[0], d[1]);
        }
    }
    return sum / (static_cast<double>(domain_w) * domain_h);
}

ImageBuffer apply_deformation(const ImageBuffer& img, const DeformationGrid& g) {
    if (img.width != g.domain_w || img.height != g.domain_h) {
        throw std::invalid_argument("image dimensions do not match the grid domain");
    }
    ImageBuffer out = img.kind == PixelKind::U8
                          ? ImageBuffer::u8(img.width, img.height, img.channels)
                          : ImageBuffer::real(img.width, img.height, img.channels);
    out.space = img.space;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const auto d = g.displacement(x, y);
            const double sx = x + d[0];
            const double sy = y + d[1];
            const bool inside = sx >= 0.0 && sy >= 0.0 && sx <= img.width - 1 &&
                                sy <= img.height - 1;
            for (int c = 0; c < img.channels; ++c) {
                const double v = inside ? sample_bilinear255(img, sx, sy, c) : 0.0;
                if (out.kind == PixelKind::U8) {
                    out.at8(x, y, c) = quantize255(v);
                } else {
                    out.atr(x, y, c) = v / 255.0;
                }
            }
        }
    }
    return out;
}

}  // namespace stainbench

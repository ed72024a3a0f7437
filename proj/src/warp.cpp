#include "stainbench/warp.hpp"

#include <cmath>
#include <stdexcept>

namespace stainbench {

// Tolerance for the inside/outside test: preimages that graze the hull of
// pixel centers by floating-point noise still count as inside.
constexpr double kEdgeEps = 1e-9;

double sample_bilinear255(const ImageBuffer& img, double x, double y, int c) {
    if (x < -kEdgeEps || y < -kEdgeEps || x > img.width - 1 + kEdgeEps ||
        y > img.height - 1 + kEdgeEps) {
        return 0.0;
    }
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    if (x0 > img.width - 2) x0 = img.width - 2;
    if (y0 > img.height - 2) y0 = img.height - 2;
    if (x0 < 0) x0 = 0;
    if (y0 < 0) y0 = 0;
    const int x1 = img.width > 1 ? x0 + 1 : x0;
    const int y1 = img.height > 1 ? y0 + 1 : y0;
    const double fx = x - x0;
    const double fy = y - y0;
    const double v00 = img.value255(x0, y0, c);
    const double v10 = img.value255(x1, y0, c);
    const double v01 = img.value255(x0, y1, c);
    const double v11 = img.value255(x1, y1, c);
    const double top = v00 + fx * (v10 - v00);
    const double bot = v01 + fx * (v11 - v01);
    return top + fy * (bot - top);
}

ImageBuffer warp_projective(const ImageBuffer& img, const Homography& h,
                            int out_width, int out_height) {
    if (!h.invertible()) {
        throw std::invalid_argument("homography is not invertible");
    }
    const Homography hi = h.inverse();
    ImageBuffer out = img.kind == PixelKind::U8
                          ? ImageBuffer::u8(out_width, out_height, img.channels)
                          : ImageBuffer::real(out_width, out_height, img.channels);
    out.space = img.space;
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const auto src = hi.apply(x, y);
            const bool inside = src[0] >= 0.0 && src[1] >= 0.0 &&
                                src[0] <= img.width - 1 && src[1] <= img.height - 1;
            for (int c = 0; c < img.channels; ++c) {
                const double v =
                    inside ? sample_bilinear255(img, src[0], src[1], c) : 0.0;
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

ImageBuffer render_overlay(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("overlay inputs must have identical dimensions");
    }
    ImageBuffer out = a.kind == PixelKind::U8
                          ? ImageBuffer::u8(a.width, a.height, a.channels)
                          : ImageBuffer::real(a.width, a.height, a.channels);
    out.space = a.space;
    const std::size_t n = a.sample_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double v = (a.value255(i) + b.value255(i)) / 2.0;
        if (out.kind == PixelKind::U8) {
            out.bytes[i] = quantize255(v);
        } else {
            out.reals[i] = v / 255.0;
        }
    }
    return out;
}

}  // namespace stainbench

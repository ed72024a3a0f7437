#pragma once

#include <optional>
#include <vector>

#include "stainbench/image.hpp"

namespace stainbench {

/// Single-channel float raster used by the registration internals.
struct FloatImage {
    int width = 0;
    int height = 0;
    std::vector<float> v;

    static FloatImage zeros(int width, int height) {
        FloatImage f;
        f.width = width;
        f.height = height;
        f.v.assign(static_cast<std::size_t>(width) * height, 0.0f);
        return f;
    }
    float at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
    float& at(int x, int y) { return v[static_cast<std::size_t>(y) * width + x]; }
};

/// Registration preprocessing: Rec. 601 luminance, intensity inversion
/// (255 - L), Gaussian smoothing.
FloatImage ncc_preprocess(const ImageBuffer& img, double sigma = 2.0);

/// Separable Gaussian blur with clamp-to-edge boundaries.
FloatImage gaussian_blur(const FloatImage& img, double sigma);

/// 2x2 box downsample; odd trailing row/column averages the available pixels.
FloatImage downsample2(const FloatImage& img);

/// Pearson correlation of two equally-sized rasters; nullopt when either
/// side has zero variance.
std::optional<double> ncc(const FloatImage& a, const FloatImage& b);

}  // namespace stainbench

#include "stainbench/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stainbench {

FloatImage gaussian_blur(const FloatImage& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<float> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        kernel[i + radius] = static_cast<float>(w);
        sum += w;
    }
    for (auto& k : kernel) k = static_cast<float>(k / sum);

    const int w = img.width, h = img.height;
    FloatImage tmp = FloatImage::zeros(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i) {
                const int xx = std::clamp(x + i, 0, w - 1);
                acc += kernel[i + radius] * img.at(xx, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    FloatImage out = FloatImage::zeros(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i) {
                const int yy = std::clamp(y + i, 0, h - 1);
                acc += kernel[i + radius] * tmp.at(x, yy);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

FloatImage ncc_preprocess(const ImageBuffer& img, double sigma) {
    const auto lum = luminance255(img);
    FloatImage f = FloatImage::zeros(img.width, img.height);
    for (std::size_t i = 0; i < lum.size(); ++i) {
        f.v[i] = static_cast<float>(255.0 - lum[i]);
    }
    return gaussian_blur(f, sigma);
}

FloatImage downsample2(const FloatImage& img) {
    const int w = (img.width + 1) / 2;
    const int h = (img.height + 1) / 2;
    FloatImage out = FloatImage::zeros(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            int n = 0;
            for (int dy = 0; dy < 2; ++dy) {
                for (int dx = 0; dx < 2; ++dx) {
                    const int sx = 2 * x + dx;
                    const int sy = 2 * y + dy;
                    if (sx < img.width && sy < img.height) {
                        acc += img.at(sx, sy);
                        ++n;
                    }
                }
            }
            out.at(x, y) = static_cast<float>(acc / n);
        }
    }
    return out;
}

std::optional<double> ncc(const FloatImage& a, const FloatImage& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("ncc inputs must have identical dimensions");
    }
    const std::size_t n = a.v.size();
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += a.v[i];
        sb += b.v[i];
    }
    const double ma = sa / n, mb = sb / n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.v[i] - ma;
        const double db = b.v[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::nullopt;
    return sab / std::sqrt(saa * sbb);
}

}  // namespace stainbench

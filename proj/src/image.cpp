#include "stainbench/image.hpp"

#include <cmath>
#include <stdexcept>

namespace stainbench {

namespace {

void check_shape(int width, int height, int channels) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("image dimensions must be positive");
    }
    if (channels != 1 && channels != 3) {
        throw std::invalid_argument("channels must be 1 or 3");
    }
}

}  // namespace

ImageBuffer ImageBuffer::u8(int width, int height, int channels) {
    check_shape(width, height, channels);
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.kind = PixelKind::U8;
    img.space = channels == 3 ? Colorspace::SRGB : Colorspace::Gray;
    img.bytes.assign(img.sample_count(), 0);
    return img;
}

ImageBuffer ImageBuffer::real(int width, int height, int channels) {
    check_shape(width, height, channels);
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.channels = channels;
    img.kind = PixelKind::Real;
    img.space = channels == 3 ? Colorspace::SRGB : Colorspace::Gray;
    img.reals.assign(img.sample_count(), 0.0);
    return img;
}

bool ImageBuffer::pixel_is_black(int x, int y) const {
    for (int c = 0; c < channels; ++c) {
        if (kind == PixelKind::U8) {
            if (bytes[index(x, y, c)] != 0) return false;
        } else {
            if (reals[index(x, y, c)] != 0.0) return false;
        }
    }
    return true;
}

std::uint8_t quantize255(double v) {
    double r = std::floor(v + 0.5);
    if (r < 0.0) r = 0.0;
    if (r > 255.0) r = 255.0;
    return static_cast<std::uint8_t>(r);
}

ImageBuffer ImageBuffer::to_real() const {
    if (kind == PixelKind::Real) return *this;
    ImageBuffer out = ImageBuffer::real(width, height, channels);
    out.space = space;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        out.reals[i] = bytes[i] / 255.0;
    }
    return out;
}

ImageBuffer ImageBuffer::to_u8() const {
    if (kind == PixelKind::U8) return *this;
    ImageBuffer out = ImageBuffer::u8(width, height, channels);
    out.space = space;
    for (std::size_t i = 0; i < reals.size(); ++i) {
        out.bytes[i] = quantize255(reals[i] * 255.0);
    }
    return out;
}

std::vector<double> luminance255(const ImageBuffer& img) {
    std::vector<double> lum(static_cast<std::size_t>(img.width) * img.height);
    const std::size_t n = lum.size();
    if (img.channels == 1) {
        for (std::size_t i = 0; i < n; ++i) lum[i] = img.value255(i);
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t b = i * 3;
            lum[i] = 0.299 * img.value255(b) + 0.587 * img.value255(b + 1) +
                     0.114 * img.value255(b + 2);
        }
    }
    return lum;
}

bool images_equal(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b) || a.kind != b.kind) return false;
    return a.kind == PixelKind::U8 ? a.bytes == b.bytes : a.reals == b.reals;
}

}  // namespace stainbench

#pragma once

#include <cstdint>
#include <vector>

namespace stainbench {

enum class PixelKind { U8, Real };
enum class Colorspace { SRGB, Gray };

/// Row-major, channel-interleaved raster with 1 or 3 channels.
/// Samples are either 8-bit values in [0,255] or reals in [0,1]; the two
/// representations interconvert via x/255 and round(x*255).
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 1;
    PixelKind kind = PixelKind::U8;
    Colorspace space = Colorspace::Gray;
    std::vector<std::uint8_t> bytes;
    std::vector<double> reals;

    static ImageBuffer u8(int width, int height, int channels);
    static ImageBuffer real(int width, int height, int channels);

    std::size_t sample_count() const {
        return static_cast<std::size_t>(width) * height * channels;
    }
    bool same_shape(const ImageBuffer& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }

    std::uint8_t& at8(int x, int y, int c = 0) { return bytes[index(x, y, c)]; }
    std::uint8_t at8(int x, int y, int c = 0) const { return bytes[index(x, y, c)]; }
    double& atr(int x, int y, int c = 0) { return reals[index(x, y, c)]; }
    double atr(int x, int y, int c = 0) const { return reals[index(x, y, c)]; }

    /// Sample on the [0,255] scale regardless of storage kind.
    double value255(std::size_t i) const {
        return kind == PixelKind::U8 ? static_cast<double>(bytes[i]) : reals[i] * 255.0;
    }
    double value255(int x, int y, int c = 0) const { return value255(index(x, y, c)); }

    bool pixel_is_black(int x, int y) const;

    ImageBuffer to_real() const;
    ImageBuffer to_u8() const;
};

/// round-half-up to the nearest 8-bit value, clamped
std::uint8_t quantize255(double v);

/// Rec. 601 luminance on the [0,255] scale; single-channel images pass through.
std::vector<double> luminance255(const ImageBuffer& img);

bool images_equal(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace stainbench

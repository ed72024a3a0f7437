#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stainbench/image.hpp"

namespace stainbench {

/// Raw tensor container, magic "TSR1".
/// Layout: magic (4 bytes) | ndim u32 LE | dims[ndim] u32 LE | payload f32 LE
/// row-major. ndim must lie in [1,4] and the payload length must equal the
/// product of dims.
struct Tensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t count() const;
    std::vector<double> as_doubles() const;
    static Tensor from_doubles(std::vector<std::uint32_t> dims,
                               const std::vector<double>& values);
};

void write_tensor(const Tensor& t, const std::string& path);
Tensor read_tensor(const std::string& path);

/// Loads a PNG (8-bit, gray or RGB) or a tiled raster (.wsr) file; the format
/// is sniffed from the leading magic bytes, not the extension.
ImageBuffer load_image(const std::string& path);

/// Writes by extension: ".png" or ".wsr". Real-valued buffers are quantized.
void save_image(const ImageBuffer& img, const std::string& path);

void save_png(const ImageBuffer& img, const std::string& path);
ImageBuffer load_png(const std::string& path);

/// Tiled raster container, magic "WSR1".
/// Layout: magic | width u32 | height u32 | channels u32 | tile u32 |
/// tiles in row-major tile-grid order, each tile's samples row-major
/// (edge tiles are truncated to the image bounds).
void save_wsr(const ImageBuffer& img, const std::string& path, int tile = 256);
ImageBuffer load_wsr(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace stainbench

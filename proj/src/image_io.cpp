#include <png.h>

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "stainbench/io.hpp"

namespace stainbench {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& msg, const std::string& path) {
    throw std::runtime_error(msg + ": " + path);
}

constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
constexpr char kWsrMagic[4] = {'W', 'S', 'R', '1'};

void put_u32le(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32le(std::istream& is, const std::string& path) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) fail("truncated raster file", path);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

ImageBuffer load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("cannot open", path);

    unsigned char header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8)) {
        fail("not a PNG file", path);
    }

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("corrupt PNG stream", path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);

    if (depth != 8) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("unsupported bit depth", path);
    }
    int channels = 0;
    if (color == PNG_COLOR_TYPE_GRAY) channels = 1;
    else if (color == PNG_COLOR_TYPE_RGB) channels = 3;
    if (channels == 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("unsupported channel count", path);
    }

    ImageBuffer img = ImageBuffer::u8(static_cast<int>(w), static_cast<int>(h), channels);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) {
        rows[y] = img.bytes.data() + static_cast<std::size_t>(y) * w * channels;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const ImageBuffer& img, const std::string& path) {
    const ImageBuffer u8 = img.kind == PixelKind::U8 ? img : img.to_u8();
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("cannot open for writing", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail("PNG write failed", path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, u8.width, u8.height, 8,
                 u8.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(u8.height);
    for (int y = 0; y < u8.height; ++y) {
        rows[y] = const_cast<png_bytep>(u8.bytes.data()) +
                  static_cast<std::size_t>(y) * u8.width * u8.channels;
    }
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void save_wsr(const ImageBuffer& img, const std::string& path, int tile) {
    if (tile <= 0) throw std::invalid_argument("tile size must be positive");
    const ImageBuffer u8 = img.kind == PixelKind::U8 ? img : img.to_u8();
    std::ofstream os(path, std::ios::binary);
    if (!os) fail("cannot open for writing", path);
    os.write(kWsrMagic, 4);
    put_u32le(os, static_cast<std::uint32_t>(u8.width));
    put_u32le(os, static_cast<std::uint32_t>(u8.height));
    put_u32le(os, static_cast<std::uint32_t>(u8.channels));
    put_u32le(os, static_cast<std::uint32_t>(tile));
    for (int ty = 0; ty < u8.height; ty += tile) {
        for (int tx = 0; tx < u8.width; tx += tile) {
            const int th = std::min(tile, u8.height - ty);
            const int tw = std::min(tile, u8.width - tx);
            for (int y = 0; y < th; ++y) {
                const char* row = reinterpret_cast<const char*>(
                    u8.bytes.data() + u8.index(tx, ty + y, 0));
                os.write(row, static_cast<std::streamsize>(tw) * u8.channels);
            }
        }
    }
    if (!os) fail("write failed", path);
}

ImageBuffer load_wsr(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail("cannot open", path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kWsrMagic, 4) != 0) fail("bad raster magic", path);
    const std::uint32_t w = get_u32le(is, path);
    const std::uint32_t h = get_u32le(is, path);
    const std::uint32_t channels = get_u32le(is, path);
    const std::uint32_t tile = get_u32le(is, path);
    if (w == 0 || h == 0 || (channels != 1 && channels != 3) || tile == 0) {
        fail("invalid raster header", path);
    }
    if (static_cast<std::uint64_t>(w) * h * channels > (1ull << 33)) {
        fail("raster too large", path);
    }
    ImageBuffer img = ImageBuffer::u8(static_cast<int>(w), static_cast<int>(h),
                                      static_cast<int>(channels));
    for (std::uint32_t ty = 0; ty < h; ty += tile) {
        for (std::uint32_t tx = 0; tx < w; tx += tile) {
            const std::uint32_t th = std::min(tile, h - ty);
            const std::uint32_t tw = std::min(tile, w - tx);
            for (std::uint32_t y = 0; y < th; ++y) {
                char* row = reinterpret_cast<char*>(img.bytes.data() +
                                                    img.index(tx, ty + y, 0));
                is.read(row, static_cast<std::streamsize>(tw) * channels);
                if (!is) fail("truncated raster file", path);
            }
        }
    }
    return img;
}

ImageBuffer load_image(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail("cannot open", path);
    unsigned char head[8] = {};
    probe.read(reinterpret_cast<char*>(head), 8);
    probe.close();
    if (std::memcmp(head, kPngSig, 8) == 0) return load_png(path);
    if (std::memcmp(head, kWsrMagic, 4) == 0) return load_wsr(path);
    fail("unrecognized image format", path);
}

void save_image(const ImageBuffer& img, const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".wsr") == 0) {
        save_wsr(img, path);
    } else {
        save_png(img, path);
    }
}

}  // namespace stainbench

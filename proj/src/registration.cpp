#include "stainbench/registration.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>
#include <stdexcept>

#include "stainbench/parallel.hpp"

namespace stainbench {

std::vector<TileRect> tile_layout(int width, int height) {
    constexpr int kRows = 4, kCols = 4;
    if (width < kCols || height < kRows) {
        throw std::invalid_argument("image too small for a 4x4 tile layout");
    }
    std::vector<TileRect> tiles;
    tiles.reserve(kRows * kCols);
    for (int r = 0; r < kRows; ++r) {
        const int y0 = static_cast<int>(static_cast<std::int64_t>(r) * height / kRows);
        const int y1 = static_cast<int>(static_cast<std::int64_t>(r + 1) * height / kRows);
        for (int c = 0; c < kCols; ++c) {
            const int x0 = static_cast<int>(static_cast<std::int64_t>(c) * width / kCols);
            const int x1 = static_cast<int>(static_cast<std::int64_t>(c + 1) * width / kCols);
            tiles.push_back({x0, y0, x1 - x0, y1 - y0});
        }
    }
    return tiles;
}

ImageBuffer crop(const ImageBuffer& img, const TileRect& rect) {
    if (rect.x < 0 || rect.y < 0 || rect.w <= 0 || rect.h <= 0 ||
        rect.x + rect.w > img.width || rect.y + rect.h > img.height) {
        throw std::invalid_argument("crop rectangle outside the image");
    }
    ImageBuffer out = img.kind == PixelKind::U8
                          ? ImageBuffer::u8(rect.w, rect.h, img.channels)
                          : ImageBuffer::real(rect.w, rect.h, img.channels);
    out.space = img.space;
    const std::size_t row_bytes = static_cast<std::size_t>(rect.w) * img.channels;
    for (int y = 0; y < rect.h; ++y) {
        const std::size_t src = img.index(rect.x, rect.y + y, 0);
        const std::size_t dst = out.index(0, y, 0);
        if (img.kind == PixelKind::U8) {
            std::copy_n(img.bytes.begin() + src, row_bytes, out.bytes.begin() + dst);
        } else {
            std::copy_n(img.reals.begin() + src, row_bytes, out.reals.begin() + dst);
        }
    }
    return out;
}

void paste(ImageBuffer& dst, const ImageBuffer& tile, const TileRect& rect) {
    if (tile.width != rect.w || tile.height != rect.h || tile.channels != dst.channels ||
        tile.kind != dst.kind) {
        throw std::invalid_argument("tile does not match the paste rectangle");
    }
    const std::size_t row_bytes = static_cast<std::size_t>(rect.w) * dst.channels;
    for (int y = 0; y < rect.h; ++y) {
        const std::size_t src = tile.index(0, y, 0);
        const std::size_t di = dst.index(rect.x, rect.y + y, 0);
        if (dst.kind == PixelKind::U8) {
            std::copy_n(tile.bytes.begin() + src, row_bytes, dst.bytes.begin() + di);
        } else {
            std::copy_n(tile.reals.begin() + src, row_bytes, dst.reals.begin() + di);
        }
    }
}

std::vector<ImageBuffer> split_tiles(const ImageBuffer& img,
                                     const std::vector<TileRect>& layout) {
    std::vector<ImageBuffer> tiles;
    tiles.reserve(layout.size());
    for (const auto& rect : layout) tiles.push_back(crop(img, rect));
    return tiles;
}

ImageBuffer stitch_tiles(const std::vector<ImageBuffer>& tiles,
                         const std::vector<TileRect>& layout, int width, int height) {
    if (tiles.size() != layout.size() || tiles.empty()) {
        throw std::invalid_argument("tile list does not match the layout");
    }
    ImageBuffer out = tiles[0].kind == PixelKind::U8
                          ? ImageBuffer::u8(width, height, tiles[0].channels)
                          : ImageBuffer::real(width, height, tiles[0].channels);
    out.space = tiles[0].space;
    for (std::size_t i = 0; i < tiles.size(); ++i) paste(out, tiles[i], layout[i]);
    return out;
}

namespace {

// 4-connected flood of exactly-black pixels reachable from the border.
std::vector<std::uint8_t> border_black_mask(const ImageBuffer& img) {
    const int w = img.width, h = img.height;
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * h, 0);
    std::deque<std::pair<int, int>> queue;
    auto try_push = [&](int x, int y) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        if (!mask[i] && img.pixel_is_black(x, y)) {
            mask[i] = 1;
            queue.emplace_back(x, y);
        }
    };
    for (int x = 0; x < w; ++x) {
        try_push(x, 0);
        try_push(x, h - 1);
    }
    for (int y = 0; y < h; ++y) {
        try_push(0, y);
        try_push(w - 1, y);
    }
    while (!queue.empty()) {
        const auto [x, y] = queue.front();
        queue.pop_front();
        if (x > 0) try_push(x - 1, y);
        if (x < w - 1) try_push(x + 1, y);
        if (y > 0) try_push(x, y - 1);
        if (y < h - 1) try_push(x, y + 1);
    }
    return mask;
}

}  // namespace

std::size_t count_border_black(const ImageBuffer& img) {
    const auto mask = border_black_mask(img);
    std::size_t n = 0;
    for (auto m : mask) n += m;
    return n;
}

ImageBuffer refine_borders(const ImageBuffer& img) {
    const int w = img.width, h = img.height;
    bool any_content = false;
    for (int y = 0; y < h && !any_content; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!img.pixel_is_black(x, y)) {
                any_content = true;
                break;
            }
        }
    }
    if (!any_content) throw std::invalid_argument("entirely black image");

    ImageBuffer out = img;
    // 0 = valid, 1 = masked; fills become valid only at the end of a pass
    std::vector<std::uint8_t> state = border_black_mask(img);
    std::vector<std::size_t> masked;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state[i]) masked.push_back(i);
    }

    std::vector<double> acc(img.channels);
    while (!masked.empty()) {
        std::vector<std::size_t> filled, remaining;
        for (const std::size_t i : masked) {
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            std::fill(acc.begin(), acc.end(), 0.0);
            int valid = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int nx = x + dx, ny = y + dy;
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                    if (state[ni] != 0) continue;
                    ++valid;
                    for (int c = 0; c < img.channels; ++c) {
                        acc[c] += out.value255(nx, ny, c);
                    }
                }
            }
            if (valid == 0) {
                remaining.push_back(i);
                continue;
            }
            for (int c = 0; c < img.channels; ++c) {
                const double v = acc[c] / valid;
                if (out.kind == PixelKind::U8) {
                    out.bytes[i * img.channels + c] = quantize255(v);
                } else {
                    out.reals[i * img.channels + c] = v / 255.0;
                }
            }
            filled.push_back(i);
        }
        for (const std::size_t i : filled) state[i] = 0;
        masked.swap(remaining);
    }
    return out;
}

json_io::json RegistrationReport::to_json() const {
    json_io::json arr = json_io::json::array();
    for (const auto& t : tiles) {
        arr.push_back({{"rect", {t.rect.x, t.rect.y, t.rect.w, t.rect.h}},
                       {"ncc_initial", json_io::number(t.ncc_initial)},
                       {"ncc_final", json_io::number(t.ncc_final)},
                       {"mean_disp", json_io::number(t.mean_disp)}});
    }
    return json_io::json{{"tiles", arr}};
}

RegistrationResult register_wsi_pair(const ImageBuffer& he_moving,
                                     const ImageBuffer& ihc_fixed,
                                     const LandmarkSet& landmarks,
                                     const RegistrationConfig& cfg) {
    for (const auto& p : landmarks.pairs) {
        if (p.moving_x < 0 || p.moving_y < 0 || p.moving_x > he_moving.width - 1 ||
            p.moving_y > he_moving.height - 1 || p.fixed_x < 0 || p.fixed_y < 0 ||
            p.fixed_x > ihc_fixed.width - 1 || p.fixed_y > ihc_fixed.height - 1) {
            throw std::invalid_argument("landmark outside image bounds");
        }
    }

    RegistrationResult result;
    result.homography = estimate_homography(landmarks);
    const ImageBuffer warped =
        warp_projective(he_moving, result.homography, ihc_fixed.width, ihc_fixed.height);

    result.layout = tile_layout(ihc_fixed.width, ihc_fixed.height);
    const std::size_t n_tiles = result.layout.size();
    std::vector<ImageBuffer> registered(n_tiles);
    result.tile_grids.resize(n_tiles);
    result.report.tiles.resize(n_tiles);

    std::exception_ptr failure;
    std::mutex failure_mutex;
    parallel_for(n_tiles, cfg.threads, [&](std::size_t i) {
        try {
            const TileRect rect = result.layout[i];
            const ImageBuffer moving_tile = crop(warped, rect);
            const ImageBuffer fixed_tile = crop(ihc_fixed, rect);
            DeformableStats stats;
            DeformationGrid grid =
                register_deformable(moving_tile, fixed_tile, cfg.deformable, &stats);
            registered[i] = apply_deformation(moving_tile, grid);
            result.tile_grids[i] = std::move(grid);
            result.report.tiles[i] = {rect, stats.ncc_initial, stats.ncc_final,
                                      stats.mean_disp};
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    const ImageBuffer stitched =
        stitch_tiles(registered, result.layout, ihc_fixed.width, ihc_fixed.height);
    result.image = refine_borders(stitched);
    return result;
}

}  // namespace stainbench

#pragma once

#include <string>
#include <vector>

#include "stainbench/deformable.hpp"
#include "stainbench/homography.hpp"
#include "stainbench/image.hpp"
#include "stainbench/json_io.hpp"
#include "stainbench/types.hpp"
#include "stainbench/warp.hpp"

namespace stainbench {

struct TileRect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

/// 4x4 partition covering the full image with disjoint interiors.
std::vector<TileRect> tile_layout(int width, int height);

ImageBuffer crop(const ImageBuffer& img, const TileRect& rect);
void paste(ImageBuffer& dst, const ImageBuffer& tile, const TileRect& rect);
std::vector<ImageBuffer> split_tiles(const ImageBuffer& img,
                                     const std::vector<TileRect>& layout);
ImageBuffer stitch_tiles(const std::vector<ImageBuffer>& tiles,
                         const std::vector<TileRect>& layout, int width, int height);

/// Fills every exactly-black pixel that is 4-connected to the image border
/// (through black pixels) by repeated passes of 8-neighbor averaging over
/// already-valid pixels. Interior content is untouched.
ImageBuffer refine_borders(const ImageBuffer& img);

/// Count of exactly-black pixels 4-connected to the border; 0 after refinement.
std::size_t count_border_black(const ImageBuffer& img);

struct TileReport {
    TileRect rect;
    double ncc_initial = 0.0;
    double ncc_final = 0.0;
    double mean_disp = 0.0;
};

struct RegistrationReport {
    std::vector<TileReport> tiles;
    json_io::json to_json() const;
};

struct RegistrationConfig {
    DeformableConfig deformable;
    int threads = 1;
};

struct RegistrationResult {
    ImageBuffer image;
    RegistrationReport report;
    Homography homography;
    std::vector<TileRect> layout;
    std::vector<DeformationGrid> tile_grids;
};

/// Full two-stage alignment: projective fit from landmarks, per-tile
/// deformable refinement on the 4x4 layout, stitch, border refinement.
RegistrationResult register_wsi_pair(const ImageBuffer& he_moving,
                                     const ImageBuffer& ihc_fixed,
                                     const LandmarkSet& landmarks,
                                     const RegistrationConfig& cfg);

}  // namespace stainbench

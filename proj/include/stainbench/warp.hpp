#pragma once

#include "stainbench/homography.hpp"
#include "stainbench/image.hpp"

namespace stainbench {

/// Inverse-mapped projective warp with bilinear interpolation. Output pixels
/// whose preimage falls outside [0,W-1]x[0,H-1] are exactly 0.
ImageBuffer warp_projective(const ImageBuffer& img, const Homography& h,
                            int out_width, int out_height);

/// 50/50 alpha blend for visual inspection; round-half-up for 8-bit inputs.
ImageBuffer render_overlay(const ImageBuffer& a, const ImageBuffer& b);

/// Bilinear sample of one channel on the [0,255] scale; 0 outside the
/// pixel-center hull.
double sample_bilinear255(const ImageBuffer& img, double x, double y, int c);

}  // namespace stainbench

#pragma once

#include <array>

#include "stainbench/types.hpp"

namespace stainbench {

/// 3x3 projective transform, row-major, normalized so h[8] == 1.
/// Maps moving-image coordinates to fixed-image coordinates.
struct Homography {
    std::array<double, 9> h{1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Homography identity() { return {}; }

    std::array<double, 2> apply(double x, double y) const;
    Homography inverse() const;
    double det() const;
    bool invertible() const;
};

/// Normalized direct linear transform fit of moving -> fixed from >= 4
/// correspondences. Least squares in the algebraic error for > 4 points.
/// Throws on fewer than 4 pairs or a degenerate configuration.
Homography estimate_homography(const LandmarkSet& landmarks);

}  // namespace stainbench

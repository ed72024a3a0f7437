#pragma once

#include <array>
#include <vector>

#include "stainbench/image.hpp"

namespace stainbench {

/// Cubic B-spline free-form deformation. Control point (i,j) sits at lattice
/// position ((i-1)*spacing, (j-1)*spacing), so a domain of width w needs
/// ceil(w/spacing)+3 control points for full cubic support.
struct DeformationGrid {
    double spacing = 64.0;
    int nx = 0;
    int ny = 0;
    int domain_w = 0;
    int domain_h = 0;
    std::vector<double> dx;  // nx*ny, row-major
    std::vector<double> dy;

    static DeformationGrid zero(int domain_w, int domain_h, double spacing);

    /// Tensor-product cubic B-spline interpolation of the control
    /// displacements at pixel position (x, y).
    std::array<double, 2> displacement(double x, double y) const;

    double mean_displacement_magnitude() const;
};

/// Cubic B-spline basis values for fractional offset t in [0,1).
inline std::array<double, 4> bspline_weights(double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return {(1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0,
            (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0,
            (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0,
            t3 / 6.0};
}

/// Inverse-mapped warp: out(x) = img(x + d(x)), bilinear, fill 0 outside.
ImageBuffer apply_deformation(const ImageBuffer& img, const DeformationGrid& g);

}  // namespace stainbench

#pragma once

#include <cstdint>

#include "stainbench/bspline.hpp"
#include "stainbench/image.hpp"

namespace stainbench {

struct DeformableConfig {
    double spacing = 64.0;
    int pyramid_levels = 3;
    int iterations = 200;
    double step = 0.5;
    std::uint64_t seed = 0;  // reserved; the optimizer has no stochastic element
};

struct DeformableStats {
    double ncc_initial = 0.0;
    double ncc_final = 0.0;
    double mean_disp = 0.0;
};

/// Estimates a B-spline displacement field aligning `moving` onto `fixed` by
/// gradient descent on the negative normalized cross-correlation of the
/// preprocessed images (inverted luminance, Gaussian sigma=2), coarse to fine
/// over a box pyramid. Steps are max-norm normalized and halved whenever a
/// proposal would increase the objective, so accepted iterations are
/// monotone. The analytic gradient chains the NCC derivative through the
/// bilinear sampler and the spline weights.
DeformationGrid register_deformable(const ImageBuffer& moving,
                                    const ImageBuffer& fixed,
                                    const DeformableConfig& cfg,
                                    DeformableStats* stats = nullptr);

/// Negative preprocessed-NCC objective for a given grid, with the optional
/// analytic gradient with respect to the control displacements.
double deformable_objective(const ImageBuffer& moving, const ImageBuffer& fixed,
                            const DeformationGrid& grid,
                            std::vector<double>* grad_x = nullptr,
                            std::vector<double>* grad_y = nullptr);

}  // namespace stainbench

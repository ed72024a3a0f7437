#include "stainbench/deformable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stainbench/preprocess.hpp"

namespace stainbench {

namespace {

struct SplineAxis {
    std::vector<int> idx;         // first of the 4 support control points
    std::vector<double> weights;  // 4 per position
};

// Support indices and basis weights for every level pixel along one axis.
// Level pixel p sits at full-resolution coordinate f*p + (f-1)/2.
SplineAxis make_axis(int level_size, double factor, double spacing, int n_ctrl) {
    SplineAxis axis;
    axis.idx.resize(level_size);
    axis.weights.resize(static_cast<std::size_t>(level_size) * 4);
    const double off = (factor - 1.0) / 2.0;
    for (int p = 0; p < level_size; ++p) {
        const double full = factor * p + off;
        const double u = full / spacing;
        int i = static_cast<int>(std::floor(u));
        double t = u - i;
        if (i < 0) { i = 0; t = 0.0; }
        if (i > n_ctrl - 4) { i = n_ctrl - 4; t = 1.0; }
        axis.idx[p] = i;
        const auto w = bspline_weights(t);
        for (int a = 0; a < 4; ++a) axis.weights[static_cast<std::size_t>(p) * 4 + a] = w[a];
    }
    return axis;
}

struct Sums {
    double sm = 0.0;   // sum of warped samples
    double smm = 0.0;  // sum of squares
    double smf = 0.0;  // sum of products with fixed
};

// Bilinear sample over the zero-extended image, with the in-cell analytic
// gradient. Zero padding keeps the objective continuous when sample
// positions cross the image boundary (a strict inside/outside cut would put
// a jump exactly at the zero-displacement starting point).
inline void sample_with_grad(const FloatImage& img, double x, double y, double& val,
                             double& gx, double& gy) {
    if (x <= -1.0 || y <= -1.0 || x >= img.width || y >= img.height) {
        val = 0.0;
        gx = 0.0;
        gy = 0.0;
        return;
    }
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    auto tap = [&](int xx, int yy) -> double {
        if (xx < 0 || yy < 0 || xx >= img.width || yy >= img.height) return 0.0;
        return img.at(xx, yy);
    };
    const double v00 = tap(x0, y0);
    const double v10 = tap(x0 + 1, y0);
    const double v01 = tap(x0, y0 + 1);
    const double v11 = tap(x0 + 1, y0 + 1);
    const double top = v00 + fx * (v10 - v00);
    const double bot = v01 + fx * (v11 - v01);
    val = top + fy * (bot - top);
    gx = (1.0 - fy) * (v10 - v00) + fy * (v11 - v01);
    gy = bot - top;
}

class LevelProblem {
  public:
    LevelProblem(const FloatImage& moving, const FloatImage& fixed, double factor,
                 const DeformationGrid& grid)
        : moving_(moving),
          fixed_(fixed),
          factor_(factor),
          inv_factor_(1.0 / factor),
          nx_(grid.nx),
          ax_(make_axis(moving.width, factor, grid.spacing, grid.nx)),
          ay_(make_axis(moving.height, factor, grid.spacing, grid.ny)) {
        const std::size_t n = fixed_.v.size();
        double sf = 0.0;
        for (float v : fixed_.v) sf += v;
        fixed_mean_ = sf / n;
        double sff = 0.0;
        for (float v : fixed_.v) {
            const double d = v - fixed_mean_;
            sff += d * d;
        }
        fixed_var_sum_ = sff;
        warped_.assign(n, 0.0f);
        grad_x_.assign(n, 0.0f);
        grad_y_.assign(n, 0.0f);
    }

    bool usable() const { return fixed_var_sum_ > 0.0; }

    // Negative NCC of the warped moving image against the fixed image.
    double objective(const std::vector<double>& dx, const std::vector<double>& dy) {
        Sums s = warp_pass<false>(dx, dy);
        return to_objective(s);
    }

    // Objective plus the gradient with respect to the control displacements.
    double objective_grad(const std::vector<double>& dx, const std::vector<double>& dy,
                          std::vector<double>& gdx, std::vector<double>& gdy) {
        const Sums s = warp_pass<true>(dx, dy);
        std::fill(gdx.begin(), gdx.end(), 0.0);
        std::fill(gdy.begin(), gdy.end(), 0.0);

        const std::size_t n = fixed_.v.size();
        const double mean_m = s.sm / n;
        const double smm = s.smm - n * mean_m * mean_m;
        const double smf = s.smf - n * mean_m * fixed_mean_;
        if (smm <= 0.0) return 0.0;
        const double denom = std::sqrt(smm * fixed_var_sum_);
        const double ratio = smf / smm;

        const int w = moving_.width, h = moving_.height;
        for (int y = 0; y < h; ++y) {
            const int iy = ay_.idx[y];
            const double* wy = &ay_.weights[static_cast<std::size_t>(y) * 4];
            for (int x = 0; x < w; ++x) {
                const std::size_t pix = static_cast<std::size_t>(y) * w + x;
                const double m = warped_[pix] - mean_m;
                const double f = fixed_.v[pix] - fixed_mean_;
                // d(-NCC)/dM_i
                const double coef = -(f - ratio * m) / denom;
                const double cx = coef * grad_x_[pix] * inv_factor_;
                const double cy = coef * grad_y_[pix] * inv_factor_;
                if (cx == 0.0 && cy == 0.0) continue;
                const int ix = ax_.idx[x];
                const double* wx = &ax_.weights[static_cast<std::size_t>(x) * 4];
                for (int b = 0; b < 4; ++b) {
                    const std::size_t row = static_cast<std::size_t>(iy + b) * nx_ + ix;
                    const double wb = wy[b];
                    for (int a = 0; a < 4; ++a) {
                        const double wab = wb * wx[a];
                        gdx[row + a] += wab * cx;
                        gdy[row + a] += wab * cy;
                    }
                }
            }
        }
        return to_objective(s);
    }

  private:
    template <bool WithGrad>
    Sums warp_pass(const std::vector<double>& dx, const std::vector<double>& dy) {
        Sums s;
        const int w = moving_.width, h = moving_.height;
        for (int y = 0; y < h; ++y) {
            const int iy = ay_.idx[y];
            const double* wy = &ay_.weights[static_cast<std::size_t>(y) * 4];
            for (int x = 0; x < w; ++x) {
                const int ix = ax_.idx[x];
                const double* wx = &ax_.weights[static_cast<std::size_t>(x) * 4];
                double disp_x = 0.0, disp_y = 0.0;
                for (int b = 0; b < 4; ++b) {
                    const std::size_t row = static_cast<std::size_t>(iy + b) * nx_ + ix;
                    double rx = 0.0, ry = 0.0;
                    for (int a = 0; a < 4; ++a) {
                        rx += wx[a] * dx[row + a];
                        ry += wx[a] * dy[row + a];
                    }
                    disp_x += wy[b] * rx;
                    disp_y += wy[b] * ry;
                }
                const double sx = x + disp_x * inv_factor_;
                const double sy = y + disp_y * inv_factor_;
                double val, gx, gy;
                sample_with_grad(moving_, sx, sy, val, gx, gy);
                const std::size_t pix = static_cast<std::size_t>(y) * w + x;
                if constexpr (WithGrad) {
                    warped_[pix] = static_cast<float>(val);
                    grad_x_[pix] = static_cast<float>(gx);
                    grad_y_[pix] = static_cast<float>(gy);
                }
                s.sm += val;
                s.smm += val * val;
                s.smf += val * fixed_.v[pix];
            }
        }
        return s;
    }

    double to_objective(const Sums& s) const {
        const std::size_t n = fixed_.v.size();
        const double mean_m = s.sm / n;
        const double smm = s.smm - n * mean_m * mean_m;
        const double smf = s.smf - n * mean_m * fixed_mean_;
        if (smm <= 0.0) return 0.0;
        return -smf / std::sqrt(smm * fixed_var_sum_);
    }

    const FloatImage& moving_;
    const FloatImage& fixed_;
    double factor_;
    double inv_factor_;
    int nx_;
    SplineAxis ax_, ay_;
    double fixed_mean_ = 0.0;
    double fixed_var_sum_ = 0.0;
    std::vector<float> warped_, grad_x_, grad_y_;
};

void optimize_level(DeformationGrid& grid, const FloatImage& moving,
                    const FloatImage& fixed, double factor, int iterations,
                    double step0) {
    LevelProblem problem(moving, fixed, factor, grid);
    if (!problem.usable()) return;

    const std::size_t n_ctrl = grid.dx.size();
    std::vector<double> gdx(n_ctrl), gdy(n_ctrl);
    std::vector<double> trial_dx(n_ctrl), trial_dy(n_ctrl);

    double step = step0;
    double current = problem.objective(grid.dx, grid.dy);
    double window_best = current;
    int rejects_in_a_row = 0;

    for (int iter = 0; iter < iterations; ++iter) {
        problem.objective_grad(grid.dx, grid.dy, gdx, gdy);
        double gmax = 0.0;
        for (std::size_t i = 0; i < n_ctrl; ++i) {
            gmax = std::max(gmax, std::max(std::abs(gdx[i]), std::abs(gdy[i])));
        }
        if (gmax <= 0.0) break;
        const double scale = step / gmax;
        for (std::size_t i = 0; i < n_ctrl; ++i) {
            trial_dx[i] = grid.dx[i] - scale * gdx[i];
            trial_dy[i] = grid.dy[i] - scale * gdy[i];
        }
        const double proposed = problem.objective(trial_dx, trial_dy);
        if (proposed < current) {
            grid.dx.swap(trial_dx);
            grid.dy.swap(trial_dy);
            current = proposed;
            rejects_in_a_row = 0;
        } else {
            step *= 0.5;
            ++rejects_in_a_row;
            if (step < 1e-4 || rejects_in_a_row >= 25) break;
        }
        if ((iter + 1) % 20 == 0) {
            if (window_best - current < 1e-9 * std::max(1.0, std::abs(current))) break;
            window_best = current;
        }
    }
}

}  // namespace

DeformationGrid register_deformable(const ImageBuffer& moving, const ImageBuffer& fixed,
                                    const DeformableConfig& cfg, DeformableStats* stats) {
    if (!moving.same_shape(fixed)) {
        throw std::invalid_argument("moving and fixed images must have identical dimensions");
    }
    if (cfg.spacing <= 0.0 || cfg.pyramid_levels < 1 || cfg.iterations < 0 ||
        cfg.step <= 0.0) {
        throw std::invalid_argument("invalid deformable registration config");
    }

    const FloatImage pm = ncc_preprocess(moving);
    const FloatImage pf = ncc_preprocess(fixed);
    {
        double mean = 0.0;
        for (float v : pf.v) mean += v;
        mean /= pf.v.size();
        double var = 0.0;
        for (float v : pf.v) var += (v - mean) * (v - mean);
        if (var <= 0.0) throw std::invalid_argument("zero variance fixed image");
    }

    int levels = cfg.pyramid_levels;
    while (levels > 1 && (std::min(moving.width, moving.height) >> (levels - 1)) < 16) {
        --levels;
    }

    std::vector<FloatImage> pyr_m{pm}, pyr_f{pf};
    for (int k = 1; k < levels; ++k) {
        pyr_m.push_back(downsample2(pyr_m.back()));
        pyr_f.push_back(downsample2(pyr_f.back()));
    }

    DeformationGrid grid = DeformationGrid::zero(moving.width, moving.height, cfg.spacing);
    if (stats) {
        stats->ncc_initial = ncc(pm, pf).value_or(0.0);
    }

    for (int k = levels - 1; k >= 0; --k) {
        optimize_level(grid, pyr_m[k], pyr_f[k], static_cast<double>(1 << k),
                       cfg.iterations, cfg.step);
    }

    if (stats) {
        LevelProblem full(pm, pf, 1.0, grid);
        stats->ncc_final = full.usable() ? -full.objective(grid.dx, grid.dy) : 0.0;
        stats->mean_disp = grid.mean_displacement_magnitude();
    }
    return grid;
}

double deformable_objective(const ImageBuffer& moving, const ImageBuffer& fixed,
                            const DeformationGrid& grid, std::vector<double>* grad_x,
                            std::vector<double>* grad_y) {
    if (!moving.same_shape(fixed)) {
        throw std::invalid_argument("moving and fixed images must have identical dimensions");
    }
    if (moving.width != grid.domain_w || moving.height != grid.domain_h) {
        throw std::invalid_argument("grid domain does not match the images");
    }
    const FloatImage pm = ncc_preprocess(moving);
    const FloatImage pf = ncc_preprocess(fixed);
    LevelProblem problem(pm, pf, 1.0, grid);
    if (!problem.usable()) {
        throw std::invalid_argument("zero variance fixed image");
    }
    if (grad_x == nullptr || grad_y == nullptr) {
        return problem.objective(grid.dx, grid.dy);
    }
    grad_x->assign(grid.dx.size(), 0.0);
    grad_y->assign(grid.dy.size(), 0.0);
    return problem.objective_grad(grid.dx, grid.dy, *grad_x, *grad_y);
}

}  // namespace stainbench

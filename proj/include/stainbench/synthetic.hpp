#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stainbench/bspline.hpp"
#include "stainbench/homography.hpp"
#include "stainbench/image.hpp"
#include "stainbench/json_io.hpp"
#include "stainbench/rng.hpp"

namespace stainbench {

/// Analytic band-limited scalar field (sum of sinusoids squashed into (0,1)).
/// Evaluable at arbitrary real coordinates, which makes warped renderings and
/// ground-truth correspondences exact.
struct SmoothField {
    struct Component {
        double kx = 0.0;
        double ky = 0.0;
        double phase = 0.0;
        double amplitude = 0.0;
    };
    std::vector<Component> components;
    double gain = 1.0;

    double raw(double x, double y) const;
    double eval01(double x, double y) const;
};

SmoothField make_structure_field(Rng& rng, double min_wavelength, double max_wavelength,
                                 int n_components);

/// Analytic smooth displacement field with a known per-axis amplitude bound.
struct WarpField {
    std::vector<SmoothField::Component> comp_x;
    std::vector<SmoothField::Component> comp_y;

    std::array<double, 2> eval(double x, double y) const;
    double amplitude_bound() const;
};

WarpField make_warp_field(Rng& rng, double max_px, double min_wavelength,
                          double max_wavelength);

/// Textured RGB image rendered from a seeded structure field.
ImageBuffer make_texture(std::uint64_t seed, int width, int height);

/// Moving texture plus a fixed image produced by a known B-spline field with
/// max displacement magnitude `max_disp`.
struct DeformableCase {
    ImageBuffer moving;
    ImageBuffer fixed;
    DeformationGrid truth;
};

DeformableCase make_deformable_case(std::uint64_t seed, int size, double max_disp,
                                    double spacing = 64.0);

struct DemoConfig {
    std::uint64_t seed = 7;
    int size = 2048;
    int threads = 1;
    std::string out_dir;
    bool write_images = false;
};

/// Generates a synthetic stain pair with a known projective + smooth warp,
/// runs the full registration/patch pipeline, and reports landmark errors,
/// border state, and patch counts. The report is independent of the worker
/// count.
json_io::json run_demo(const DemoConfig& cfg);

}  // namespace stainbench

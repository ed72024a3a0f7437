#include "stainbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "stainbench/io.hpp"
#include "stainbench/parallel.hpp"
#include "stainbench/patch.hpp"
#include "stainbench/registration.hpp"

namespace stainbench {

namespace {

constexpr double kTwoPi = 6.283185307179586;

struct Palette {
    std::array<double, 3> bg;
    std::array<double, 3> fg;

    std::array<std::uint8_t, 3> shade(double s) const {
        std::array<std::uint8_t, 3> out{};
        for (int c = 0; c < 3; ++c) {
            out[c] = quantize255(bg[c] + s * (fg[c] - bg[c]));
        }
        return out;
    }
};

// H&E-ish: pale pink background, violet structure.
constexpr Palette kHePalette{{242, 229, 238}, {104, 58, 132}};
// IHC-ish: cream background, brown structure.
constexpr Palette kIhcPalette{{243, 238, 228}, {96, 60, 32}};

}  // namespace

double SmoothField::raw(double x, double y) const {
    double acc = 0.0;
    for (const auto& c : components) {
        acc += c.amplitude * std::cos(c.kx * x + c.ky * y + c.phase);
    }
    return acc;
}

double SmoothField::eval01(double x, double y) const {
    return 0.5 + 0.5 * std::tanh(gain * raw(x, y));
}

SmoothField make_structure_field(Rng& rng, double min_wavelength, double max_wavelength,
                                 int n_components) {
    SmoothField field;
    double energy = 0.0;
    const double log_min = std::log(min_wavelength);
    const double log_max = std::log(max_wavelength);
    for (int i = 0; i < n_components; ++i) {
        const double wavelength = std::exp(rng.uniform(log_min, log_max));
        const double angle = rng.uniform(0.0, kTwoPi);
        SmoothField::Component c;
        c.kx = kTwoPi / wavelength * std::cos(angle);
        c.ky = kTwoPi / wavelength * std::sin(angle);
        c.phase = rng.uniform(0.0, kTwoPi);
        c.amplitude = std::pow(wavelength, 0.35);
        energy += 0.5 * c.amplitude * c.amplitude;
        field.components.push_back(c);
    }
    field.gain = 1.2 / std::sqrt(energy);
    return field;
}

std::array<double, 2> WarpField::eval(double x, double y) const {
    double wx = 0.0, wy = 0.0;
    for (const auto& c : comp_x) wx += c.amplitude * std::cos(c.kx * x + c.ky * y + c.phase);
    for (const auto& c : comp_y) wy += c.amplitude * std::cos(c.kx * x + c.ky * y + c.phase);
    return {wx, wy};
}

double WarpField::amplitude_bound() const {
    double bx = 0.0, by = 0.0;
    for (const auto& c : comp_x) bx += std::abs(c.amplitude);
    for (const auto& c : comp_y) by += std::abs(c.amplitude);
    return std::max(bx, by);
}

WarpField make_warp_field(Rng& rng, double max_px, double min_wavelength,
                          double max_wavelength) {
    WarpField field;
    auto fill = [&](std::vector<SmoothField::Component>& comps) {
        double total = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double wavelength = rng.uniform(min_wavelength, max_wavelength);
            const double angle = rng.uniform(0.0, kTwoPi);
            SmoothField::Component c;
            c.kx = kTwoPi / wavelength * std::cos(angle);
            c.ky = kTwoPi / wavelength * std::sin(angle);
            c.phase = rng.uniform(0.0, kTwoPi);
            c.amplitude = rng.uniform(0.5, 1.0);
            total += c.amplitude;
            comps.push_back(c);
        }
        for (auto& c : comps) c.amplitude *= max_px / total;
    };
    fill(field.comp_x);
    fill(field.comp_y);
    return field;
}

ImageBuffer make_texture(std::uint64_t seed, int width, int height) {
    Rng rng(seed);
    const SmoothField field =
        make_structure_field(rng, 7.0, std::max(48.0, width / 4.0), 20);
    ImageBuffer img = ImageBuffer::u8(width, height, 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const auto rgb = kIhcPalette.shade(field.eval01(x, y));
            for (int c = 0; c < 3; ++c) img.at8(x, y, c) = rgb[c];
        }
    }
    return img;
}

DeformableCase make_deformable_case(std::uint64_t seed, int size, double max_disp,
                                    double spacing) {
    DeformableCase out;
    out.truth = DeformationGrid::zero(size, size, spacing);

    // control displacements sampled from smooth low-frequency fields, so the
    // truth warp is gentle enough for the intensity model to represent
    Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
    const SmoothField fx = make_structure_field(rng, size / 2.5, size * 1.0, 4);
    const SmoothField fy = make_structure_field(rng, size / 2.5, size * 1.0, 4);
    for (int j = 0; j < out.truth.ny; ++j) {
        for (int i = 0; i < out.truth.nx; ++i) {
            const double cx = (i - 1) * spacing;
            const double cy = (j - 1) * spacing;
            out.truth.dx[static_cast<std::size_t>(j) * out.truth.nx + i] =
                fx.eval01(cx, cy) - 0.5;
            out.truth.dy[static_cast<std::size_t>(j) * out.truth.nx + i] =
                fy.eval01(cx, cy) - 0.5;
        }
    }
    // scale so the interpolated field itself peaks at max_disp
    double max_mag = 0.0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const auto d = out.truth.displacement(x, y);
            max_mag = std::max(max_mag, std::hypot(d[0], d[1]));
        }
    }
    const double scale = max_disp / max_mag;
    for (std::size_t i = 0; i < out.truth.dx.size(); ++i) {
        out.truth.dx[i] *= scale;
        out.truth.dy[i] *= scale;
    }

    // Both images render analytically from one structure field, so the pair
    // carries no resampling or fill artifacts: fixed(x) shows the structure
    // at x + d(x), which is exactly what a warp of `moving` recovers. Fine
    // wavelengths keep the correlation responsive at the warp scale.
    Rng tex_rng(seed);
    const SmoothField field = make_structure_field(tex_rng, 10.0, 48.0, 20);
    out.moving = ImageBuffer::u8(size, size, 3);
    out.fixed = ImageBuffer::u8(size, size, 3);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const auto mov_rgb = kIhcPalette.shade(field.eval01(x, y));
            const auto d = out.truth.displacement(x, y);
            const auto fix_rgb = kIhcPalette.shade(field.eval01(x + d[0], y + d[1]));
            for (int c = 0; c < 3; ++c) {
                out.moving.at8(x, y, c) = mov_rgb[c];
                out.fixed.at8(x, y, c) = fix_rgb[c];
            }
        }
    }
    return out;
}

namespace {

// Generating transform: projective base plus a smooth warp, moving -> fixed.
struct TrueMap {
    Homography projective;
    WarpField warp;

    std::array<double, 2> apply(double ux, double uy) const {
        const auto v = projective.apply(ux, uy);
        const auto w = warp.eval(v[0], v[1]);
        return {v[0] + w[0], v[1] + w[1]};
    }

    // Fixed-point inversion of v + warp(v) = x, then the projective inverse.
    std::array<double, 2> invert(double x, double y) const {
        double vx = x, vy = y;
        for (int i = 0; i < 40; ++i) {
            const auto w = warp.eval(vx, vy);
            const double nx = x - w[0];
            const double ny = y - w[1];
            if (std::abs(nx - vx) < 1e-13 && std::abs(ny - vy) < 1e-13) {
                vx = nx;
                vy = ny;
                break;
            }
            vx = nx;
            vy = ny;
        }
        return projective.inverse().apply(vx, vy);
    }
};

Homography make_demo_homography(Rng& rng, int size) {
    const double theta = 0.012 + rng.uniform(-0.002, 0.002);
    const double scale = 1.012 + rng.uniform(-0.003, 0.003);
    const double tx = 14.0 + rng.uniform(-3.0, 3.0);
    const double ty = -10.0 + rng.uniform(-3.0, 3.0);
    const double cx = (size - 1) / 2.0;
    const double cy = (size - 1) / 2.0;
    const double cos_t = std::cos(theta) * scale;
    const double sin_t = std::sin(theta) * scale;
    Homography h;
    // rotation+scale about the center, then translation, then a touch of
    // perspective
    h.h = {cos_t, -sin_t, cx - cos_t * cx + sin_t * cy + tx,
           sin_t, cos_t,  cy - sin_t * cx - cos_t * cy + ty,
           rng.uniform(-1.0, 1.0) * 2e-7, rng.uniform(-1.0, 1.0) * 2e-7, 1.0};
    return h;
}

}  // namespace

json_io::json run_demo(const DemoConfig& cfg) {
    if (cfg.size < 64) throw std::invalid_argument("demo size must be at least 64");
    Rng rng(cfg.seed);
    const SmoothField structure = make_structure_field(rng, 18.0, cfg.size / 5.0, 18);
    TrueMap truth;
    truth.projective = make_demo_homography(rng, cfg.size);
    truth.warp = make_warp_field(rng, 5.5, cfg.size / 6.0, cfg.size / 2.0);

    // Structure sampled once on a padded grid; the fixed image reads it at
    // integer coordinates and the moving image bilinearly at warped ones.
    const int margin = 64;
    const int gw = cfg.size + 2 * margin;
    std::vector<float> sgrid(static_cast<std::size_t>(gw) * gw);
    parallel_for(static_cast<std::size_t>(gw), cfg.threads, [&](std::size_t gy) {
        const double y = static_cast<double>(static_cast<int>(gy) - margin);
        for (int gx = 0; gx < gw; ++gx) {
            sgrid[gy * gw + gx] =
                static_cast<float>(structure.eval01(gx - margin, y));
        }
    });
    auto sgrid_at = [&](double x, double y) -> double {
        const double px = x + margin;
        const double py = y + margin;
        const int x0 = std::clamp(static_cast<int>(px), 0, gw - 2);
        const int y0 = std::clamp(static_cast<int>(py), 0, gw - 2);
        const double fx = std::clamp(px - x0, 0.0, 1.0);
        const double fy = std::clamp(py - y0, 0.0, 1.0);
        const double v00 = sgrid[static_cast<std::size_t>(y0) * gw + x0];
        const double v10 = sgrid[static_cast<std::size_t>(y0) * gw + x0 + 1];
        const double v01 = sgrid[static_cast<std::size_t>(y0 + 1) * gw + x0];
        const double v11 = sgrid[static_cast<std::size_t>(y0 + 1) * gw + x0 + 1];
        const double top = v00 + fx * (v10 - v00);
        const double bot = v01 + fx * (v11 - v01);
        return top + fy * (bot - top);
    };

    ImageBuffer ihc = ImageBuffer::u8(cfg.size, cfg.size, 3);
    ImageBuffer he = ImageBuffer::u8(cfg.size, cfg.size, 3);
    parallel_for(static_cast<std::size_t>(cfg.size), cfg.threads, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < cfg.size; ++x) {
            const double s_fixed = sgrid[static_cast<std::size_t>(y + margin) * gw +
                                         (x + margin)];
            const auto ihc_rgb = kIhcPalette.shade(s_fixed);
            const auto mapped = truth.apply(x, y);
            const auto he_rgb = kHePalette.shade(sgrid_at(mapped[0], mapped[1]));
            for (int c = 0; c < 3; ++c) {
                ihc.at8(x, y, c) = ihc_rgb[c];
                he.at8(x, y, c) = he_rgb[c];
            }
        }
    });

    // Hand-picked correspondences, exact under the generating transform.
    LandmarkSet landmarks;
    const double inset = 0.08 * cfg.size;
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 4; ++i) {
            const double ux = inset + i * (cfg.size - 2 * inset) / 3.0;
            const double uy = inset + j * (cfg.size - 2 * inset) / 2.0;
            const auto fx = truth.apply(ux, uy);
            if (fx[0] < 0 || fx[1] < 0 || fx[0] > cfg.size - 1 || fx[1] > cfg.size - 1) {
                continue;
            }
            landmarks.pairs.push_back({ux, uy, fx[0], fx[1]});
        }
    }

    RegistrationConfig reg_cfg;
    reg_cfg.threads = cfg.threads;
    reg_cfg.deformable.seed = cfg.seed;
    const RegistrationResult reg = register_wsi_pair(he, ihc, landmarks, reg_cfg);

    // Landmark error on a 10x10 grid of fixed-image positions.
    const Homography h_inv = reg.homography.inverse();
    auto tile_displacement = [&](double x, double y) -> std::array<double, 2> {
        for (std::size_t i = 0; i < reg.layout.size(); ++i) {
            const TileRect& r = reg.layout[i];
            if (x >= r.x && y >= r.y && x < r.x + r.w && y < r.y + r.h) {
                return reg.tile_grids[i].displacement(x - r.x, y - r.y);
            }
        }
        return {0.0, 0.0};
    };
    double initial_sum = 0.0, final_sum = 0.0;
    int n_points = 0;
    const double m_inset = 0.15 * cfg.size;
    for (int j = 0; j < 10; ++j) {
        for (int i = 0; i < 10; ++i) {
            const double x = m_inset + i * (cfg.size - 2 * m_inset) / 9.0;
            const double y = m_inset + j * (cfg.size - 2 * m_inset) / 9.0;
            const auto u_true = truth.invert(x, y);
            initial_sum += std::hypot(u_true[0] - x, u_true[1] - y);
            const auto d = tile_displacement(x, y);
            const auto u_est = h_inv.apply(x + d[0], y + d[1]);
            final_sum += std::hypot(u_est[0] - u_true[0], u_est[1] - u_true[1]);
            ++n_points;
        }
    }
    const double initial_err = initial_sum / n_points;
    const double final_err = final_sum / n_points;

    const std::size_t border_black = count_border_black(reg.image);

    json_io::json patches_json;
    if (cfg.size >= 1024) {
        const auto patch_pairs = patchify(reg.image, ihc, 1024, 1024);
        const int per_axis = (cfg.size - 1024) / 1024 + 1;
        std::size_t tissue_pass = 0, alignment_pass = 0;
        for (const auto& p : patch_pairs) {
            if (tissue_filter(p.ihc).pass) ++tissue_pass;
            if (alignment_filter(p.he, p.ihc).pass) ++alignment_pass;
        }
        patches_json = {{"count", patch_pairs.size()},
                        {"expected", static_cast<std::size_t>(per_axis) * per_axis},
                        {"tissue_pass", tissue_pass},
                        {"alignment_pass", alignment_pass}};
    } else {
        patches_json = {{"count", 0}, {"expected", 0}, {"tissue_pass", 0},
                        {"alignment_pass", 0}};
    }

    json_io::json h_json = json_io::json::array();
    for (double v : reg.homography.h) h_json.push_back(json_io::number(v));

    json_io::json report{
        {"seed", cfg.seed},
        {"size", cfg.size},
        {"landmark_error_px",
         {{"initial", json_io::number(initial_err)},
          {"final", json_io::number(final_err)},
          {"reduction", json_io::number(initial_err > 0
                                            ? 1.0 - final_err / initial_err
                                            : 0.0)}}},
        {"border_black_pixels", border_black},
        {"patches", patches_json},
        {"homography", h_json},
        {"registration", reg.report.to_json()}};

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        json_io::save_file(report, (std::filesystem::path(cfg.out_dir) / "report.json").string());
        if (cfg.write_images) {
            namespace fs = std::filesystem;
            save_png(he, (fs::path(cfg.out_dir) / "he.png").string());
            save_png(ihc, (fs::path(cfg.out_dir) / "ihc.png").string());
            save_png(reg.image, (fs::path(cfg.out_dir) / "registered.png").string());
            save_png(render_overlay(reg.image, ihc),
                     (fs::path(cfg.out_dir) / "overlay.png").string());
        }
    }
    return report;
}

}  // namespace stainbench

#include <doctest.h>

#include <cmath>

#include "stainbench/deformable.hpp"
#include "stainbench/registration.hpp"
#include "stainbench/synthetic.hpp"
#include "test_support.hpp"

using namespace stainbench;

namespace {

// mean landmark error of an estimated grid against the generating grid on an
// inset 10x10 lattice
double grid_error(const DeformationGrid& est, const DeformationGrid& truth, int size) {
    double sum = 0.0;
    int n = 0;
    const double inset = 0.1 * size;
    for (int j = 0; j < 10; ++j) {
        for (int i = 0; i < 10; ++i) {
            const double x = inset + i * (size - 2 * inset) / 9.0;
            const double y = inset + j * (size - 2 * inset) / 9.0;
            const auto de = est.displacement(x, y);
            const auto dt = truth.displacement(x, y);
            sum += std::hypot(de[0] - dt[0], de[1] - dt[1]);
            ++n;
        }
    }
    return sum / n;
}

double grid_truth_magnitude(const DeformationGrid& truth, int size) {
    double sum = 0.0;
    int n = 0;
    const double inset = 0.1 * size;
    for (int j = 0; j < 10; ++j) {
        for (int i = 0; i < 10; ++i) {
            const double x = inset + i * (size - 2 * inset) / 9.0;
            const double y = inset + j * (size - 2 * inset) / 9.0;
            const auto dt = truth.displacement(x, y);
            sum += std::hypot(dt[0], dt[1]);
            ++n;
        }
    }
    return sum / n;
}

}  // namespace

TEST_SUITE("deformable registration") {
    TEST_CASE("identical images stay put") {
        const auto img = make_texture(71, 128, 128);
        DeformableConfig cfg;
        cfg.pyramid_levels = 2;
        cfg.iterations = 40;
        DeformableStats stats;
        const auto grid = register_deformable(img, img, cfg, &stats);
        CHECK(grid.mean_displacement_magnitude() < 0.1);
        CHECK(stats.ncc_initial == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(stats.ncc_final == doctest::Approx(1.0).epsilon(1e-9));
    }

    TEST_CASE("recovers a synthetic warp on a small tile") {
        const auto scene = make_deformable_case(5, 192, 5.0, 48.0);
        DeformableConfig cfg;
        cfg.spacing = 48.0;
        cfg.iterations = 120;
        DeformableStats stats;
        const auto grid = register_deformable(scene.moving, scene.fixed, cfg, &stats);
        const double before = grid_truth_magnitude(scene.truth, 192);
        const double after = grid_error(grid, scene.truth, 192);
        CHECK(before > 2.0);
        CHECK(after < 0.5 * before);
        CHECK(stats.ncc_final > stats.ncc_initial);
    }

    TEST_CASE("accepted objective never degrades") {
        const auto scene = make_deformable_case(6, 128, 4.0, 64.0);
        DeformableConfig cfg;
        cfg.iterations = 60;
        DeformableStats stats;
        register_deformable(scene.moving, scene.fixed, cfg, &stats);
        CHECK(stats.ncc_final >= stats.ncc_initial - 1e-12);
    }

    TEST_CASE("zero-variance fixed image is rejected") {
        const auto moving = make_texture(72, 64, 64);
        auto flat = ImageBuffer::u8(64, 64, 3);
        for (auto& b : flat.bytes) b = 200;
        CHECK_THROWS_WITH_AS(register_deformable(moving, flat, {}),
                             doctest::Contains("zero variance"), std::invalid_argument);
    }

    TEST_CASE("dimension mismatch is rejected") {
        const auto a = make_texture(73, 64, 64);
        const auto b = make_texture(73, 64, 48);
        CHECK_THROWS_AS(register_deformable(a, b, {}), std::invalid_argument);
    }

    TEST_CASE("analytic gradient matches central differences") {
        const auto scene = make_deformable_case(8, 48, 3.0, 24.0);
        auto grid = DeformationGrid::zero(48, 48, 24.0);
        Rng rng(123);
        for (auto& v : grid.dx) v = rng.uniform(-1.0, 1.0);
        for (auto& v : grid.dy) v = rng.uniform(-1.0, 1.0);

        std::vector<double> gx, gy;
        deformable_objective(scene.moving, scene.fixed, grid, &gx, &gy);

        const double h = 1e-4;
        for (const std::size_t k : {std::size_t{5}, std::size_t{12}, std::size_t{18}}) {
            auto plus = grid;
            auto minus = grid;
            plus.dx[k] += h;
            minus.dx[k] -= h;
            const double fd = (deformable_objective(scene.moving, scene.fixed, plus) -
                               deformable_objective(scene.moving, scene.fixed, minus)) /
                              (2 * h);
            CHECK(gx[k] == doctest::Approx(fd).epsilon(5e-3).scale(1e-4));

            plus = grid;
            minus = grid;
            plus.dy[k] += h;
            minus.dy[k] -= h;
            const double fdy = (deformable_objective(scene.moving, scene.fixed, plus) -
                                deformable_objective(scene.moving, scene.fixed, minus)) /
                               (2 * h);
            CHECK(gy[k] == doctest::Approx(fdy).epsilon(5e-3).scale(1e-4));
        }
    }
}

TEST_SUITE("wsi pair registration") {
    TEST_CASE("identity pair passes through within interpolation noise") {
        auto img = make_texture(74, 256, 256);
        // keep everything non-black so border refinement is a no-op
        for (auto& b : img.bytes) b = static_cast<std::uint8_t>(std::max<int>(b, 1));
        LandmarkSet lm;
        for (const auto& [x, y] :
             std::vector<std::pair<double, double>>{{20, 20}, {230, 30}, {25, 235}, {240, 228},
                                                    {128, 120}, {60, 180}}) {
            lm.pairs.push_back({x, y, x, y});
        }
        RegistrationConfig cfg;
        cfg.deformable.iterations = 30;
        const auto result = register_wsi_pair(img, img, lm, cfg);
        double max_err = 0.0;
        for (std::size_t i = 0; i < img.bytes.size(); ++i) {
            max_err = std::max(max_err,
                               std::abs(static_cast<double>(result.image.bytes[i]) -
                                        img.bytes[i]));
        }
        CHECK(max_err <= 2.0);
        CHECK(result.report.tiles.size() == 16);
    }

    TEST_CASE("landmark outside the image is rejected") {
        const auto img = make_texture(75, 64, 64);
        LandmarkSet lm;
        lm.pairs = {{10, 10, 10, 10}, {50, 10, 50, 10}, {10, 50, 10, 50}, {99, 50, 50, 50}};
        RegistrationConfig cfg;
        CHECK_THROWS_WITH_AS(register_wsi_pair(img, img, lm, cfg),
                             doctest::Contains("landmark outside"), std::invalid_argument);
    }

    TEST_CASE("report serializes per-tile stats") {
        RegistrationReport report;
        report.tiles = {{{0, 0, 8, 8}, 0.5, 0.9, 1.25}};
        const auto j = report.to_json();
        const std::string s = json_io::dump(j);
        CHECK(s.find("ncc_initial") != std::string::npos);
        CHECK(s.find("ncc_final") != std::string::npos);
        CHECK(s.find("mean_disp") != std::string::npos);
    }
}

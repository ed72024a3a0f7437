#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "stainbench/bspline.hpp"
#include "stainbench/synthetic.hpp"
#include "stainbench/homography.hpp"
#include "stainbench/registration.hpp"
#include "stainbench/rng.hpp"
#include "stainbench/warp.hpp"
#include "test_support.hpp"

using namespace stainbench;

namespace {

LandmarkSet map_points(const Homography& h, const std::vector<std::pair<double, double>>& pts) {
    LandmarkSet lm;
    for (const auto& [x, y] : pts) {
        const auto f = h.apply(x, y);
        lm.pairs.push_back({x, y, f[0], f[1]});
    }
    return lm;
}

double max_entry_error(const Homography& a, const Homography& b) {
    double err = 0.0;
    for (int i = 0; i < 9; ++i) err = std::max(err, std::abs(a.h[i] - b.h[i]));
    return err;
}

Homography random_homography(Rng& rng) {
    // modest perturbation of a similarity transform, always invertible
    const double theta = rng.uniform(-0.5, 0.5);
    const double s = rng.uniform(0.7, 1.4);
    Homography h;
    h.h = {s * std::cos(theta), -s * std::sin(theta), rng.uniform(-40.0, 40.0),
           s * std::sin(theta), s * std::cos(theta),  rng.uniform(-40.0, 40.0),
           rng.uniform(-1e-4, 1e-4), rng.uniform(-1e-4, 1e-4), 1.0};
    return h;
}

}  // namespace

TEST_SUITE("homography") {
    TEST_CASE("identity from matching quads") {
        const std::vector<std::pair<double, double>> pts{{0, 0}, {100, 0}, {0, 100}, {100, 100}};
        const Homography h = estimate_homography(map_points(Homography::identity(), pts));
        CHECK(max_entry_error(h, Homography::identity()) < 1e-9);
    }

    TEST_CASE("recovers translation plus scale from 8 points") {
        Homography truth;
        truth.h = {1.2, 0, 10, 0, 1.2, -5, 0, 0, 1};
        std::vector<std::pair<double, double>> pts;
        Rng rng(3);
        for (int i = 0; i < 8; ++i) {
            pts.push_back({rng.uniform(0.0, 200.0), rng.uniform(0.0, 200.0)});
        }
        const Homography h = estimate_homography(map_points(truth, pts));
        CHECK(max_entry_error(h, truth) < 1e-6);
    }

    TEST_CASE("too few and degenerate configurations") {
        LandmarkSet lm;
        lm.pairs = {{0, 0, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}};
        CHECK_THROWS_WITH_AS(estimate_homography(lm),
                             doctest::Contains("insufficient correspondences"),
                             std::invalid_argument);
        // four pairs with three collinear fixed points
        lm.pairs = {{0, 0, 0, 0}, {1, 0, 1, 0}, {2, 0, 2, 0}, {0, 1, 3, 0}};
        CHECK_THROWS_AS(estimate_homography(lm), std::invalid_argument);
    }

    TEST_CASE("estimate is invariant to pair order") {
        Rng rng(17);
        const Homography truth = random_homography(rng);
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < 6; ++i) {
            pts.push_back({rng.uniform(0.0, 300.0), rng.uniform(0.0, 300.0)});
        }
        LandmarkSet lm = map_points(truth, pts);
        const Homography a = estimate_homography(lm);
        std::reverse(lm.pairs.begin(), lm.pairs.end());
        std::swap(lm.pairs[0], lm.pairs[2]);
        const Homography b = estimate_homography(lm);
        CHECK(max_entry_error(a, b) < 1e-9);
    }

    TEST_CASE("exact on noiseless inputs across many random transforms") {
        Rng rng(99);
        for (int trial = 0; trial < 50; ++trial) {
            const Homography truth = random_homography(rng);
            std::vector<std::pair<double, double>> pts;
            for (int i = 0; i < 4 + static_cast<int>(rng.uniform_int(0, 6)); ++i) {
                pts.push_back({rng.uniform(0.0, 500.0), rng.uniform(0.0, 500.0)});
            }
            const Homography h = estimate_homography(map_points(truth, pts));
            double rel = 0.0;
            for (int i = 0; i < 9; ++i) {
                rel = std::max(rel, std::abs(h.h[i] - truth.h[i]) /
                                        std::max(1e-3, std::abs(truth.h[i])));
            }
            CHECK(rel < 1e-6);
        }
    }
}

TEST_SUITE("projective warp") {
    TEST_CASE("identity homography copies the image") {
        Rng rng(5);
        const auto img = test_support::random_u8(rng, 32, 24, 3);
        const auto out = warp_projective(img, Homography::identity(), 32, 24);
        CHECK(images_equal(img, out));
    }

    TEST_CASE("pure translation blackens the uncovered band") {
        Rng rng(6);
        const auto img = test_support::random_u8(rng, 64, 64, 1, 10, 255);
        Homography t;
        t.h = {1, 0, 10, 0, 1, 0, 0, 0, 1};
        const auto out = warp_projective(img, t, 64, 64);
        for (int y = 0; y < 64; ++y) {
            for (int x = 0; x < 10; ++x) CHECK(out.at8(x, y) == 0);
            for (int x = 10; x < 64; ++x) CHECK(out.at8(x, y) == img.at8(x - 10, y));
        }
    }

    TEST_CASE("warp round trip loses at most 2/255 in the interior") {
        // long-wavelength real-valued texture: interpolation error is the
        // only loss source, no 8-bit quantization in the chain
        Rng rng(21);
        const SmoothField field = make_structure_field(rng, 48.0, 96.0, 8);
        auto img = ImageBuffer::real(96, 96, 1);
        for (int y = 0; y < 96; ++y) {
            for (int x = 0; x < 96; ++x) img.atr(x, y) = field.eval01(x, y);
        }
        Homography h;
        h.h = {1.02, 0.01, 3.7, -0.008, 0.99, -2.2, 1e-5, -1e-5, 1.0};
        const auto there = warp_projective(img, h, 96, 96);
        const auto back = warp_projective(there, h.inverse(), 96, 96);
        double max_err = 0.0;
        for (int y = 16; y < 80; ++y) {
            for (int x = 16; x < 80; ++x) {
                max_err = std::max(max_err,
                                   std::abs(back.value255(x, y, 0) - img.value255(x, y, 0)));
            }
        }
        CHECK(max_err <= 2.0);
    }

    TEST_CASE("overlay blends half and half with round-half-up") {
        auto black = ImageBuffer::u8(2, 2, 1);
        auto white = ImageBuffer::u8(2, 2, 1);
        for (auto& b : white.bytes) b = 255;
        const auto mid = render_overlay(black, white);
        CHECK(mid.at8(0, 0) == 128);
        CHECK(images_equal(render_overlay(white, white), white));

        auto a = ImageBuffer::u8(2, 2, 1);
        auto b = ImageBuffer::u8(2, 2, 1);
        a.bytes = {10, 20, 30, 40};
        b.bytes = {20, 30, 40, 51};
        const auto m = render_overlay(a, b);
        CHECK(m.bytes == std::vector<std::uint8_t>{15, 25, 35, 46});

        auto wrong = ImageBuffer::u8(3, 2, 1);
        CHECK_THROWS_AS(render_overlay(a, wrong), std::invalid_argument);
    }
}

TEST_SUITE("deformation grid") {
    TEST_CASE("control counts include the cubic margin") {
        const auto g = DeformationGrid::zero(512, 512, 64.0);
        CHECK(g.nx == 11);
        CHECK(g.ny == 11);
    }

    TEST_CASE("zero field is the identity warp") {
        Rng rng(9);
        const auto img = test_support::random_u8(rng, 40, 40, 3);
        const auto g = DeformationGrid::zero(40, 40, 16.0);
        CHECK(images_equal(apply_deformation(img, g), img));
    }

    TEST_CASE("uniform control displacement shifts the image") {
        const auto img = make_texture(31, 80, 80);
        auto g = DeformationGrid::zero(80, 80, 16.0);
        std::fill(g.dx.begin(), g.dx.end(), 5.0);
        const auto d = g.displacement(37.3, 11.9);
        CHECK(d[0] == doctest::Approx(5.0).epsilon(1e-12));
        CHECK(d[1] == doctest::Approx(0.0).epsilon(1e-12));

        const auto out = apply_deformation(img, g);
        // out(x) = img(x+5): compare on the interior against a direct shift
        double max_err = 0.0;
        for (int y = 4; y < 76; ++y) {
            for (int x = 4; x < 71; ++x) {
                for (int c = 0; c < 3; ++c) {
                    max_err = std::max(max_err, std::abs(out.value255(x, y, c) -
                                                         img.value255(x + 5, y, c)));
                }
            }
        }
        CHECK(max_err <= 1.0);
    }

    TEST_CASE("domain mismatch is rejected") {
        const auto g = DeformationGrid::zero(64, 64, 16.0);
        const auto img = ImageBuffer::u8(63, 64, 1);
        CHECK_THROWS_AS(apply_deformation(img, g), std::invalid_argument);
    }
}

TEST_SUITE("tiles and borders") {
    TEST_CASE("4x4 layout covers without gaps") {
        const auto layout = tile_layout(1003, 997);
        CHECK(layout.size() == 16);
        long long area = 0;
        for (const auto& t : layout) area += static_cast<long long>(t.w) * t.h;
        CHECK(area == 1003LL * 997);
    }

    TEST_CASE("stitch of split is the identity") {
        Rng rng(12);
        const auto img = test_support::random_u8(rng, 61, 47, 3);
        const auto layout = tile_layout(img.width, img.height);
        const auto tiles = split_tiles(img, layout);
        CHECK(images_equal(stitch_tiles(tiles, layout, img.width, img.height), img));
    }

    TEST_CASE("black frame is filled and the interior is untouched") {
        Rng rng(13);
        auto img = test_support::random_u8(rng, 24, 24, 3, 1, 255);
        auto framed = img;
        for (int y = 0; y < 24; ++y) {
            for (int x = 0; x < 24; ++x) {
                if (x < 3 || y < 3 || x >= 21 || y >= 21) {
                    for (int c = 0; c < 3; ++c) framed.at8(x, y, c) = 0;
                }
            }
        }
        const auto refined = refine_borders(framed);
        CHECK(count_border_black(refined) == 0);
        for (int y = 3; y < 21; ++y) {
            for (int x = 3; x < 21; ++x) {
                for (int c = 0; c < 3; ++c) {
                    CHECK(refined.at8(x, y, c) == img.at8(x, y, c));
                }
            }
        }
    }

    TEST_CASE("no black pixels means no change") {
        Rng rng(14);
        const auto img = test_support::random_u8(rng, 16, 16, 3, 1, 255);
        CHECK(images_equal(refine_borders(img), img));
    }

    TEST_CASE("constant gray with a black frame becomes all gray") {
        auto img = ImageBuffer::u8(20, 20, 1);
        for (int y = 0; y < 20; ++y) {
            for (int x = 0; x < 20; ++x) {
                img.at8(x, y) = (x < 4 || y < 4 || x >= 16 || y >= 16) ? 0 : 137;
            }
        }
        const auto refined = refine_borders(img);
        for (auto b : refined.bytes) CHECK(b == 137);
    }

    TEST_CASE("interior black islands stay black") {
        auto img = ImageBuffer::u8(15, 15, 1);
        for (auto& b : img.bytes) b = 80;
        img.at8(7, 7) = 0;
        img.at8(7, 8) = 0;
        const auto refined = refine_borders(img);
        CHECK(refined.at8(7, 7) == 0);
        CHECK(refined.at8(7, 8) == 0);
    }

    TEST_CASE("entirely black image is rejected") {
        const auto img = ImageBuffer::u8(8, 8, 3);
        CHECK_THROWS_WITH_AS(refine_borders(img), doctest::Contains("entirely black"),
                             std::invalid_argument);
    }
}

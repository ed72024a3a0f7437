#include <doctest.h>

#include "stainbench/patch.hpp"
#include "stainbench/rng.hpp"
#include "stainbench/synthetic.hpp"
#include "test_support.hpp"

using namespace stainbench;

TEST_SUITE("patchify") {
    TEST_CASE("grid counts") {
        const auto he = make_texture(1, 256, 256);
        const auto ihc = make_texture(2, 256, 256);
        CHECK(patchify(he, ihc, 64).size() == 16);
        const auto he2 = make_texture(3, 128, 64);
        const auto ihc2 = make_texture(4, 128, 64);
        CHECK(patchify(he2, ihc2, 64).size() == 2);
    }

    TEST_CASE("patch count formula holds across sizes and strides") {
        Rng rng(21);
        for (int t = 0; t < 30; ++t) {
            const int size = 8 + static_cast<int>(rng.uniform_int(0, 24));
            const int w = size + static_cast<int>(rng.uniform_int(0, 60));
            const int h = size + static_cast<int>(rng.uniform_int(0, 60));
            const int stride = 1 + static_cast<int>(rng.uniform_int(0, size));
            auto img = ImageBuffer::u8(w, h, 3);
            const auto patches = patchify(img, img, size, stride);
            const std::size_t expected =
                static_cast<std::size_t>((w - size) / stride + 1) *
                static_cast<std::size_t>((h - size) / stride + 1);
            CHECK(patches.size() == expected);
        }
    }

    TEST_CASE("oversized patch is rejected") {
        const auto img = make_texture(5, 100, 100);
        CHECK_THROWS_AS(patchify(img, img, 128), std::invalid_argument);
    }

    TEST_CASE("patches carry row-major origins and exact pixels") {
        const auto he = make_texture(6, 96, 96);
        const auto ihc = make_texture(7, 96, 96);
        const auto patches = patchify(he, ihc, 48);
        REQUIRE(patches.size() == 4);
        CHECK(patches[1].x == 48);
        CHECK(patches[1].y == 0);
        CHECK(patches[2].x == 0);
        CHECK(patches[2].y == 48);
        CHECK(patches[3].he.at8(0, 0, 0) == he.at8(48, 48, 0));
        CHECK(patches[3].ihc.at8(10, 5, 2) == ihc.at8(58, 53, 2));
    }
}

TEST_SUITE("tissue filter") {
    TEST_CASE("white fails, saturated passes") {
        auto white = ImageBuffer::u8(16, 16, 3);
        for (auto& b : white.bytes) b = 255;
        const auto w = tissue_filter(white);
        CHECK(w.fraction == 0.0);
        CHECK_FALSE(w.pass);

        auto magenta = ImageBuffer::u8(16, 16, 3);
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) {
                magenta.at8(x, y, 0) = 200;
                magenta.at8(x, y, 1) = 20;
                magenta.at8(x, y, 2) = 200;
            }
        }
        const auto m = tissue_filter(magenta);
        CHECK(m.fraction == 1.0);
        CHECK(m.pass);
    }

    TEST_CASE("half white half pink sits exactly at the threshold") {
        auto img = ImageBuffer::u8(16, 16, 3);
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 16; ++x) {
                if (y < 8) {
                    img.at8(x, y, 0) = 255;
                    img.at8(x, y, 1) = 255;
                    img.at8(x, y, 2) = 255;
                } else {
                    img.at8(x, y, 0) = 220;  // saturated pink, value < 0.95
                    img.at8(x, y, 1) = 120;
                    img.at8(x, y, 2) = 160;
                }
            }
        }
        const auto r = tissue_filter(img);
        CHECK(r.fraction == doctest::Approx(0.5));
        CHECK(r.pass);  // fraction >= threshold passes
    }

    TEST_CASE("grayscale input is rejected") {
        const auto gray = ImageBuffer::u8(8, 8, 1);
        CHECK_THROWS_AS(tissue_filter(gray), std::invalid_argument);
    }
}

TEST_SUITE("alignment filter") {
    TEST_CASE("identical textured patches score one") {
        const auto img = make_texture(8, 64, 64);
        const auto r = alignment_filter(img, img);
        CHECK(r.score == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(r.pass);
    }

    TEST_CASE("heavily shifted copy fails") {
        const auto img = make_texture(9, 128, 128);
        auto shifted = ImageBuffer::u8(128, 128, 3);
        for (int y = 0; y < 128; ++y) {
            for (int x = 0; x < 128; ++x) {
                for (int c = 0; c < 3; ++c) {
                    shifted.at8(x, y, c) = img.at8((x + 64) % 128, (y + 64) % 128, c);
                }
            }
        }
        const auto r = alignment_filter(img, shifted);
        CHECK(r.score < 0.2);
        CHECK_FALSE(r.pass);
    }

    TEST_CASE("constant patch fails with score zero") {
        auto flat = ImageBuffer::u8(32, 32, 3);
        for (auto& b : flat.bytes) b = 99;
        const auto r = alignment_filter(flat, make_texture(10, 32, 32));
        CHECK(r.score == 0.0);
        CHECK_FALSE(r.pass);
    }
}

TEST_SUITE("manifest building") {
    TEST_CASE("labels and splits are applied") {
        std::vector<PatchRecord> records;
        for (int i = 0; i < 16; ++i) {
            records.push_back({"wsiA", i * 1024, 0, 1024, {true, true}});
        }
        const auto manifest = build_manifest(records, {{"wsiA", Her2Level::L2}},
                                             {{"wsiA", Split::Train}});
        CHECK(manifest.entries.size() == 16);
        for (const auto& e : manifest.entries) {
            CHECK(to_string(e.her2) == "2+");
            CHECK(e.split == Split::Train);
        }
        manifest.validate(1024, 1024);
    }

    TEST_CASE("missing label and duplicate ids are rejected") {
        std::vector<PatchRecord> records{{"wsiB", 0, 0, 64, {}}};
        CHECK_THROWS_WITH_AS(build_manifest(records, {}, {{"wsiB", Split::Val}}),
                             doctest::Contains("missing HER2 label"), std::invalid_argument);
        records.push_back({"wsiB", 0, 0, 64, {}});
        CHECK_THROWS_WITH_AS(
            build_manifest(records, {{"wsiB", Her2Level::L0}}, {{"wsiB", Split::Val}}),
            doctest::Contains("duplicate patch_id"), std::invalid_argument);
    }
}

#include <doctest.h>

#include <cstdint>
#include <fstream>

#include "stainbench/image.hpp"
#include "stainbench/io.hpp"
#include "stainbench/json_io.hpp"
#include "stainbench/rng.hpp"
#include "stainbench/types.hpp"
#include "test_support.hpp"

using namespace stainbench;

TEST_SUITE("image") {
    TEST_CASE("u8/real round trip is the identity") {
        Rng rng(11);
        auto img = test_support::random_u8(rng, 13, 7, 3);
        const auto back = img.to_real().to_u8();
        CHECK(images_equal(img, back));
    }

    TEST_CASE("shape validation") {
        CHECK_THROWS_AS(ImageBuffer::u8(0, 4, 1), std::invalid_argument);
        CHECK_THROWS_AS(ImageBuffer::u8(4, 4, 2), std::invalid_argument);
        CHECK_THROWS_AS(ImageBuffer::real(4, -1, 3), std::invalid_argument);
    }

    TEST_CASE("luminance of gray passes through") {
        auto img = ImageBuffer::u8(3, 2, 1);
        img.at8(1, 0) = 200;
        const auto lum = luminance255(img);
        CHECK(lum[1] == doctest::Approx(200.0));
    }
}

TEST_SUITE("tensor file") {
    TEST_CASE("round trip is bit exact and the size is as documented") {
        test_support::TempDir dir("tensor");
        Tensor t;
        t.dims = {2, 2};
        t.data = {1.0f, 2.0f, 3.0f, 4.0f};
        const auto path = dir.str("a.tsr");
        write_tensor(t, path);
        CHECK(std::filesystem::file_size(path) == 4u + 4u + 8u + 16u);
        const Tensor back = read_tensor(path);
        CHECK(back.dims == t.dims);
        CHECK(back.data == t.data);
    }

    TEST_CASE("1-d tensor round trip") {
        test_support::TempDir dir("tensor1d");
        Tensor t;
        t.dims = {3};
        t.data = {0.0f, 0.0f, 0.0f};
        write_tensor(t, dir.str("z.tsr"));
        const Tensor back = read_tensor(dir.str("z.tsr"));
        CHECK(back.dims == t.dims);
        CHECK(back.data == t.data);
    }

    TEST_CASE("bad magic is rejected") {
        test_support::TempDir dir("tensorbad");
        const auto path = dir.str("bad.tsr");
        std::ofstream os(path, std::ios::binary);
        os << "TSR2" << std::string(12, '\0');
        os.close();
        CHECK_THROWS_WITH_AS(read_tensor(path),
                             doctest::Contains("bad tensor magic"), std::runtime_error);
    }

    TEST_CASE("truncated payload is rejected") {
        test_support::TempDir dir("tensortrunc");
        Tensor t;
        t.dims = {4};
        t.data = {1, 2, 3, 4};
        const auto path = dir.str("t.tsr");
        write_tensor(t, path);
        // chop off the last 4 bytes
        const auto full = read_text_file(path);
        write_text_file(path, full.substr(0, full.size() - 4));
        CHECK_THROWS_AS(read_tensor(path), std::runtime_error);
    }

    TEST_CASE("ndim bounds") {
        Tensor t;
        t.dims = {1, 1, 1, 1, 1};
        t.data = {0.0f};
        test_support::TempDir dir("tensorndim");
        CHECK_THROWS_AS(write_tensor(t, dir.str("n.tsr")), std::invalid_argument);
    }
}

TEST_SUITE("rng") {
    TEST_CASE("same seed, same stream") {
        Rng a(0), b(0);
        for (int i = 0; i < 10; ++i) CHECK(a.next_u64() == b.next_u64());
    }

    TEST_CASE("different seeds diverge") {
        Rng a(0), b(1);
        bool differ = false;
        for (int i = 0; i < 10; ++i) differ |= (a.next_u64() != b.next_u64());
        CHECK(differ);
    }

    TEST_CASE("golden first outputs for seed 42") {
        // frozen from an independent implementation of splitmix64-seeded
        // xoshiro256**
        Rng r(42);
        CHECK(r.next_u64() == 0x15780b2e0c2ec716ULL);
        CHECK(r.next_u64() == 0x6104d9866d113a7eULL);
        CHECK(r.next_u64() == 0xae17533239e499a1ULL);
    }
}

TEST_SUITE("json io") {
    TEST_CASE("deterministic dump: sorted keys, 6 significant digits") {
        json_io::json j{{"zeta", 0.123456789}, {"alpha", 34.1514035220}, {"n", 42}};
        const std::string s = json_io::dump(j);
        CHECK(s.find("\"alpha\"") < s.find("\"n\""));
        CHECK(s.find("\"n\"") < s.find("\"zeta\""));
        CHECK(s.find("34.1514") != std::string::npos);
        CHECK(s.find("0.123457") != std::string::npos);
    }

    TEST_CASE("non-finite reals become strings and read back") {
        const double inf = std::numeric_limits<double>::infinity();
        json_io::json j{{"p", json_io::number(inf)},
                        {"m", json_io::number(-inf)},
                        {"x", json_io::number(1.5)}};
        const std::string s = json_io::dump(j);
        CHECK(s.find("\"inf\"") != std::string::npos);
        CHECK(s.find("\"-inf\"") != std::string::npos);
        const auto back = json_io::parse(s);
        CHECK(json_io::to_double(back["p"]) == inf);
        CHECK(json_io::to_double(back["m"]) == -inf);
        CHECK(json_io::to_double(back["x"]) == 1.5);
    }

    TEST_CASE("emit-parse-emit is byte stable") {
        json_io::json j{{"a", 1.0 / 3.0}, {"b", {1, 2, 3}}, {"c", "text"}};
        const std::string once = json_io::dump(j);
        const std::string twice = json_io::dump(json_io::parse(once));
        CHECK(once == twice);
    }
}

TEST_SUITE("domain types") {
    TEST_CASE("her2 serialization") {
        CHECK(to_string(Her2Level::L2) == "2+");
        CHECK(her2_from_string("3+") == Her2Level::L3);
        CHECK_THROWS_AS(her2_from_string("4+"), std::invalid_argument);
    }

    TEST_CASE("landmark json round trip") {
        LandmarkSet lm;
        lm.pairs = {{1, 2, 3, 4}, {5, 6, 7, 8}};
        const auto back = LandmarkSet::from_json(lm.to_json());
        REQUIRE(back.pairs.size() == 2);
        CHECK(back.pairs[1].fixed_y == 8);
    }

    TEST_CASE("landmark validation") {
        LandmarkSet lm;
        lm.pairs = {{0, 0, 0, 0}, {1, 1, 1, 1}, {2, 2, 2, 2}};
        CHECK_THROWS_WITH_AS(lm.require_projective_usable(),
                             doctest::Contains("insufficient correspondences"),
                             std::invalid_argument);
        lm.pairs.push_back({1, 1, 9, 9});
        CHECK_THROWS_WITH_AS(lm.require_projective_usable(),
                             doctest::Contains("duplicate moving"), std::invalid_argument);
    }

    TEST_CASE("manifest validates and round trips byte-identically") {
        PatchManifest m;
        for (int i = 0; i < 4; ++i) {
            PatchEntry e;
            e.patch_id = "w1_" + std::to_string(i * 1024) + "_0";
            e.wsi_id = "w1";
            e.origin_x = i * 1024;
            e.origin_y = 0;
            e.size = 1024;
            e.her2 = Her2Level::L2;
            e.split = Split::Train;
            e.qc = {true, i % 2 == 0};
            m.entries.push_back(e);
        }
        m.validate(1024, 1024);
        const std::string once = json_io::dump(m.to_json());
        const auto back = PatchManifest::from_json(json_io::parse(once));
        CHECK(json_io::dump(back.to_json()) == once);
        CHECK(back.entries[2].qc.tissue_pass);
    }

    TEST_CASE("manifest rejects duplicates and off-grid origins") {
        PatchManifest m;
        PatchEntry e;
        e.patch_id = "p";
        e.wsi_id = "w";
        e.size = 64;
        m.entries = {e, e};
        CHECK_THROWS_WITH_AS(m.validate(64, 64), doctest::Contains("duplicate"),
                             std::invalid_argument);
        m.entries.pop_back();
        m.entries[0].origin_x = 13;
        CHECK_THROWS_WITH_AS(m.validate(64, 64), doctest::Contains("stride"),
                             std::invalid_argument);
    }

    TEST_CASE("BCI-shaped manifest reports the published split sizes") {
        PatchManifest m;
        const struct {
            Split split;
            int count;
        } sizes[] = {{Split::Train, 3396}, {Split::Val, 500}, {Split::Test, 977}};
        int wsi = 0;
        for (const auto& s : sizes) {
            for (int i = 0; i < s.count; ++i) {
                PatchEntry e;
                e.wsi_id = "w" + std::to_string(wsi);
                e.patch_id = e.wsi_id + "_" + std::to_string(i) + "_" + to_string(s.split);
                e.origin_x = static_cast<std::int64_t>(i) * 1024;
                e.size = 1024;
                e.split = s.split;
                e.her2 = Her2Level::L1;
                m.entries.push_back(e);
            }
            ++wsi;
        }
        m.validate(1024, 1024);
        const auto summary = m.summary();
        CHECK(summary.train == 3396);
        CHECK(summary.val == 500);
        CHECK(summary.test == 977);
    }
}

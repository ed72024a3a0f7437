#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stainbench/json_io.hpp"

namespace stainbench {

/// HER2 expression level, serialized as "0", "1+", "2+", "3+".
enum class Her2Level { L0, L1, L2, L3 };

std::string to_string(Her2Level level);
Her2Level her2_from_string(const std::string& s);

enum class Split { Train, Val, Test };

std::string to_string(Split split);
Split split_from_string(const std::string& s);

/// One-to-one correspondences between a moving image and a fixed image,
/// in pixel coordinates.
struct LandmarkPair {
    double moving_x = 0;
    double moving_y = 0;
    double fixed_x = 0;
    double fixed_y = 0;
};

struct LandmarkSet {
    std::vector<LandmarkPair> pairs;

    /// >= 4 pairs and pairwise-distinct points on each side; throws otherwise.
    void require_projective_usable() const;

    json_io::json to_json() const;
    static LandmarkSet from_json(const json_io::json& j);
};

struct QcFlags {
    bool tissue_pass = false;
    bool alignment_pass = false;
};

struct PatchEntry {
    std::string patch_id;
    std::string wsi_id;
    std::int64_t origin_x = 0;
    std::int64_t origin_y = 0;
    int size = 0;
    Her2Level her2 = Her2Level::L0;
    Split split = Split::Train;
    QcFlags qc;
};

struct ManifestSummary {
    std::size_t train = 0;
    std::size_t val = 0;
    std::size_t test = 0;
    std::size_t tissue_pass = 0;
    std::size_t alignment_pass = 0;
};

struct PatchManifest {
    std::vector<PatchEntry> entries;

    /// Unique patch ids, origins on the stride grid, uniform patch side.
    void validate(int patch_side, int stride) const;
    ManifestSummary summary() const;

    json_io::json to_json() const;
    static PatchManifest from_json(const json_io::json& j);
};

}  // namespace stainbench

#include "stainbench/types.hpp"

#include <set>
#include <stdexcept>
#include <utility>

namespace stainbench {

std::string to_string(Her2Level level) {
    switch (level) {
        case Her2Level::L0: return "0";
        case Her2Level::L1: return "1+";
        case Her2Level::L2: return "2+";
        case Her2Level::L3: return "3+";
    }
    throw std::logic_error("invalid Her2Level");
}

Her2Level her2_from_string(const std::string& s) {
    if (s == "0") return Her2Level::L0;
    if (s == "1+") return Her2Level::L1;
    if (s == "2+") return Her2Level::L2;
    if (s == "3+") return Her2Level::L3;
    throw std::invalid_argument("unknown HER2 level: " + s);
}

std::string to_string(Split split) {
    switch (split) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        case Split::Test: return "test";
    }
    throw std::logic_error("invalid Split");
}

Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "val") return Split::Val;
    if (s == "test") return Split::Test;
    throw std::invalid_argument("unknown split: " + s);
}

void LandmarkSet::require_projective_usable() const {
    if (pairs.size() < 4) {
        throw std::invalid_argument("insufficient correspondences: need at least 4");
    }
    std::set<std::pair<double, double>> moving, fixed;
    for (const auto& p : pairs) {
        if (!moving.insert({p.moving_x, p.moving_y}).second) {
            throw std::invalid_argument("duplicate moving landmark");
        }
        if (!fixed.insert({p.fixed_x, p.fixed_y}).second) {
            throw std::invalid_argument("duplicate fixed landmark");
        }
    }
}

json_io::json LandmarkSet::to_json() const {
    json_io::json arr = json_io::json::array();
    for (const auto& p : pairs) {
        arr.push_back({{"moving", {p.moving_x, p.moving_y}},
                       {"fixed", {p.fixed_x, p.fixed_y}}});
    }
    return json_io::json{{"pairs", arr}};
}

LandmarkSet LandmarkSet::from_json(const json_io::json& j) {
    LandmarkSet lm;
    for (const auto& e : j.at("pairs")) {
        LandmarkPair p;
        p.moving_x = e.at("moving").at(0).get<double>();
        p.moving_y = e.at("moving").at(1).get<double>();
        p.fixed_x = e.at("fixed").at(0).get<double>();
        p.fixed_y = e.at("fixed").at(1).get<double>();
        lm.pairs.push_back(p);
    }
    return lm;
}

void PatchManifest::validate(int patch_side, int stride) const {
    if (stride <= 0) throw std::invalid_argument("stride must be positive");
    std::set<std::string> ids;
    for (const auto& e : entries) {
        if (!ids.insert(e.patch_id).second) {
            throw std::invalid_argument("duplicate patch_id: " + e.patch_id);
        }
        if (e.size != patch_side) {
            throw std::invalid_argument("patch size mismatch for " + e.patch_id);
        }
        if (e.origin_x % stride != 0 || e.origin_y % stride != 0) {
            throw std::invalid_argument("origin off the stride grid for " + e.patch_id);
        }
    }
}

ManifestSummary PatchManifest::summary() const {
    ManifestSummary s;
    for (const auto& e : entries) {
        switch (e.split) {
            case Split::Train: ++s.train; break;
            case Split::Val: ++s.val; break;
            case Split::Test: ++s.test; break;
        }
        if (e.qc.tissue_pass) ++s.tissue_pass;
        if (e.qc.alignment_pass) ++s.alignment_pass;
    }
    return s;
}

json_io::json PatchManifest::to_json() const {
    json_io::json arr = json_io::json::array();
    for (const auto& e : entries) {
        arr.push_back({{"patch_id", e.patch_id},
                       {"wsi_id", e.wsi_id},
                       {"origin", {e.origin_x, e.origin_y}},
                       {"size", e.size},
                       {"her2", to_string(e.her2)},
                       {"split", to_string(e.split)},
                       {"qc",
                        {{"tissue_pass", e.qc.tissue_pass},
                         {"alignment_pass", e.qc.alignment_pass}}}});
    }
    return json_io::json{{"entries", arr}};
}

PatchManifest PatchManifest::from_json(const json_io::json& j) {
    PatchManifest m;
    for (const auto& e : j.at("entries")) {
        PatchEntry entry;
        entry.patch_id = e.at("patch_id").get<std::string>();
        entry.wsi_id = e.at("wsi_id").get<std::string>();
        entry.origin_x = e.at("origin").at(0).get<std::int64_t>();
        entry.origin_y = e.at("origin").at(1).get<std::int64_t>();
        entry.size = e.at("size").get<int>();
        entry.her2 = her2_from_string(e.at("her2").get<std::string>());
        entry.split = split_from_string(e.at("split").get<std::string>());
        entry.qc.tissue_pass = e.at("qc").at("tissue_pass").get<bool>();
        entry.qc.alignment_pass = e.at("qc").at("alignment_pass").get<bool>();
        m.entries.push_back(std::move(entry));
    }
    return m;
}

}  // namespace stainbench

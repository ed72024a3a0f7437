#include "stainbench/patch.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "stainbench/preprocess.hpp"
#include "stainbench/registration.hpp"

namespace stainbench {

std::vector<PatchPair> patchify(const ImageBuffer& he, const ImageBuffer& ihc,
                                int size, int stride) {
    if (!he.same_shape(ihc)) {
        throw std::invalid_argument("patchify inputs must have identical dimensions");
    }
    if (size <= 0) throw std::invalid_argument("patch size must be positive");
    if (size > std::min(he.width, he.height)) {
        throw std::invalid_argument("patch size exceeds image dimensions");
    }
    if (stride <= 0) stride = size;

    std::vector<PatchPair> patches;
    for (int y = 0; y + size <= he.height; y += stride) {
        for (int x = 0; x + size <= he.width; x += stride) {
            const TileRect rect{x, y, size, size};
            patches.push_back({crop(he, rect), crop(ihc, rect), x, y});
        }
    }
    return patches;
}

TissueFilterResult tissue_filter(const ImageBuffer& patch, const TissueFilterConfig& cfg) {
    if (patch.channels != 3) {
        throw std::invalid_argument("tissue filter needs an RGB patch");
    }
    const std::size_t n = static_cast<std::size_t>(patch.width) * patch.height;
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = patch.value255(i * 3) / 255.0;
        const double g = patch.value255(i * 3 + 1) / 255.0;
        const double b = patch.value255(i * 3 + 2) / 255.0;
        const double maxc = std::max({r, g, b});
        const double minc = std::min({r, g, b});
        const double sat = maxc > 0.0 ? (maxc - minc) / maxc : 0.0;
        if (sat > cfg.sat_thresh && maxc < 0.95) ++positive;
    }
    TissueFilterResult result;
    result.fraction = static_cast<double>(positive) / n;
    result.pass = result.fraction >= cfg.frac_thresh;
    return result;
}

AlignmentFilterResult alignment_filter(const ImageBuffer& patch_he,
                                       const ImageBuffer& patch_ihc,
                                       const AlignmentFilterConfig& cfg) {
    if (!patch_he.same_shape(patch_ihc)) {
        throw std::invalid_argument("alignment filter inputs must have identical dimensions");
    }
    const auto score = ncc(ncc_preprocess(patch_he), ncc_preprocess(patch_ihc));
    AlignmentFilterResult result;
    result.score = score.value_or(0.0);
    result.pass = score.has_value() && result.score >= cfg.ncc_thresh;
    return result;
}

PatchManifest build_manifest(const std::vector<PatchRecord>& patches,
                             const std::map<std::string, Her2Level>& labels,
                             const std::map<std::string, Split>& splits) {
    PatchManifest manifest;
    std::set<std::string> seen;
    for (const auto& p : patches) {
        const auto label = labels.find(p.wsi_id);
        if (label == labels.end()) {
            throw std::invalid_argument("missing HER2 label for WSI " + p.wsi_id);
        }
        const auto split = splits.find(p.wsi_id);
        if (split == splits.end()) {
            throw std::invalid_argument("missing split assignment for WSI " + p.wsi_id);
        }
        PatchEntry entry;
        entry.patch_id =
            p.wsi_id + "_" + std::to_string(p.x) + "_" + std::to_string(p.y);
        if (!seen.insert(entry.patch_id).second) {
            throw std::invalid_argument("duplicate patch_id: " + entry.patch_id);
        }
        entry.wsi_id = p.wsi_id;
        entry.origin_x = p.x;
        entry.origin_y = p.y;
        entry.size = p.size;
        entry.her2 = label->second;
        entry.split = split->second;
        entry.qc = p.qc;
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

}  // namespace stainbench

#pragma once

#include <map>
#include <string>
#include <vector>

#include "stainbench/image.hpp"
#include "stainbench/types.hpp"

namespace stainbench {

struct PatchPair {
    ImageBuffer he;
    ImageBuffer ihc;
    int x = 0;
    int y = 0;
};

/// Non-overlapping by default (stride <= 0 means stride = size). Grid patches
/// fully inside the image, row-major; partial edge patches are dropped.
std::vector<PatchPair> patchify(const ImageBuffer& he, const ImageBuffer& ihc,
                                int size = 1024, int stride = 0);

struct TissueFilterConfig {
    double sat_thresh = 0.07;
    double frac_thresh = 0.5;
};

struct TissueFilterResult {
    bool pass = false;
    double fraction = 0.0;
};

/// Stain heuristic: a pixel is tissue-positive when HSV saturation exceeds
/// sat_thresh and value is below 0.95.
TissueFilterResult tissue_filter(const ImageBuffer& patch,
                                 const TissueFilterConfig& cfg = {});

struct AlignmentFilterConfig {
    double ncc_thresh = 0.2;
};

struct AlignmentFilterResult {
    bool pass = false;
    double score = 0.0;
};

/// NCC of the registration-preprocessed patches; zero-variance patches fail
/// with score 0.
AlignmentFilterResult alignment_filter(const ImageBuffer& patch_he,
                                       const ImageBuffer& patch_ihc,
                                       const AlignmentFilterConfig& cfg = {});

struct PatchRecord {
    std::string wsi_id;
    int x = 0;
    int y = 0;
    int size = 0;
    QcFlags qc;
};

PatchManifest build_manifest(const std::vector<PatchRecord>& patches,
                             const std::map<std::string, Her2Level>& labels,
                             const std::map<std::string, Split>& splits);

}  // namespace stainbench

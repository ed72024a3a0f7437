#pragma once

#include <string>
#include <vector>

#include "stainbench/json_io.hpp"
#include "stainbench/types.hpp"

namespace stainbench {

struct TeamEntry {
    std::string team;
    double mean_psnr_db = 0.0;
    double mean_ssim = 0.0;
};

struct LeaderboardRow {
    std::string team;
    double mean_psnr_db = 0.0;
    double rank_psnr = 0.0;
    double mean_ssim = 0.0;
    double rank_ssim = 0.0;
    double final_score = 0.0;
    int final_rank = 0;
};

struct Leaderboard {
    std::vector<LeaderboardRow> rows;

    json_io::json to_json() const;
};

/// Per-metric ranks descend with the metric value (best metric -> rank 1),
/// ties get the fractional average rank. The final score is
/// 0.4*rank_psnr + 0.6*rank_ssim, ordered ascending; final-score ties break
/// by higher SSIM, then team name.
Leaderboard rank_teams(std::vector<TeamEntry> entries);

struct ValidateConfig {
    // Calibrated once on synthetic sharp vs sigma-2 blurred texture patches;
    // sharp patches score orders of magnitude above this, blurred ones below.
    double blur_thresh = 50.0;
    double coverage = 1.0;
    int threads = 1;
};

struct ImageFlag {
    std::string patch_id;
    std::string reason;
};

struct Verdict {
    bool valid = true;
    std::vector<std::string> reasons;
    std::vector<ImageFlag> flags;

    json_io::json to_json() const;
};

/// A submission is invalid when expected test ids are missing beyond the
/// coverage allowance, any image is unreadable or has the wrong size, or
/// more than 10% of the images fall below the blur threshold.
Verdict validate_submission(const std::string& pred_dir, const PatchManifest& manifest,
                            const ValidateConfig& cfg = {});

}  // namespace stainbench

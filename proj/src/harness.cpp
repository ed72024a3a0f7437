#include "stainbench/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "stainbench/io.hpp"
#include "stainbench/metrics.hpp"
#include "stainbench/parallel.hpp"

namespace stainbench {

namespace {

// Fractional (average) ranks for descending metric order.
std::vector<double> fractional_ranks_desc(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<double> ranks(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t better = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (values[j] > values[i]) ++better;
            else if (values[j] == values[i]) ++equal;
        }
        ranks[i] = better + 1 + (equal - 1) / 2.0;
    }
    return ranks;
}

}  // namespace

Leaderboard rank_teams(std::vector<TeamEntry> entries) {
    if (entries.empty()) throw std::invalid_argument("no team entries");
    std::set<std::string> names;
    for (const auto& e : entries) {
        if (!names.insert(e.team).second) {
            throw std::invalid_argument("duplicate team: " + e.team);
        }
        if (std::isnan(e.mean_ssim) || std::isinf(e.mean_ssim)) {
            throw std::invalid_argument("non-finite SSIM for team " + e.team);
        }
        if (std::isnan(e.mean_psnr_db)) {
            throw std::invalid_argument("NaN PSNR for team " + e.team);
        }
    }

    std::vector<double> psnr_values, ssim_values;
    for (const auto& e : entries) {
        psnr_values.push_back(e.mean_psnr_db);
        ssim_values.push_back(e.mean_ssim);
    }
    const auto rank_psnr = fractional_ranks_desc(psnr_values);
    const auto rank_ssim = fractional_ranks_desc(ssim_values);

    Leaderboard lb;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        LeaderboardRow row;
        row.team = entries[i].team;
        row.mean_psnr_db = entries[i].mean_psnr_db;
        row.rank_psnr = rank_psnr[i];
        row.mean_ssim = entries[i].mean_ssim;
        row.rank_ssim = rank_ssim[i];
        row.final_score = 0.4 * row.rank_psnr + 0.6 * row.rank_ssim;
        lb.rows.push_back(std::move(row));
    }
    std::sort(lb.rows.begin(), lb.rows.end(),
              [](const LeaderboardRow& a, const LeaderboardRow& b) {
                  if (a.final_score != b.final_score) return a.final_score < b.final_score;
                  if (a.mean_ssim != b.mean_ssim) return a.mean_ssim > b.mean_ssim;
                  return a.team < b.team;
              });
    for (std::size_t i = 0; i < lb.rows.size(); ++i) {
        lb.rows[i].final_rank = static_cast<int>(i + 1);
    }
    return lb;
}

json_io::json Leaderboard::to_json() const {
    json_io::json arr = json_io::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"team", r.team},
                       {"mean_psnr_db", json_io::number(r.mean_psnr_db)},
                       {"rank_psnr", json_io::number(r.rank_psnr)},
                       {"mean_ssim", json_io::number(r.mean_ssim)},
                       {"rank_ssim", json_io::number(r.rank_ssim)},
                       {"final_score", json_io::number(r.final_score)},
                       {"final_rank", r.final_rank}});
    }
    return json_io::json{{"rows", arr}};
}

json_io::json Verdict::to_json() const {
    json_io::json flag_arr = json_io::json::array();
    for (const auto& f : flags) {
        flag_arr.push_back({{"patch_id", f.patch_id}, {"reason", f.reason}});
    }
    return json_io::json{
        {"valid", valid}, {"reasons", reasons}, {"flags", flag_arr}};
}

Verdict validate_submission(const std::string& pred_dir, const PatchManifest& manifest,
                            const ValidateConfig& cfg) {
    namespace fs = std::filesystem;
    Verdict verdict;

    std::vector<const PatchEntry*> expected;
    for (const auto& e : manifest.entries) {
        if (e.split == Split::Test) expected.push_back(&e);
    }
    if (expected.empty()) {
        verdict.valid = false;
        verdict.reasons.push_back("manifest lists no test ids");
        return verdict;
    }

    struct Check {
        bool missing = false;
        bool unreadable = false;
        bool wrong_size = false;
        bool blurry = false;
    };
    std::vector<Check> checks(expected.size());
    parallel_for(expected.size(), cfg.threads, [&](std::size_t i) {
        const PatchEntry& e = *expected[i];
        const fs::path path = fs::path(pred_dir) / (e.patch_id + ".png");
        if (!fs::exists(path)) {
            checks[i].missing = true;
            return;
        }
        try {
            const ImageBuffer img = load_image(path.string());
            if (img.width != e.size || img.height != e.size) {
                checks[i].wrong_size = true;
                return;
            }
            if (blur_score(img) < cfg.blur_thresh) checks[i].blurry = true;
        } catch (const std::exception&) {
            checks[i].unreadable = true;
        }
    });

    std::size_t missing = 0, unreadable = 0, wrong_size = 0, blurry = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const auto& c = checks[i];
        if (c.missing) { ++missing; verdict.flags.push_back({expected[i]->patch_id, "missing"}); }
        if (c.unreadable) { ++unreadable; verdict.flags.push_back({expected[i]->patch_id, "unreadable"}); }
        if (c.wrong_size) { ++wrong_size; verdict.flags.push_back({expected[i]->patch_id, "wrong size"}); }
        if (c.blurry) { verdict.flags.push_back({expected[i]->patch_id, "blur"}); ++blurry; }
    }

    const double present_fraction =
        1.0 - static_cast<double>(missing) / expected.size();
    if (present_fraction < cfg.coverage) {
        verdict.valid = false;
        verdict.reasons.push_back("missing");
    }
    if (unreadable > 0) {
        verdict.valid = false;
        verdict.reasons.push_back("unreadable");
    }
    if (wrong_size > 0) {
        verdict.valid = false;
        verdict.reasons.push_back("wrong size");
    }
    const std::size_t scored = expected.size() - missing - unreadable;
    if (scored > 0 && static_cast<double>(blurry) / scored > 0.10) {
        verdict.valid = false;
        verdict.reasons.push_back("blur");
    }
    return verdict;
}

}  // namespace stainbench

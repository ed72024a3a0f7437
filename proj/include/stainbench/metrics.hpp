#pragma once

#include <string>
#include <vector>

#include "stainbench/image.hpp"
#include "stainbench/json_io.hpp"

namespace stainbench {

struct SsimParams {
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
    int window = 11;
    double sigma = 1.5;
    // Audit mode: evaluate the denominator with the variance product
    // (sigma_x^2 * sigma_y^2 + C2) instead of the sum. Breaks ssim(x,x)=1
    // for non-unit variance; off by default.
    bool printed_denominator = false;

    double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
    double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

/// Mean squared difference over all samples on the [0,255] scale.
double mse(const ImageBuffer& x, const ImageBuffer& y);

/// 10*log10(255^2 / MSE); +inf for identical images.
double psnr(const ImageBuffer& x, const ImageBuffer& y);

/// Single SSIM from whole-image statistics on Rec. 601 luminance.
double ssim_global(const ImageBuffer& x, const ImageBuffer& y,
                   const SsimParams& p = {});

/// Mean of local SSIM over all valid Gaussian-weighted windows (no padding).
double ssim_windowed(const ImageBuffer& x, const ImageBuffer& y,
                     const SsimParams& p = {});

/// Variance of the 3x3 Laplacian response (center 4, cross -1) on luminance.
double blur_score(const ImageBuffer& img);

struct MetricItem {
    std::string id;
    double psnr_db = 0.0;
    double ssim = 0.0;
    bool flagged = false;
    std::string flag_reason;
};

struct MetricAggregate {
    double mean_psnr_db = 0.0;  // over finite PSNR entries
    double mean_ssim = 0.0;
    std::size_t count = 0;  // scored images
    std::size_t psnr_inf_count = 0;
    std::size_t flagged_count = 0;
};

struct MetricReport {
    std::vector<MetricItem> per_image;
    MetricAggregate aggregate;

    json_io::json to_json() const;
    static MetricReport from_json(const json_io::json& j);
};

struct EvaluateOptions {
    bool windowed_ssim = true;
    SsimParams ssim;
    int threads = 1;
};

/// Scores every prediction against the same-named ground truth file.
/// Unmatched or mismatched items are flagged and the run continues.
MetricReport evaluate_set(const std::string& pred_dir, const std::string& gt_dir,
                          const EvaluateOptions& opts = {});

/// Aggregation used by evaluate_set, exposed for report assembly from
/// precomputed per-image scores.
MetricAggregate aggregate_items(const std::vector<MetricItem>& items);

}  // namespace stainbench

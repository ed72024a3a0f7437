#include "stainbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "stainbench/io.hpp"
#include "stainbench/parallel.hpp"

namespace stainbench {

namespace {

void require_same_shape(const ImageBuffer& x, const ImageBuffer& y) {
    if (!x.same_shape(y)) {
        throw std::invalid_argument("metric inputs must have identical dimensions");
    }
}

double ssim_formula(double mx, double my, double vx, double vy, double cov,
                    const SsimParams& p) {
    const double c1 = p.c1();
    const double c2 = p.c2();
    const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
    const double var_term = p.printed_denominator ? vx * vy : vx + vy;
    const double den = (mx * mx + my * my + c1) * (var_term + c2);
    return num / den;
}

}  // namespace

double mse(const ImageBuffer& x, const ImageBuffer& y) {
    require_same_shape(x, y);
    const std::size_t n = x.sample_count();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = x.value255(i) - y.value255(i);
        acc += d * d;
    }
    return acc / n;
}

double psnr(const ImageBuffer& x, const ImageBuffer& y) {
    const double err = mse(x, y);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / err);
}

double ssim_global(const ImageBuffer& x, const ImageBuffer& y, const SsimParams& p) {
    require_same_shape(x, y);
    const auto lx = luminance255(x);
    const auto ly = luminance255(y);
    const std::size_t n = lx.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += lx[i];
        sy += ly[i];
    }
    const double mx = sx / n, my = sy / n;
    double vx = 0.0, vy = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = lx[i] - mx;
        const double dy = ly[i] - my;
        vx += dx * dx;
        vy += dy * dy;
        cov += dx * dy;
    }
    vx /= n;
    vy /= n;
    cov /= n;
    return ssim_formula(mx, my, vx, vy, cov, p);
}

double ssim_windowed(const ImageBuffer& x, const ImageBuffer& y, const SsimParams& p) {
    require_same_shape(x, y);
    const int w = x.width, h = x.height;
    const int side = p.window;
    if (w < side || h < side) {
        throw std::invalid_argument("image smaller than the SSIM window");
    }
    const auto lx = luminance255(x);
    const auto ly = luminance255(y);

    // normalized separable Gaussian window
    std::vector<double> g(side);
    const double center = (side - 1) / 2.0;
    double gsum = 0.0;
    for (int i = 0; i < side; ++i) {
        g[i] = std::exp(-0.5 * (i - center) * (i - center) / (p.sigma * p.sigma));
        gsum += g[i];
    }
    for (auto& v : g) v /= gsum;

    double total = 0.0;
    std::size_t windows = 0;
    for (int wy = 0; wy + side <= h; ++wy) {
        for (int wx = 0; wx + side <= w; ++wx) {
            double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (int j = 0; j < side; ++j) {
                const std::size_t row = static_cast<std::size_t>(wy + j) * w + wx;
                for (int i = 0; i < side; ++i) {
                    const double weight = g[j] * g[i];
                    const double a = lx[row + i];
                    const double b = ly[row + i];
                    mx += weight * a;
                    my += weight * b;
                    sxx += weight * a * a;
                    syy += weight * b * b;
                    sxy += weight * a * b;
                }
            }
            const double vx = sxx - mx * mx;
            const double vy = syy - my * my;
            const double cov = sxy - mx * my;
            total += ssim_formula(mx, my, vx, vy, cov, p);
            ++windows;
        }
    }
    return total / windows;
}

double blur_score(const ImageBuffer& img) {
    if (img.width < 3 || img.height < 3) return 0.0;
    const auto lum = luminance255(img);
    const int w = img.width, h = img.height;
    double sum = 0.0, sum2 = 0.0;
    const std::size_t n = static_cast<std::size_t>(w - 2) * (h - 2);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double r = 4.0 * lum[i] - lum[i - 1] - lum[i + 1] - lum[i - w] - lum[i + w];
            sum += r;
            sum2 += r * r;
        }
    }
    const double mean = sum / n;
    return sum2 / n - mean * mean;
}

MetricAggregate aggregate_items(const std::vector<MetricItem>& items) {
    MetricAggregate agg;
    double psnr_sum = 0.0, ssim_sum = 0.0;
    std::size_t psnr_finite = 0;
    for (const auto& item : items) {
        if (item.flagged) {
            ++agg.flagged_count;
            continue;
        }
        ++agg.count;
        ssim_sum += item.ssim;
        if (std::isinf(item.psnr_db)) {
            ++agg.psnr_inf_count;
        } else {
            psnr_sum += item.psnr_db;
            ++psnr_finite;
        }
    }
    agg.mean_psnr_db = psnr_finite ? psnr_sum / psnr_finite
                                   : (agg.psnr_inf_count
                                          ? std::numeric_limits<double>::infinity()
                                          : 0.0);
    agg.mean_ssim = agg.count ? ssim_sum / agg.count : 0.0;
    return agg;
}

json_io::json MetricReport::to_json() const {
    json_io::json items = json_io::json::array();
    for (const auto& item : per_image) {
        json_io::json j{{"id", item.id},
                        {"psnr_db", json_io::number(item.psnr_db)},
                        {"ssim", json_io::number(item.ssim)}};
        if (item.flagged) {
            j["flagged"] = true;
            j["reason"] = item.flag_reason;
        }
        items.push_back(std::move(j));
    }
    return json_io::json{
        {"per_image", items},
        {"aggregate",
         {{"mean_psnr_db", json_io::number(aggregate.mean_psnr_db)},
          {"mean_ssim", json_io::number(aggregate.mean_ssim)},
          {"count", aggregate.count},
          {"psnr_inf_count", aggregate.psnr_inf_count},
          {"flagged_count", aggregate.flagged_count}}}};
}

MetricReport MetricReport::from_json(const json_io::json& j) {
    MetricReport report;
    for (const auto& e : j.at("per_image")) {
        MetricItem item;
        item.id = e.at("id").get<std::string>();
        item.psnr_db = json_io::to_double(e.at("psnr_db"));
        item.ssim = json_io::to_double(e.at("ssim"));
        if (e.contains("flagged")) {
            item.flagged = e.at("flagged").get<bool>();
            item.flag_reason = e.value("reason", "");
        }
        report.per_image.push_back(std::move(item));
    }
    const auto& agg = j.at("aggregate");
    report.aggregate.mean_psnr_db = json_io::to_double(agg.at("mean_psnr_db"));
    report.aggregate.mean_ssim = json_io::to_double(agg.at("mean_ssim"));
    report.aggregate.count = agg.at("count").get<std::size_t>();
    report.aggregate.psnr_inf_count = agg.at("psnr_inf_count").get<std::size_t>();
    report.aggregate.flagged_count = agg.at("flagged_count").get<std::size_t>();
    return report;
}

MetricReport evaluate_set(const std::string& pred_dir, const std::string& gt_dir,
                          const EvaluateOptions& opts) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(pred_dir)) {
        throw std::runtime_error("prediction directory not found: " + pred_dir);
    }
    if (!fs::is_directory(gt_dir)) {
        throw std::runtime_error("ground-truth directory not found: " + gt_dir);
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(pred_dir)) {
        if (entry.is_regular_file()) names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());

    MetricReport report;
    report.per_image.resize(names.size());
    parallel_for(names.size(), opts.threads, [&](std::size_t i) {
        MetricItem item;
        item.id = names[i];
        const fs::path gt_path = fs::path(gt_dir) / names[i];
        try {
            if (!fs::exists(gt_path)) {
                throw std::runtime_error("no matching ground-truth file");
            }
            const ImageBuffer pred = load_image((fs::path(pred_dir) / names[i]).string());
            const ImageBuffer gt = load_image(gt_path.string());
            item.psnr_db = psnr(pred, gt);
            item.ssim = opts.windowed_ssim ? ssim_windowed(pred, gt, opts.ssim)
                                           : ssim_global(pred, gt, opts.ssim);
        } catch (const std::exception& e) {
            item.flagged = true;
            item.flag_reason = e.what();
        }
        report.per_image[i] = std::move(item);
    });
    report.aggregate = aggregate_items(report.per_image);
    return report;
}

}  // namespace stainbench

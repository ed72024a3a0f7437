#include "stainbench/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stainbench/metrics.hpp"

namespace stainbench {

namespace {

constexpr double kLogClamp = 1e-12;

double clamped_log(double p, bool& clamped) {
    if (p <= kLogClamp) {
        clamped = true;
        p = kLogClamp;
    }
    return std::log(p);
}

double mean_abs_diff255(const ImageBuffer& a, const ImageBuffer& b) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument("loss inputs must have identical dimensions");
    }
    const std::size_t n = a.sample_count();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(a.value255(i) - b.value255(i));
    return acc / n;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> l2_normalized(const std::vector<double>& v) {
    const double norm = std::sqrt(dot(v, v));
    if (norm <= 0.0) throw std::invalid_argument("zero vector");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
    return out;
}

double lsgan_mean_sq(const Tensor& t, double target) {
    if (t.data.empty()) {
        throw std::invalid_argument("scale set must provide both full and half maps");
    }
    double acc = 0.0;
    for (float v : t.data) {
        const double d = v - target;
        acc += d * d;
    }
    return acc / t.data.size();
}

void check_probability_vector(const std::vector<double>& p, const char* what) {
    if (p.size() < 2) throw std::invalid_argument(std::string(what) + " needs >= 2 classes");
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || v > 1.0) {
            throw std::invalid_argument(std::string(what) + " entries must lie in [0,1]");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
        throw std::invalid_argument(std::string(what) + " must sum to 1");
    }
}

}  // namespace

std::vector<double> softmax_probs(const std::vector<double>& logits) {
    if (logits.size() < 2) throw std::invalid_argument("softmax needs >= 2 entries");
    double maxval = logits[0];
    for (double v : logits) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite logit");
        maxval = std::max(maxval, v);
    }
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - maxval);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

double focal_loss(const std::vector<double>& logits, int y, const FocalParams& p) {
    const std::size_t n = logits.size();
    if (p.alpha.size() != n) {
        throw std::invalid_argument("alpha length must match the class count");
    }
    if (y < 1 || static_cast<std::size_t>(y) > n) {
        throw std::invalid_argument("class index out of range");
    }
    if (p.gamma < 0.0) throw std::invalid_argument("gamma must be >= 0");
    const auto probs = softmax_probs(logits);
    double acc = 0.0;
    bool clamped = false;
    for (std::size_t k = 0; k < n; ++k) {
        const double ptn = (static_cast<std::size_t>(y) == k + 1) ? probs[k] : 1.0 - probs[k];
        acc += -p.alpha[k] * std::pow(1.0 - ptn, p.gamma) * clamped_log(ptn, clamped);
    }
    return acc / static_cast<double>(n);
}

double cosine_sim_loss(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("vectors must have equal nonzero length");
    }
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("zero vector");
    return 1.0 - dot(a, b) / (na * nb);
}

double mae_content(const ImageBuffer& pred_full, const ImageBuffer& gt_full,
                   const ImageBuffer& pred_low, const ImageBuffer& gt_low) {
    return mean_abs_diff255(pred_full, gt_full) + mean_abs_diff255(pred_low, gt_low);
}

double ssim_loss(const ImageBuffer& pred, const ImageBuffer& gt) {
    return 1.0 - ssim_windowed(pred, gt);
}

double patchgan_ms_loss(const MultiScaleMaps& d_real, const MultiScaleMaps& d_fake,
                        GanSide side) {
    if (side == GanSide::Generator) {
        return 0.5 * (lsgan_mean_sq(d_fake.full, 1.0) + lsgan_mean_sq(d_fake.half, 1.0));
    }
    if (d_real.full.data.size() != d_fake.full.data.size() ||
        d_real.half.data.size() != d_fake.half.data.size()) {
        throw std::invalid_argument("real/fake maps must match per scale");
    }
    const double full = 0.5 * (lsgan_mean_sq(d_real.full, 1.0) + lsgan_mean_sq(d_fake.full, 0.0));
    const double half = 0.5 * (lsgan_mean_sq(d_real.half, 1.0) + lsgan_mean_sq(d_fake.half, 0.0));
    return 0.5 * (full + half);
}

double LossWeights::weight(const std::string& name) const {
    const auto it = lambda.find(name);
    return it == lambda.end() ? 1.0 : it->second;
}

LossWeights LossWeights::preset(const std::string& name) {
    if (name == "lifangda02") {
        return {{{"GAN", 1.0},
                 {"NCE", 10.0},
                 {"pNCE", 10.0},
                 {"dis-cls", 2.0},
                 {"multi-scale", 20.0}}};
    }
    throw std::invalid_argument("unknown weight preset: " + name);
}

double combine_weighted(const std::map<std::string, double>& terms,
                        const LossWeights& weights) {
    double acc = 0.0;
    for (const auto& [name, value] : terms) {
        const double w = weights.weight(name);
        if (!std::isfinite(w)) throw std::invalid_argument("non-finite weight for " + name);
        acc += w * value;
    }
    return acc;
}

double infonce_loss(const std::vector<double>& query, const std::vector<double>& positive,
                    const std::vector<std::vector<double>>& negatives, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
    if (negatives.empty()) throw std::invalid_argument("at least one negative is required");
    const auto q = l2_normalized(query);
    const auto k_pos = l2_normalized(positive);
    if (q.size() != k_pos.size()) {
        throw std::invalid_argument("embedding lengths must match");
    }
    std::vector<double> logits;
    logits.push_back(dot(q, k_pos) / tau);
    for (const auto& neg : negatives) {
        const auto k = l2_normalized(neg);
        if (k.size() != q.size()) {
            throw std::invalid_argument("embedding lengths must match");
        }
        logits.push_back(dot(q, k) / tau);
    }
    // -log softmax(positive) via log-sum-exp
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - m);
    return -(logits[0] - m - std::log(sum));
}

std::vector<double> luminance_histogram(const ImageBuffer& img) {
    std::vector<double> hist(256, 0.0);
    const auto lum = luminance255(img);
    for (double v : lum) {
        int bin = static_cast<int>(std::lround(v));
        bin = std::clamp(bin, 0, 255);
        hist[bin] += 1.0;
    }
    for (auto& h : hist) h /= static_cast<double>(lum.size());
    return hist;
}

double wecrest_qi(const ImageBuffer& source, const ImageBuffer& target,
                  const std::vector<std::vector<double>>& histograms, std::size_t i) {
    if (!source.same_shape(target)) {
        throw std::invalid_argument("source and target must have identical dimensions");
    }
    if (histograms.empty()) throw std::invalid_argument("histogram set is empty");
    if (i >= histograms.size()) throw std::invalid_argument("histogram index out of range");
    for (const auto& h : histograms) {
        if (h.size() != 256) throw std::invalid_argument("histograms must have 256 bins");
    }

    const auto ls = luminance255(source);
    const auto lt = luminance255(target);
    const std::size_t n = ls.size();
    double ms = 0.0, mt = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        ms += ls[k];
        mt += lt[k];
    }
    ms /= n;
    mt /= n;
    double vs = 0.0, vt = 0.0, cov = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double a = ls[k] - ms;
        const double b = lt[k] - mt;
        vs += a * a;
        vt += b * b;
        cov += a * b;
    }
    const double corr = (vs > 0.0 && vt > 0.0) ? cov / std::sqrt(vs * vt) : 0.0;

    double dot_sum = 0.0;
    for (const auto& h : histograms) {
        for (int b = 0; b < 256; ++b) dot_sum += histograms[i][b] * h[b];
    }
    if (dot_sum <= 0.0) throw std::invalid_argument("histogram overlap is zero");
    return (1.0 + corr) / std::sqrt(dot_sum);
}

ClampedValue style_adversarial_loss(const std::vector<double>& d_probs_real,
                                    std::size_t real_style,
                                    const std::vector<double>& d_probs_fake,
                                    std::size_t fake_index) {
    check_probability_vector(d_probs_real, "real style probabilities");
    check_probability_vector(d_probs_fake, "fake style probabilities");
    if (d_probs_real.size() != d_probs_fake.size()) {
        throw std::invalid_argument("style probability vectors must have equal length");
    }
    if (real_style >= d_probs_real.size() || fake_index >= d_probs_fake.size()) {
        throw std::invalid_argument("style index out of range");
    }
    ClampedValue out;
    out.value = -(clamped_log(d_probs_real[real_style], out.clamped) +
                  clamped_log(d_probs_fake[fake_index], out.clamped));
    return out;
}

double cycle_l1(const ImageBuffer& original, const ImageBuffer& reconstructed) {
    return mean_abs_diff255(original, reconstructed);
}

ClampedValue pix2pix_gen_loss(double d_fake, const ImageBuffer& pred,
                              const ImageBuffer& gt, double lambda) {
    if (d_fake < 0.0 || d_fake > 1.0) {
        throw std::invalid_argument("discriminator output must lie in [0,1]");
    }
    ClampedValue out;
    out.value = -clamped_log(d_fake, out.clamped) + lambda * mean_abs_diff255(gt, pred);
    return out;
}

ClampedValue pix2pix_dis_loss(double d_real, double d_fake, double lambda) {
    if (d_real < 0.0 || d_real > 1.0 || d_fake < 0.0 || d_fake > 1.0) {
        throw std::invalid_argument("discriminator outputs must lie in [0,1]");
    }
    ClampedValue out;
    out.value = -clamped_log(d_real, out.clamped) +
                lambda * (-clamped_log(1.0 - d_fake, out.clamped));
    return out;
}

Tensor DwtPlanes::to_tensor() const {
    Tensor t;
    t.dims = {static_cast<std::uint32_t>(4 * channels), static_cast<std::uint32_t>(half_h),
              static_cast<std::uint32_t>(half_w)};
    t.data.assign(data.begin(), data.end());
    return t;
}

DwtPlanes DwtPlanes::from_tensor(const Tensor& t) {
    if (t.dims.size() != 3 || t.dims[0] % 4 != 0 || t.dims[0] == 0) {
        throw std::invalid_argument("expected a [4k, h/2, w/2] coefficient tensor");
    }
    DwtPlanes p;
    p.channels = static_cast<int>(t.dims[0] / 4);
    p.half_h = static_cast<int>(t.dims[1]);
    p.half_w = static_cast<int>(t.dims[2]);
    p.data = t.as_doubles();
    return p;
}

DwtPlanes dwt_haar_plane(const std::vector<double>& values, int width, int height) {
    if (width <= 0 || height <= 0 || width % 2 != 0 || height % 2 != 0) {
        throw std::invalid_argument("DWT needs even, positive dimensions");
    }
    if (values.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("plane size does not match dimensions");
    }
    DwtPlanes p;
    p.channels = 1;
    p.half_w = width / 2;
    p.half_h = height / 2;
    p.data.assign(4 * p.plane_size(), 0.0);
    const std::size_t plane = p.plane_size();
    for (int y = 0; y < p.half_h; ++y) {
        for (int x = 0; x < p.half_w; ++x) {
            const std::size_t base = static_cast<std::size_t>(2 * y) * width + 2 * x;
            const double a = values[base];
            const double b = values[base + 1];
            const double c = values[base + width];
            const double d = values[base + width + 1];
            const std::size_t o = static_cast<std::size_t>(y) * p.half_w + x;
            p.data[o] = (a + b + c + d) / 2.0;              // LL
            p.data[plane + o] = (a + b - c - d) / 2.0;      // LH
            p.data[2 * plane + o] = (a - b + c - d) / 2.0;  // HL
            p.data[3 * plane + o] = (a - b - c + d) / 2.0;  // HH
        }
    }
    return p;
}

DwtPlanes dwt_haar(const ImageBuffer& img, bool per_channel) {
    if (img.width % 2 != 0 || img.height % 2 != 0) {
        throw std::invalid_argument("DWT needs even image dimensions");
    }
    if (!per_channel || img.channels == 1) {
        const auto lum = luminance255(img);
        std::vector<double> unit(lum.size());
        for (std::size_t i = 0; i < lum.size(); ++i) unit[i] = lum[i] / 255.0;
        return dwt_haar_plane(unit, img.width, img.height);
    }
    DwtPlanes out;
    out.channels = img.channels;
    out.half_w = img.width / 2;
    out.half_h = img.height / 2;
    out.data.reserve(static_cast<std::size_t>(4 * img.channels) * out.plane_size());
    std::vector<double> plane(static_cast<std::size_t>(img.width) * img.height);
    for (int c = 0; c < img.channels; ++c) {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                plane[static_cast<std::size_t>(y) * img.width + x] =
                    img.value255(x, y, c) / 255.0;
            }
        }
        const DwtPlanes sub = dwt_haar_plane(plane, img.width, img.height);
        out.data.insert(out.data.end(), sub.data.begin(), sub.data.end());
    }
    return out;
}

ImageBuffer idwt_haar(const DwtPlanes& planes) {
    if (planes.channels != 1 && planes.channels != 3) {
        throw std::invalid_argument("expected 1 or 3 input channels");
    }
    const int hw = planes.half_w, hh = planes.half_h;
    const int width = 2 * hw, height = 2 * hh;
    ImageBuffer out = ImageBuffer::real(width, height, planes.channels);
    const std::size_t plane = planes.plane_size();
    for (int c = 0; c < planes.channels; ++c) {
        const double* base_ptr = planes.data.data() + static_cast<std::size_t>(4) * c * plane;
        for (int y = 0; y < hh; ++y) {
            for (int x = 0; x < hw; ++x) {
                const std::size_t o = static_cast<std::size_t>(y) * hw + x;
                const double ll = base_ptr[o];
                const double lh = base_ptr[plane + o];
                const double hl = base_ptr[2 * plane + o];
                const double hhv = base_ptr[3 * plane + o];
                out.atr(2 * x, 2 * y, c) = (ll + lh + hl + hhv) / 2.0;
                out.atr(2 * x + 1, 2 * y, c) = (ll + lh - hl - hhv) / 2.0;
                out.atr(2 * x, 2 * y + 1, c) = (ll - lh + hl - hhv) / 2.0;
                out.atr(2 * x + 1, 2 * y + 1, c) = (ll - lh - hl + hhv) / 2.0;
            }
        }
    }
    return out;
}

}  // namespace stainbench

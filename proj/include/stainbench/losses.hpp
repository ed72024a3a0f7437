#pragma once

#include <map>
#include <string>
#include <vector>

#include "stainbench/image.hpp"
#include "stainbench/io.hpp"

namespace stainbench {

/// Numerically stable softmax (max-subtracted); needs >= 2 finite entries.
std::vector<double> softmax_probs(const std::vector<double>& logits);

struct FocalParams {
    std::vector<double> alpha;  // one weight per class
    double gamma = 0.0;
};

/// Class-averaged focal loss: mean over classes n of
/// -alpha_n * (1 - p_t,n)^gamma * log(p_t,n), with p_t,n = p_n for the true
/// class and 1 - p_n otherwise. Note this averages over every class, the
/// non-target classes entering through 1 - p_n; it is not the single-term
/// textbook focal loss. Logs clamp at 1e-12. `y` is 1-based.
double focal_loss(const std::vector<double>& logits, int y, const FocalParams& p);

/// 1 - cosine similarity; range [0,2]. Throws on zero-norm input.
double cosine_sim_loss(const std::vector<double>& a, const std::vector<double>& b);

/// Mean absolute difference of the full-resolution pair plus mean absolute
/// difference of the low-resolution pair, on the [0,255] scale.
double mae_content(const ImageBuffer& pred_full, const ImageBuffer& gt_full,
                   const ImageBuffer& pred_low, const ImageBuffer& gt_low);

/// 1 - windowed SSIM.
double ssim_loss(const ImageBuffer& pred, const ImageBuffer& gt);

enum class GanSide { Generator, Discriminator };

/// Discriminator score maps at the full and half scale.
struct MultiScaleMaps {
    Tensor full;
    Tensor half;
};

/// Least-squares PatchGAN objective averaged over the two scales with weight
/// 0.5 each. Generator: mean (D(fake)-1)^2. Discriminator:
/// 0.5*[mean (D(real)-1)^2 + mean D(fake)^2].
double patchgan_ms_loss(const MultiScaleMaps& d_real, const MultiScaleMaps& d_fake,
                        GanSide side);

struct LossWeights {
    std::map<std::string, double> lambda;

    /// Missing names default to 1.
    double weight(const std::string& name) const;
    /// Named weight presets; "lifangda02" is
    /// {GAN:1, NCE:10, pNCE:10, dis-cls:2, multi-scale:20}.
    static LossWeights preset(const std::string& name);
};

/// Weighted sum of named loss terms.
double combine_weighted(const std::map<std::string, double>& terms,
                        const LossWeights& weights);

/// InfoNCE with L2-normalized embeddings and log-sum-exp stabilization.
double infonce_loss(const std::vector<double>& query, const std::vector<double>& positive,
                    const std::vector<std::vector<double>>& negatives, double tau = 0.07);

/// Sampling weight Q_i: (1 + corr(S_i, T_i)) / sqrt(sum_j H_i . H_j) over
/// luminance pixels. Zero-variance images set the correlation term to 0.
/// Histograms are 256-bin L1-normalized; `i` is a 0-based index into them.
double wecrest_qi(const ImageBuffer& source, const ImageBuffer& target,
                  const std::vector<std::vector<double>>& histograms, std::size_t i);

/// 256-bin L1-normalized luminance histogram.
std::vector<double> luminance_histogram(const ImageBuffer& img);

struct ClampedValue {
    double value = 0.0;
    bool clamped = false;
};

/// -[ln d_real[real_style] + ln d_fake[fake_index]] over N+1 style classes.
/// Zero probabilities clamp at 1e-12 and set the flag.
ClampedValue style_adversarial_loss(const std::vector<double>& d_probs_real,
                                    std::size_t real_style,
                                    const std::vector<double>& d_probs_fake,
                                    std::size_t fake_index);

/// Mean absolute difference on the [0,255] scale.
double cycle_l1(const ImageBuffer& original, const ImageBuffer& reconstructed);

/// -ln D(fake) + lambda * mean|gt - pred|, lambda default 100.
ClampedValue pix2pix_gen_loss(double d_fake, const ImageBuffer& pred,
                              const ImageBuffer& gt, double lambda = 100.0);

/// -ln D(real) + lambda * (-ln(1 - D(fake))), lambda default 1 as printed.
ClampedValue pix2pix_dis_loss(double d_real, double d_fake, double lambda = 1.0);

/// Haar coefficient planes in double precision: per input channel the four
/// half-size sub-bands LL, LH, HL, HH, stacked plane-major.
struct DwtPlanes {
    int channels = 1;  // input channels; plane count is 4 * channels
    int half_w = 0;
    int half_h = 0;
    std::vector<double> data;

    std::size_t plane_size() const {
        return static_cast<std::size_t>(half_w) * half_h;
    }
    Tensor to_tensor() const;
    static DwtPlanes from_tensor(const Tensor& t);
};

/// Single-level orthonormal Haar transform of the luminance plane (unit
/// scale); per_channel transforms each RGB channel instead (12 planes).
DwtPlanes dwt_haar(const ImageBuffer& img, bool per_channel = false);

/// Exact inverse; returns a real-valued image (1 or 3 channels).
ImageBuffer idwt_haar(const DwtPlanes& planes);

/// Plane-level transform used by the tensor CLI path.
DwtPlanes dwt_haar_plane(const std::vector<double>& values, int width, int height);

}  // namespace stainbench

#include "stainbench/homography.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace stainbench {

namespace {

// Hartley normalization: centroid to the origin, mean distance sqrt(2).
Eigen::Matrix3d normalizing_transform(const std::vector<Eigen::Vector2d>& pts) {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());

    double dist = 0.0;
    for (const auto& p : pts) dist += (p - mean).norm();
    dist /= static_cast<double>(pts.size());
    if (dist < 1e-12) {
        throw std::invalid_argument("degenerate landmark configuration: coincident points");
    }
    const double s = std::sqrt(2.0) / dist;
    Eigen::Matrix3d t;
    t << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
    return t;
}

}  // namespace

std::array<double, 2> Homography::apply(double x, double y) const {
    const double w = h[6] * x + h[7] * y + h[8];
    return {(h[0] * x + h[1] * y + h[2]) / w, (h[3] * x + h[4] * y + h[5]) / w};
}

double Homography::det() const {
    return h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6]) +
           h[2] * (h[3] * h[7] - h[4] * h[6]);
}

bool Homography::invertible() const {
    return std::abs(det()) > 1e-12 && std::isfinite(det());
}

Homography Homography::inverse() const {
    const double d = det();
    if (std::abs(d) <= 1e-12 || !std::isfinite(d)) {
        throw std::invalid_argument("homography is not invertible");
    }
    std::array<double, 9> a = h;
    std::array<double, 9> inv;
    inv[0] = (a[4] * a[8] - a[5] * a[7]) / d;
    inv[1] = (a[2] * a[7] - a[1] * a[8]) / d;
    inv[2] = (a[1] * a[5] - a[2] * a[4]) / d;
    inv[3] = (a[5] * a[6] - a[3] * a[8]) / d;
    inv[4] = (a[0] * a[8] - a[2] * a[6]) / d;
    inv[5] = (a[2] * a[3] - a[0] * a[5]) / d;
    inv[6] = (a[3] * a[7] - a[4] * a[6]) / d;
    inv[7] = (a[1] * a[6] - a[0] * a[7]) / d;
    inv[8] = (a[0] * a[4] - a[1] * a[3]) / d;
    Homography out;
    if (std::abs(inv[8]) > 1e-300) {
        for (int i = 0; i < 9; ++i) out.h[i] = inv[i] / inv[8];
    } else {
        out.h = inv;
    }
    return out;
}

Homography estimate_homography(const LandmarkSet& landmarks) {
    landmarks.require_projective_usable();
    const std::size_t n = landmarks.pairs.size();

    std::vector<Eigen::Vector2d> mov(n), fix(n);
    for (std::size_t i = 0; i < n; ++i) {
        mov[i] = {landmarks.pairs[i].moving_x, landmarks.pairs[i].moving_y};
        fix[i] = {landmarks.pairs[i].fixed_x, landmarks.pairs[i].fixed_y};
    }
    const Eigen::Matrix3d t_mov = normalizing_transform(mov);
    const Eigen::Matrix3d t_fix = normalizing_transform(fix);

    Eigen::MatrixXd a(2 * n, 9);
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d m = t_mov * Eigen::Vector3d(mov[i].x(), mov[i].y(), 1.0);
        const Eigen::Vector3d f = t_fix * Eigen::Vector3d(fix[i].x(), fix[i].y(), 1.0);
        const double x = m.x(), y = m.y(), u = f.x(), v = f.y();
        a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y, -u;
        a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y, -v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // A unique solution needs rank 8: the second-smallest singular value
    // must be clearly nonzero.
    if (sv(7) <= 1e-9 * sv(0)) {
        throw std::invalid_argument("degenerate landmark configuration");
    }
    const Eigen::VectorXd v = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << v(0), v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8);

    const Eigen::Matrix3d hd = t_fix.inverse() * hn * t_mov;
    if (std::abs(hd(2, 2)) < 1e-15) {
        throw std::invalid_argument("degenerate landmark configuration");
    }
    Homography out;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) out.h[r * 3 + c] = hd(r, c) / hd(2, 2);
    }
    if (!out.invertible()) {
        throw std::invalid_argument("degenerate landmark configuration");
    }
    return out;
}

}  // namespace stainbench

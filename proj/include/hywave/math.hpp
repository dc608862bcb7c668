#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "hywave/errors.hpp"

namespace hywave {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double pi = std::numbers::pi;

inline double deg2rad(double d) { return d * pi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / pi; }

inline double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// Piecewise-linear interpolation on a sorted abscissa grid; clamps outside the range.
inline double interp1(const std::vector<double>& x, const std::vector<double>& y, double xi) {
    if (x.size() != y.size() || x.empty())
        fail(errc::validation, "interp1: mismatched or empty grids");
    if (xi <= x.front()) return y.front();
    if (xi >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), xi);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    double t = (xi - x[i - 1]) / (x[i] - x[i - 1]);
    return y[i - 1] + t * (y[i] - y[i - 1]);
}

// Trapezoid rule over a (possibly non-uniform) sorted grid.
inline double trapz(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        fail(errc::validation, "trapz: need >= 2 matched samples");
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return s;
}

// Adaptive-ish fixed-panel Simpson quadrature for smooth integrands.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 400) {
    if (panels % 2 != 0) ++panels;
    double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Bisection on a bracketing interval; the bracket is validated.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-10, int maxit = 200) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) fail(errc::numeric, "bisect: interval does not bracket a root");
    for (int it = 0; it < maxit && (hi - lo) > xtol; ++it) {
        double mid = 0.5 * (lo + hi), fm = f(mid);
        if (fm == 0.0) return mid;
        (flo * fm < 0.0 ? hi : lo) = mid;
        (flo * fm < 0.0 ? fhi : flo) = fm;
    }
    return 0.5 * (lo + hi);
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) fail(errc::validation, "mean: empty series");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) { // population convention
    double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

// Rigid-body 6x6 mass matrix about a reference point, given mass, CoG offset r
// from that reference, and the inertia tensor about the CoG.
inline Mat6 rigid_body_mass(double m, const Vec3& r, const Mat3& inertia_cog) {
    Mat6 M = Mat6::Zero();
    Mat3 S;
    S << 0, -r.z(), r.y(), r.z(), 0, -r.x(), -r.y(), r.x(), 0;
    M.topLeftCorner<3, 3>() = m * Mat3::Identity();
    M.topRightCorner<3, 3>() = -m * S;
    M.bottomLeftCorner<3, 3>() = m * S;
    M.bottomRightCorner<3, 3>() = inertia_cog - m * S * S;
    return M;
}

} // namespace hywave

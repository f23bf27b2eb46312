#pragma once

#include "cutstokes/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace cutstokes {

/// Closed-form rotational two-phase solution on the circle of radius 2/3.
/// All fields are stated in interface-centered coordinates, so the whole
/// solution translates rigidly with the circle center.
///
/// The inner angular profile carries a -1/f term; with it the tangential
/// stress balance P sigma n = f (P u+ - P u-) holds exactly on the circle,
/// the normal velocity is continuous, and the normal-stress jump equals the
/// constant interface traction -1/2 supplied as data.
struct ManufacturedCase {
    Vec2 center = Vec2::Zero();
    double mu_minus = 1.0;
    double mu_plus = 10.0;
    double slip_f = 10.0;
    double radius = 2.0 / 3.0;

    double a_coef(Phase p) const { return 3.0 / (4.0 * mu(p)); }

    double b_coef(Phase p) const {
        if (p == Phase::Plus) return 0.0;
        return (mu_minus - mu_plus) / (3.0 * mu_plus * mu_minus) - 1.0 / slip_f;
    }

    double mu(Phase p) const { return p == Phase::Minus ? mu_minus : mu_plus; }

    double angular_profile(Phase p, double s) const { return a_coef(p) * s + b_coef(p); }

    Vec2 velocity(Phase p, const Vec2& xt) const {
        const Vec2 x = xt - center;
        const double g = angular_profile(p, x.squaredNorm());
        return Vec2(-g * x.y(), g * x.x());
    }

    /// Jacobian du_i/dx_j.
    Mat2 velocity_gradient(Phase p, const Vec2& xt) const {
        const Vec2 x = xt - center;
        const double a = a_coef(p);
        const double g = angular_profile(p, x.squaredNorm());
        Mat2 grad;
        grad(0, 0) = -2.0 * a * x.x() * x.y();
        grad(0, 1) = -g - 2.0 * a * x.y() * x.y();
        grad(1, 0) = g + 2.0 * a * x.x() * x.x();
        grad(1, 1) = 2.0 * a * x.x() * x.y();
        return grad;
    }

    Mat2 sym_gradient(Phase p, const Vec2& xt) const {
        const Mat2 g = velocity_gradient(p, xt);
        return 0.5 * (g + g.transpose());
    }

    double pressure(Phase p, const Vec2& xt) const {
        const double x = xt.x() - center.x();
        return p == Phase::Minus ? x * x * x : x * x * x - 0.5;
    }

    Vec2 pressure_gradient(Phase, const Vec2& xt) const {
        const double x = xt.x() - center.x();
        return Vec2(3.0 * x * x, 0.0);
    }

    Mat2 stress(Phase p, const Vec2& xt) const {
        return -pressure(p, xt) * Mat2::Identity() + 2.0 * mu(p) * sym_gradient(p, xt);
    }

    /// Body force -div(sigma); identical closed form in both phases.
    Vec2 forcing(Phase, const Vec2& xt) const {
        const Vec2 x = xt - center;
        return Vec2(3.0 * x.x() * x.x() + 6.0 * x.y(), -6.0 * x.x());
    }

    Vec2 dirichlet(const Vec2& xt) const { return velocity(Phase::Plus, xt); }

    /// Interface traction data: the normal-stress jump of the exact fields.
    double interface_traction(const Vec2&) const { return -0.5; }

    CircleLevelSet level_set() const { return CircleLevelSet(center, radius); }

    /// sup over the internal phase of the angular profile magnitude; grows
    /// like 1/f as the slip coefficient vanishes.
    double sup_angular_profile_minus() const {
        const double at_center = std::abs(b_coef(Phase::Minus));
        const double at_interface =
            std::abs(a_coef(Phase::Minus) * radius * radius + b_coef(Phase::Minus));
        return std::max(at_center, at_interface);
    }
};

inline ManufacturedCase make_case(const Vec2& center, double mu_minus, double mu_plus,
                                  double slip_f) {
    if (slip_f <= 0.0) throw std::invalid_argument("make_case: slip coefficient must be positive");
    if (mu_minus <= 0.0 || mu_plus <= 0.0)
        throw std::invalid_argument("make_case: viscosities must be positive");
    if (mu_minus > mu_plus) throw std::invalid_argument("make_case: mu_minus <= mu_plus required");
    ManufacturedCase c;
    c.center = center;
    c.mu_minus = mu_minus;
    c.mu_plus = mu_plus;
    c.slip_f = slip_f;
    return c;
}

}  // namespace cutstokes

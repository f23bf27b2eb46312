#pragma once

#include "cutstokes/manufactured.hpp"
#include "cutstokes/system.hpp"

#include <cmath>

namespace cutstokes {

/// Error norms of one solve against the closed-form solution.
struct ErrorReport {
    double h = 0.0;
    double l2_u = 0.0;       // velocity L2 over both phases
    double h1w_u = 0.0;      // viscosity-weighted symmetric-gradient seminorm
    double h1w_u_scaled = 0.0;  // h1w_u divided by the exact-solution magnitude
    double l2w_p = 0.0;      // viscosity-weighted pressure L2, mean-aligned
    double residual = 0.0;
    double wall_ms = 0.0;
};

namespace detail {

struct WeightedMean {
    double integral = 0.0;  // sum of mu^{-1} (w, 1)
    double volume = 0.0;    // sum of mu^{-1} |Omega_phase|
};

}  // namespace detail

/// Velocity-weighted H1 magnitude of the exact solution, used to scale the
/// weighted H1 error into a relative quantity.
inline double exact_h1w_magnitude(const ManufacturedCase& mc, const CutTopology& topo,
                                  const GeometryCache& geo) {
    double acc = 0.0;
    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        const double mu = mc.mu(p);
        for (int e : topo.elements_of(p)) {
            const QuadRule& rule = geo.volume(e, p);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Mat2 D = mc.sym_gradient(p, rule.points[q]);
                acc += 2.0 * mu * rule.weights[q] * D.squaredNorm();
            }
        }
    }
    return std::sqrt(acc);
}

/// Error norms over the exact cut volumes. Both pressures are shifted to
/// zero weighted mean before comparison.
inline ErrorReport compute_errors(const ManufacturedCase& mc, const SolveResult& sol,
                                  const TwoPhaseSpace& sp, const CutTopology& topo,
                                  const GeometryCache& geo) {
    const VelocityField uh[2] = {sol.velocity(Phase::Minus), sol.velocity(Phase::Plus)};
    const PressureField ph[2] = {sol.pressure(Phase::Minus), sol.pressure(Phase::Plus)};

    detail::WeightedMean mean_h, mean_ex;
    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        const double inv_mu = 1.0 / mc.mu(p);
        for (int e : topo.elements_of(p)) {
            const QuadRule& rule = geo.volume(e, p);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double w = inv_mu * rule.weights[q];
                mean_h.integral += w * ph[pi].eval(e, rule.points[q]);
                mean_ex.integral += w * mc.pressure(p, rule.points[q]);
                mean_h.volume += w;
            }
        }
    }
    mean_ex.volume = mean_h.volume;
    const double shift_h = mean_h.integral / mean_h.volume;
    const double shift_ex = mean_ex.integral / mean_ex.volume;

    ErrorReport rep;
    rep.h = sp.mesh->h;
    rep.residual = sol.residual;
    double l2u = 0.0, h1w = 0.0, l2p = 0.0;
    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        const double mu = mc.mu(p);
        for (int e : topo.elements_of(p)) {
            const QuadRule& rule = geo.volume(e, p);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec2& x = rule.points[q];
                const double w = rule.weights[q];
                const Vec2 du = uh[pi].eval(e, x) - mc.velocity(p, x);
                l2u += w * du.squaredNorm();
                const Mat2 dD = uh[pi].sym_gradient(e, x) - mc.sym_gradient(p, x);
                h1w += 2.0 * mu * w * dD.squaredNorm();
                const double dp =
                    (ph[pi].eval(e, x) - shift_h) - (mc.pressure(p, x) - shift_ex);
                l2p += w * dp * dp / mu;
            }
        }
    }
    rep.l2_u = std::sqrt(l2u);
    rep.h1w_u = std::sqrt(h1w);
    rep.l2w_p = std::sqrt(l2p);
    const double scale = exact_h1w_magnitude(mc, topo, geo);
    rep.h1w_u_scaled = (scale > 0.0) ? rep.h1w_u / scale : rep.h1w_u;
    return rep;
}

}  // namespace cutstokes

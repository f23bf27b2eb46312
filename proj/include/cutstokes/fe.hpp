#pragma once

#include "cutstokes/geometry.hpp"

#include <array>

namespace cutstokes {

/// Tensor Lagrange bases on the reference square [-1,1]^2. The 1D formulas
/// are polynomials, so evaluation outside the reference element yields the
/// canonical extension used by the ghost penalties.
namespace fe {

inline std::array<double, 3> lagrange3(double t) {
    return {0.5 * t * (t - 1.0), 1.0 - t * t, 0.5 * t * (t + 1.0)};
}

inline std::array<double, 3> lagrange3_deriv(double t) {
    return {t - 0.5, -2.0 * t, t + 0.5};
}

inline std::array<double, 2> lagrange2(double t) {
    return {0.5 * (1.0 - t), 0.5 * (1.0 + t)};
}

inline std::array<double, 2> lagrange2_deriv(double) { return {-0.5, 0.5}; }

constexpr int q2_nodes = 9;
constexpr int q1_nodes = 4;

/// Row-major local node numbering: node (a,b) -> b*3+a for Q2, b*2+a for Q1.
inline std::array<double, q2_nodes> q2_values(const Vec2& xi) {
    const auto lx = lagrange3(xi.x());
    const auto ly = lagrange3(xi.y());
    std::array<double, q2_nodes> v{};
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a) v[static_cast<std::size_t>(b * 3 + a)] = lx[a] * ly[b];
    return v;
}

inline std::array<Vec2, q2_nodes> q2_gradients(const Vec2& xi) {
    const auto lx = lagrange3(xi.x());
    const auto ly = lagrange3(xi.y());
    const auto dx = lagrange3_deriv(xi.x());
    const auto dy = lagrange3_deriv(xi.y());
    std::array<Vec2, q2_nodes> g;
    for (int b = 0; b < 3; ++b)
        for (int a = 0; a < 3; ++a)
            g[static_cast<std::size_t>(b * 3 + a)] = Vec2(dx[a] * ly[b], lx[a] * dy[b]);
    return g;
}

inline std::array<double, q1_nodes> q1_values(const Vec2& xi) {
    const auto lx = lagrange2(xi.x());
    const auto ly = lagrange2(xi.y());
    std::array<double, q1_nodes> v{};
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a) v[static_cast<std::size_t>(b * 2 + a)] = lx[a] * ly[b];
    return v;
}

inline std::array<Vec2, q1_nodes> q1_gradients(const Vec2& xi) {
    const auto lx = lagrange2(xi.x());
    const auto ly = lagrange2(xi.y());
    const auto dx = lagrange2_deriv(xi.x());
    const auto dy = lagrange2_deriv(xi.y());
    std::array<Vec2, q1_nodes> g;
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a)
            g[static_cast<std::size_t>(b * 2 + a)] = Vec2(dx[a] * ly[b], lx[a] * dy[b]);
    return g;
}

/// Physical point -> reference coordinates of an axis-aligned element.
/// Valid outside the element as well (canonical extension).
inline Vec2 to_reference(const Box& box, const Vec2& p) {
    return Vec2((2.0 * p.x() - box.lo.x() - box.hi.x()) / box.width(),
                (2.0 * p.y() - box.lo.y() - box.hi.y()) / box.height());
}

/// Chain-rule factors d(xi)/d(x) for the affine map.
inline Vec2 reference_scale(const Box& box) {
    return Vec2(2.0 / box.width(), 2.0 / box.height());
}

}  // namespace fe

}  // namespace cutstokes

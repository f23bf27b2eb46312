#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cutstokes {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class Phase : int { Minus = 0, Plus = 1 };

inline int phase_index(Phase p) { return static_cast<int>(p); }
inline Phase other_phase(Phase p) { return p == Phase::Minus ? Phase::Plus : Phase::Minus; }

/// Axis-aligned rectangle, the only element shape used here.
struct Box {
    Vec2 lo;
    Vec2 hi;

    Vec2 center() const { return 0.5 * (lo + hi); }
    double width() const { return hi.x() - lo.x(); }
    double height() const { return hi.y() - lo.y(); }
    double area() const { return width() * height(); }
    bool contains(const Vec2& p, double tol = 1e-12) const {
        return p.x() >= lo.x() - tol && p.x() <= hi.x() + tol &&
               p.y() >= lo.y() - tol && p.y() <= hi.y() + tol;
    }
};

/// Smooth implicit interface: circle of radius r centered at c,
/// negative inside (the internal phase), positive outside.
class CircleLevelSet {
  public:
    CircleLevelSet(const Vec2& center, double radius) : center_(center), radius_(radius) {
        if (radius <= 0.0) throw std::invalid_argument("CircleLevelSet: radius must be positive");
    }

    double value(const Vec2& p) const {
        const Vec2 d = p - center_;
        return d.squaredNorm() - radius_ * radius_;
    }

    Vec2 gradient(const Vec2& p) const { return 2.0 * (p - center_); }

    Mat2 hessian(const Vec2&) const { return 2.0 * Mat2::Identity(); }

    /// Unit normal grad(phi)/|grad(phi)|, oriented from the minus into the plus phase.
    Vec2 normal(const Vec2& p) const {
        const Vec2 g = gradient(p);
        const double gn = g.norm();
        if (gn == 0.0) throw std::domain_error("CircleLevelSet: normal undefined at center");
        return g / gn;
    }

    /// div(grad(phi)/|grad(phi)|), evaluated from analytic derivatives.
    double curvature(const Vec2& p) const {
        const Vec2 g = gradient(p);
        const Mat2 H = hessian(p);
        const double g2 = g.squaredNorm();
        if (g2 == 0.0) throw std::domain_error("CircleLevelSet: curvature undefined at center");
        const double num = H.trace() * g2 - g.dot(H * g);
        return num / (g2 * std::sqrt(g2));
    }

    CircleLevelSet perturbed(double eps) const {
        return CircleLevelSet(center_ + Vec2(eps, eps), radius_);
    }

    const Vec2& center() const { return center_; }
    double radius() const { return radius_; }

  private:
    Vec2 center_;
    double radius_;
};

enum class ElementCutClass { InsideMinus, InsidePlus, Cut };

/// Quadrature rule in physical coordinates. Volume rules carry area weights;
/// interface rules carry arc-length weights plus the unit normal per point.
struct QuadRule {
    std::vector<Vec2> points;
    std::vector<double> weights;
    std::vector<Vec2> normals;

    std::size_t size() const { return points.size(); }

    double weight_sum() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }

    template <typename F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t q = 0; q < points.size(); ++q) s += weights[q] * f(points[q]);
        return s;
    }
};

struct CutQuadratureError : std::runtime_error {
    explicit CutQuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// Gauss-Legendre nodes/weights on [-1,1], computed once per point count by
/// Newton iteration on the Legendre recurrence.
struct GaussRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline const GaussRule1D& gauss1d(int npts) {
    if (npts < 1 || npts > 30) throw std::invalid_argument("gauss1d: unsupported point count");
    static std::array<GaussRule1D, 31> cache;
    static std::array<std::once_flag, 31> flags;
    std::call_once(flags[static_cast<std::size_t>(npts)], [npts] {
        GaussRule1D rule;
        rule.nodes.resize(static_cast<std::size_t>(npts));
        rule.weights.resize(static_cast<std::size_t>(npts));
        const int m = npts;
        for (int i = 0; i < (m + 1) / 2; ++i) {
            // Chebyshev-based initial guess, then Newton on P_m.
            double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= m; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                pp = m * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            const double w = 2.0 / ((1.0 - x * x) * pp * pp);
            rule.nodes[static_cast<std::size_t>(i)] = -x;
            rule.weights[static_cast<std::size_t>(i)] = w;
            rule.nodes[static_cast<std::size_t>(m - 1 - i)] = x;
            rule.weights[static_cast<std::size_t>(m - 1 - i)] = w;
        }
        if (m % 2 == 1) rule.nodes[static_cast<std::size_t>(m / 2)] = 0.0;
        cache[static_cast<std::size_t>(npts)] = std::move(rule);
    });
    return cache[static_cast<std::size_t>(npts)];
}

inline int gauss_points_for_order(int order) { return std::max(1, (order + 2) / 2); }

/// Full tensor Gauss rule on an uncut box.
inline QuadRule tensor_gauss(const Box& box, int order) {
    const GaussRule1D& g = gauss1d(gauss_points_for_order(order));
    QuadRule rule;
    const double cx = 0.5 * (box.lo.x() + box.hi.x()), sx = 0.5 * box.width();
    const double cy = 0.5 * (box.lo.y() + box.hi.y()), sy = 0.5 * box.height();
    rule.points.reserve(g.nodes.size() * g.nodes.size());
    rule.weights.reserve(g.nodes.size() * g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
            rule.points.emplace_back(cx + sx * g.nodes[i], cy + sy * g.nodes[j]);
            rule.weights.push_back(g.weights[i] * g.weights[j] * sx * sy);
        }
    }
    return rule;
}

/// Classification by dense sign sampling: a 7x7 tensor grid including the
/// element corners. Cut iff the sampled values straddle zero.
inline ElementCutClass classify_box(const Box& box, const CircleLevelSet& ls) {
    constexpr int ns = 7;
    double mn = std::numeric_limits<double>::max();
    double mx = std::numeric_limits<double>::lowest();
    for (int i = 0; i < ns; ++i) {
        const double x = box.lo.x() + box.width() * i / (ns - 1);
        for (int j = 0; j < ns; ++j) {
            const double y = box.lo.y() + box.height() * j / (ns - 1);
            const double v = ls.value(Vec2(x, y));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
    }
    if (mn < 0.0 && mx > 0.0) return ElementCutClass::Cut;
    const double vc = ls.value(box.center());
    return vc < 0.0 ? ElementCutClass::InsideMinus : ElementCutClass::InsidePlus;
}

/// Subdivision depth for cut elements of size h. The curved leaf rules are
/// spectrally accurate, so four levels already push the geometric error to
/// roundoff; the cap keeps rule sizes bounded on fine meshes.
inline int subdivision_depth(double h) {
    const int base = 7;
    const int d = static_cast<int>(std::ceil(2.5 * std::log2(1.0 / h))) - base;
    return std::clamp(d, 2, 4);
}

namespace detail {

/// Safeguarded root solve of f on [a,b] with f(a)*f(b) <= 0: bisection
/// brackets, Newton accelerates. Tolerance on the argument.
template <typename F, typename DF>
double solve_root(F&& f, DF&& df, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw CutQuadratureError("root solve: endpoints do not bracket a root");
    double lo = a, hi = b, flo = fa;
    double x = 0.5 * (a + b);
    const double xtol = 1e-14 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
    for (int it = 0; it < 200; ++it) {
        double fx = f(x);
        if (fx == 0.0) return x;
        if (fx * flo < 0.0) {
            hi = x;
        } else {
            lo = x;
            flo = fx;
        }
        const double d = df(x);
        double xn = (d != 0.0) ? x - fx / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) < xtol) return xn;
        x = xn;
    }
    return x;
}

/// Roots of phi restricted to an axis-aligned segment, by sign-change
/// bracketing on a fixed sample grid. At most two roots are expected
/// (circle against a line); more indicates a degenerate configuration.
inline void edge_roots(const CircleLevelSet& ls, int axis, double fixed, double a, double b,
                       std::vector<double>& out) {
    constexpr int ns = 9;
    std::array<double, ns> t{}, v{};
    for (int i = 0; i < ns; ++i) {
        t[static_cast<std::size_t>(i)] = a + (b - a) * i / (ns - 1);
        const Vec2 p = (axis == 0) ? Vec2(t[static_cast<std::size_t>(i)], fixed)
                                   : Vec2(fixed, t[static_cast<std::size_t>(i)]);
        v[static_cast<std::size_t>(i)] = ls.value(p);
    }
    auto f = [&](double s) {
        return ls.value(axis == 0 ? Vec2(s, fixed) : Vec2(fixed, s));
    };
    auto df = [&](double s) {
        const Vec2 g = ls.gradient(axis == 0 ? Vec2(s, fixed) : Vec2(fixed, s));
        return axis == 0 ? g.x() : g.y();
    };
    for (int i = 0; i + 1 < ns; ++i) {
        const double va = v[static_cast<std::size_t>(i)], vb = v[static_cast<std::size_t>(i + 1)];
        if (va == 0.0) {
            out.push_back(t[static_cast<std::size_t>(i)]);
        } else if (va * vb < 0.0) {
            out.push_back(solve_root(f, df, t[static_cast<std::size_t>(i)],
                                     t[static_cast<std::size_t>(i + 1)], va, vb));
        }
    }
    if (v[ns - 1] == 0.0) out.push_back(b);
}

/// One cut leaf after maximal subdivision. The interface is treated as a
/// graph over the coordinate with the smaller |grad phi| component; strips
/// between edge-root breakpoints then see at most one crossing per line.
struct LeafContext {
    const CircleLevelSet& ls;
    Box box;
    int root_axis;   // coordinate solved for (0 = x, 1 = y)
    int strip_axis;  // 1 - root_axis
    double r0, r1;   // box extent along root axis
    std::vector<double> breaks;
};

inline LeafContext make_leaf_context(const Box& box, const CircleLevelSet& ls) {
    const Vec2 g = ls.gradient(box.center());
    LeafContext ctx{ls, box, 0, 1, 0.0, 0.0, {}};
    ctx.root_axis = (std::abs(g.y()) >= std::abs(g.x())) ? 1 : 0;
    ctx.strip_axis = 1 - ctx.root_axis;
    const double s0 = (ctx.strip_axis == 0) ? box.lo.x() : box.lo.y();
    const double s1 = (ctx.strip_axis == 0) ? box.hi.x() : box.hi.y();
    ctx.r0 = (ctx.root_axis == 0) ? box.lo.x() : box.lo.y();
    ctx.r1 = (ctx.root_axis == 0) ? box.hi.x() : box.hi.y();
    ctx.breaks.push_back(s0);
    detail::edge_roots(ls, ctx.strip_axis, ctx.r0, s0, s1, ctx.breaks);
    detail::edge_roots(ls, ctx.strip_axis, ctx.r1, s0, s1, ctx.breaks);
    ctx.breaks.push_back(s1);
    std::sort(ctx.breaks.begin(), ctx.breaks.end());
    return ctx;
}

inline Vec2 assemble_point(const LeafContext& ctx, double strip_coord, double root_coord) {
    return ctx.strip_axis == 0 ? Vec2(strip_coord, root_coord) : Vec2(root_coord, strip_coord);
}

/// Root of phi along the root axis at a fixed strip coordinate.
inline double line_root(const LeafContext& ctx, double strip_coord) {
    auto f = [&](double rc) { return ctx.ls.value(assemble_point(ctx, strip_coord, rc)); };
    auto df = [&](double rc) {
        const Vec2 g = ctx.ls.gradient(assemble_point(ctx, strip_coord, rc));
        return ctx.root_axis == 0 ? g.x() : g.y();
    };
    const double fa = f(ctx.r0), fb = f(ctx.r1);
    if (fa * fb > 0.0)
        throw CutQuadratureError("cut leaf: interface could not be isolated on a strip line");
    return solve_root(f, df, ctx.r0, ctx.r1, fa, fb);
}

inline void leaf_cut_volume(const Box& box, const CircleLevelSet& ls, Phase phase, int order,
                            QuadRule& out) {
    const LeafContext ctx = make_leaf_context(box, ls);
    const GaussRule1D& g = gauss1d(gauss_points_for_order(order));
    const double want_sign = (phase == Phase::Minus) ? -1.0 : 1.0;
    int crossed_strips = 0;

    for (std::size_t k = 0; k + 1 < ctx.breaks.size(); ++k) {
        const double sa = ctx.breaks[k], sb = ctx.breaks[k + 1];
        if (sb - sa < 1e-14 * std::max(1.0, std::abs(sb))) continue;
        const double sm = 0.5 * (sa + sb);
        const double v_lo = ctx.ls.value(assemble_point(ctx, sm, ctx.r0));
        const double v_hi = ctx.ls.value(assemble_point(ctx, sm, ctx.r1));
        if (v_lo * v_hi < 0.0) {
            // Crossed strip: per Gauss line, split at the root.
            ++crossed_strips;
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                const double sc = 0.5 * (sa + sb) + 0.5 * (sb - sa) * g.nodes[i];
                const double ws = 0.5 * (sb - sa) * g.weights[i];
                const double rstar = line_root(ctx, sc);
                const double lo_sign = (v_lo < 0.0) ? -1.0 : 1.0;
                auto add_segment = [&](double ra, double rb) {
                    if (rb - ra <= 0.0) return;
                    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
                        const double rc = 0.5 * (ra + rb) + 0.5 * (rb - ra) * g.nodes[j];
                        out.points.push_back(assemble_point(ctx, sc, rc));
                        out.weights.push_back(ws * 0.5 * (rb - ra) * g.weights[j]);
                    }
                };
                if (lo_sign == want_sign) add_segment(ctx.r0, rstar);
                if (-lo_sign == want_sign) add_segment(rstar, ctx.r1);
            }
        } else {
            const double v_mid =
                ctx.ls.value(assemble_point(ctx, sm, 0.5 * (ctx.r0 + ctx.r1)));
            const double strip_sign = (v_mid < 0.0) ? -1.0 : 1.0;
            if (strip_sign != want_sign) continue;
            Box strip = box;
            if (ctx.strip_axis == 0) {
                strip.lo.x() = sa;
                strip.hi.x() = sb;
            } else {
                strip.lo.y() = sa;
                strip.hi.y() = sb;
            }
            const QuadRule sub = tensor_gauss(strip, order);
            out.points.insert(out.points.end(), sub.points.begin(), sub.points.end());
            out.weights.insert(out.weights.end(), sub.weights.begin(), sub.weights.end());
        }
    }
    if (crossed_strips == 0)
        throw CutQuadratureError("cut leaf: interface could not be isolated (tangential cut)");
}

inline void leaf_cut_interface(const Box& box, const CircleLevelSet& ls, int order,
                               QuadRule& out) {
    const LeafContext ctx = make_leaf_context(box, ls);
    const GaussRule1D& g = gauss1d(gauss_points_for_order(order));
    int crossed_strips = 0;

    for (std::size_t k = 0; k + 1 < ctx.breaks.size(); ++k) {
        const double sa = ctx.breaks[k], sb = ctx.breaks[k + 1];
        if (sb - sa < 1e-14 * std::max(1.0, std::abs(sb))) continue;
        const double sm = 0.5 * (sa + sb);
        const double v_lo = ctx.ls.value(assemble_point(ctx, sm, ctx.r0));
        const double v_hi = ctx.ls.value(assemble_point(ctx, sm, ctx.r1));
        if (v_lo * v_hi >= 0.0) continue;
        ++crossed_strips;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            const double sc = 0.5 * (sa + sb) + 0.5 * (sb - sa) * g.nodes[i];
            const double ws = 0.5 * (sb - sa) * g.weights[i];
            const double rstar = line_root(ctx, sc);
            const Vec2 p = assemble_point(ctx, sc, rstar);
            const Vec2 grad = ctx.ls.gradient(p);
            const double g_root = (ctx.root_axis == 0) ? grad.x() : grad.y();
            const double g_strip = (ctx.strip_axis == 0) ? grad.x() : grad.y();
            if (g_root == 0.0)
                throw CutQuadratureError("cut leaf: vanishing gradient along root axis");
            const double slope = -g_strip / g_root;
            out.points.push_back(p);
            out.weights.push_back(ws * std::sqrt(1.0 + slope * slope));
            out.normals.push_back(grad / grad.norm());
        }
    }
    if (crossed_strips == 0)
        throw CutQuadratureError("cut leaf: interface could not be isolated (tangential cut)");
}

template <typename LeafFn>
void subdivide_cut(const Box& box, const CircleLevelSet& ls, Phase phase, int order, int depth,
                   bool volume, QuadRule& out, LeafFn&& leaf) {
    const ElementCutClass cls = classify_box(box, ls);
    if (cls != ElementCutClass::Cut) {
        if (volume) {
            const Phase box_phase =
                (cls == ElementCutClass::InsideMinus) ? Phase::Minus : Phase::Plus;
            if (box_phase == phase) {
                const QuadRule sub = tensor_gauss(box, order);
                out.points.insert(out.points.end(), sub.points.begin(), sub.points.end());
                out.weights.insert(out.weights.end(), sub.weights.begin(), sub.weights.end());
            }
        }
        return;
    }
    if (depth > 0) {
        const Vec2 c = box.center();
        const Box quads[4] = {
            Box{box.lo, c},
            Box{Vec2(c.x(), box.lo.y()), Vec2(box.hi.x(), c.y())},
            Box{Vec2(box.lo.x(), c.y()), Vec2(c.x(), box.hi.y())},
            Box{c, box.hi},
        };
        for (const Box& q : quads)
            subdivide_cut(q, ls, phase, order, depth - 1, volume, out, leaf);
        return;
    }
    leaf(box, out);
}

}  // namespace detail

/// Quadrature over (element intersect phase) with positive weights; uncut
/// elements get the plain tensor Gauss rule.
inline QuadRule volume_quadrature(const Box& elem, const CircleLevelSet& ls, Phase phase,
                                  int order) {
    if (order < 2) throw std::invalid_argument("volume_quadrature: order must be >= 2");
    QuadRule rule;
    const ElementCutClass cls = classify_box(elem, ls);
    if (cls != ElementCutClass::Cut) {
        const Phase box_phase = (cls == ElementCutClass::InsideMinus) ? Phase::Minus : Phase::Plus;
        if (box_phase == phase) return tensor_gauss(elem, order);
        return rule;
    }
    const int depth = subdivision_depth(elem.width());
    detail::subdivide_cut(elem, ls, phase, order, depth, /*volume=*/true, rule,
                          [&](const Box& leafbox, QuadRule& out) {
                              detail::leaf_cut_volume(leafbox, ls, phase, order, out);
                          });
    return rule;
}

/// Quadrature over (Gamma intersect element); each point carries the exact
/// unit normal from the level set.
inline QuadRule interface_quadrature(const Box& elem, const CircleLevelSet& ls, int order) {
    if (classify_box(elem, ls) != ElementCutClass::Cut)
        throw std::invalid_argument("interface_quadrature: element is not cut");
    QuadRule rule;
    const int depth = subdivision_depth(elem.width());
    detail::subdivide_cut(elem, ls, Phase::Minus, order, depth, /*volume=*/false, rule,
                          [&](const Box& leafbox, QuadRule& out) {
                              detail::leaf_cut_interface(leafbox, ls, order, out);
                          });
    return rule;
}

}  // namespace cutstokes

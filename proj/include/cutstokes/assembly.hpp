#pragma once

#include "cutstokes/space.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <stdexcept>
#include <vector>

namespace cutstokes {

/// Physical and stabilization parameters. Defaults are the standard choices
/// for the experiments run by the harness.
struct PhysicalParams {
    double mu_minus = 1.0;
    double mu_plus = 10.0;
    double slip_f = 10.0;
    double gamma_nitsche = 40.0;
    double gamma_u_minus = 0.05;
    double gamma_u_plus = 0.05;
    double gamma_p_minus = 0.05;
    double gamma_p_plus = 0.05;
    double alpha = 0.0;
    double beta = 1.0;

    void validate() const {
        if (mu_minus <= 0.0 || mu_plus <= 0.0)
            throw std::invalid_argument("params: viscosities must be positive");
        if (mu_minus > mu_plus)
            throw std::invalid_argument("params: mu_minus <= mu_plus required");
        if (slip_f < 0.0) throw std::invalid_argument("params: slip coefficient must be >= 0");
        if (gamma_nitsche <= 0.0) throw std::invalid_argument("params: gamma must be positive");
        if (gamma_u_minus < 0.0 || gamma_u_plus < 0.0 || gamma_p_minus < 0.0 || gamma_p_plus < 0.0)
            throw std::invalid_argument("params: ghost penalties must be >= 0");
        if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0 ||
            std::abs(alpha + beta - 1.0) > 1e-14)
            throw std::invalid_argument("params: average weights must satisfy alpha+beta=1");
    }

    double mu(Phase p) const { return p == Phase::Minus ? mu_minus : mu_plus; }
    double gamma_u(Phase p) const { return p == Phase::Minus ? gamma_u_minus : gamma_u_plus; }
    double gamma_p(Phase p) const { return p == Phase::Minus ? gamma_p_minus : gamma_p_plus; }

    /// Weight of a phase trace in the average {w} = alpha w+ + beta w-.
    double curly_weight(Phase p) const { return p == Phase::Minus ? beta : alpha; }
    /// Weight in the skew average <w> = beta w+ + alpha w-.
    double angle_weight(Phase p) const { return p == Phase::Minus ? alpha : beta; }
    /// Sign of a phase trace in the jump [w] = w- - w+.
    static double jump_sign(Phase p) { return p == Phase::Minus ? 1.0 : -1.0; }
    /// {mu} = alpha mu+ + beta mu-.
    double mu_curly() const { return alpha * mu_plus + beta * mu_minus; }
};

/// Triplet-backed sparse block in the global unknown indexing.
struct SparseBlock {
    int rows = 0;
    int cols = 0;
    std::vector<Eigen::Triplet<double>> triplets;

    void add(int r, int c, double v) {
        if (v != 0.0) triplets.emplace_back(r, c, v);
    }

    Eigen::SparseMatrix<double> matrix() const {
        Eigen::SparseMatrix<double> m(rows, cols);
        m.setFromTriplets(triplets.begin(), triplets.end());
        return m;
    }
};

namespace detail {

/// Velocity dof indices (18 per phase) of an element, -1 when inactive.
struct ElementVelDofs {
    std::array<int, 2 * fe::q2_nodes> idx{};
};

inline ElementVelDofs element_vel_dofs(const TwoPhaseSpace& sp, int e, Phase p) {
    ElementVelDofs out;
    const auto nodes = sp.element_q2_nodes(e);
    for (int a = 0; a < fe::q2_nodes; ++a)
        for (int c = 0; c < 2; ++c)
            out.idx[static_cast<std::size_t>(2 * a + c)] =
                sp.vel_dof(p, nodes[static_cast<std::size_t>(a)], c);
    return out;
}

}  // namespace detail

/// Viscous bulk terms, the tangential slip coupling, and the primal Nitsche
/// consistency term (the latter can be dropped to inspect the symmetric part).
inline SparseBlock assemble_a_i(const TwoPhaseSpace& sp, const CutTopology& topo,
                                const GeometryCache& geo, const PhysicalParams& prm,
                                bool include_consistency = true) {
    SparseBlock blk;
    blk.rows = blk.cols = sp.total_dofs;

    // 2 (mu D(u), D(v)) per phase over the exact cut volumes.
    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        const double mu = prm.mu(p);
        for (int e : topo.elements_of(p)) {
            const QuadRule& rule = geo.volume(e, p);
            if (rule.size() == 0) continue;
            const Box& box = sp.mesh->elements[static_cast<std::size_t>(e)];
            const Vec2 scale = fe::reference_scale(box);
            const auto nodes = sp.element_q2_nodes(e);
            std::array<int, fe::q2_nodes> loc{};
            for (int a = 0; a < fe::q2_nodes; ++a)
                loc[static_cast<std::size_t>(a)] =
                    sp.vel_dof(p, nodes[static_cast<std::size_t>(a)], 0);
            Eigen::Matrix<double, 18, 18> K = Eigen::Matrix<double, 18, 18>::Zero();
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec2 xi = fe::to_reference(box, rule.points[q]);
                const auto gr = fe::q2_gradients(xi);
                std::array<Vec2, fe::q2_nodes> gp;
                for (int a = 0; a < fe::q2_nodes; ++a)
                    gp[static_cast<std::size_t>(a)] =
                        Vec2(gr[static_cast<std::size_t>(a)].x() * scale.x(),
                             gr[static_cast<std::size_t>(a)].y() * scale.y());
                const double w = 2.0 * mu * rule.weights[q];
                for (int a = 0; a < fe::q2_nodes; ++a) {
                    for (int b = 0; b < fe::q2_nodes; ++b) {
                        const double gg = gp[static_cast<std::size_t>(a)]
                                              .dot(gp[static_cast<std::size_t>(b)]);
                        for (int c = 0; c < 2; ++c)
                            for (int d = 0; d < 2; ++d) {
                                // D(N_a e_c):D(N_b e_d)
                                const double dd =
                                    0.5 * ((c == d ? gg : 0.0) +
                                           gp[static_cast<std::size_t>(a)][d] *
                                               gp[static_cast<std::size_t>(b)][c]);
                                K(2 * a + c, 2 * b + d) += w * dd;
                            }
                    }
                }
            }
            for (int a = 0; a < fe::q2_nodes; ++a)
                for (int c = 0; c < 2; ++c)
                    for (int b = 0; b < fe::q2_nodes; ++b)
                        for (int d = 0; d < 2; ++d)
                            blk.add(loc[static_cast<std::size_t>(a)] + c,
                                    loc[static_cast<std::size_t>(b)] + d, K(2 * a + c, 2 * b + d));
        }
    }

    // Interface terms: f <[Pu],[Pv]> - 2 <{mu n^T D(u) n},[v.n]>, accumulated
    // into one dense block per cut element (columns/rows: phase, node, comp).
    for (int e : topo.elements_cut) {
        const QuadRule& rule = geo.interface[static_cast<std::size_t>(e)];
        const Box& box = sp.mesh->elements[static_cast<std::size_t>(e)];
        const Vec2 scale = fe::reference_scale(box);
        const std::array<detail::ElementVelDofs, 2> dofs = {
            detail::element_vel_dofs(sp, e, Phase::Minus),
            detail::element_vel_dofs(sp, e, Phase::Plus)};
        Eigen::Matrix<double, 36, 36> K = Eigen::Matrix<double, 36, 36>::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2& x = rule.points[q];
            const Vec2& n = rule.normals[q];
            const double w = rule.weights[q];
            const Vec2 xi = fe::to_reference(box, x);
            const auto vals = fe::q2_values(xi);
            const auto gr = fe::q2_gradients(xi);
            std::array<double, fe::q2_nodes> gn{};
            for (int a = 0; a < fe::q2_nodes; ++a)
                gn[static_cast<std::size_t>(a)] = gr[static_cast<std::size_t>(a)].x() * scale.x() * n.x() +
                                                  gr[static_cast<std::size_t>(a)].y() * scale.y() * n.y();
            const Mat2 P = Mat2::Identity() - n * n.transpose();

            for (int si = 0; si < 2; ++si) {
                const Phase s = static_cast<Phase>(si);
                const double sig_s = PhysicalParams::jump_sign(s);
                for (int ti = 0; ti < 2; ++ti) {
                    const Phase t = static_cast<Phase>(ti);
                    const double sig_t = PhysicalParams::jump_sign(t);
                    for (int a = 0; a < fe::q2_nodes; ++a) {
                        const double Na = vals[static_cast<std::size_t>(a)];
                        for (int b = 0; b < fe::q2_nodes; ++b) {
                            const double Nb = vals[static_cast<std::size_t>(b)];
                            for (int c = 0; c < 2; ++c) {
                                const int col = si * 18 + 2 * a + c;
                                for (int d = 0; d < 2; ++d) {
                                    const int row = ti * 18 + 2 * b + d;
                                    double v = 0.0;
                                    // slip: f [Pu]_col [Pv]_row
                                    v += prm.slip_f * sig_s * sig_t * P(c, d) * Na * Nb * w;
                                    // -2 {mu n^T D(u) n} [v.n]
                                    if (include_consistency)
                                        v += -2.0 * prm.curly_weight(s) * prm.mu(s) * n[c] *
                                             gn[static_cast<std::size_t>(a)] * sig_t * n[d] * Nb *
                                             w;
                                    K(row, col) += v;
                                }
                            }
                        }
                    }
                }
            }
        }
        for (int row = 0; row < 36; ++row)
            for (int col = 0; col < 36; ++col)
                blk.add(dofs[static_cast<std::size_t>(row / 18)]
                            .idx[static_cast<std::size_t>(row % 18)],
                        dofs[static_cast<std::size_t>(col / 18)]
                            .idx[static_cast<std::size_t>(col % 18)],
                        K(row, col));
    }
    return blk;
}

/// Nitsche terms for the normal-flux coupling: penalty plus the adjoint
/// consistency term.
inline SparseBlock assemble_a_n(const TwoPhaseSpace& sp, const CutTopology& topo,
                                const GeometryCache& geo, const PhysicalParams& prm) {
    SparseBlock blk;
    blk.rows = blk.cols = sp.total_dofs;
    const double mu_avg = prm.mu_curly();

    for (int e : topo.elements_cut) {
        const QuadRule& rule = geo.interface[static_cast<std::size_t>(e)];
        const Box& box = sp.mesh->elements[static_cast<std::size_t>(e)];
        const double h_T = box.width();
        const Vec2 scale = fe::reference_scale(box);
        const std::array<detail::ElementVelDofs, 2> dofs = {
            detail::element_vel_dofs(sp, e, Phase::Minus),
            detail::element_vel_dofs(sp, e, Phase::Plus)};
        Eigen::Matrix<double, 36, 36> K = Eigen::Matrix<double, 36, 36>::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2& x = rule.points[q];
            const Vec2& n = rule.normals[q];
            const double w = rule.weights[q];
            const Vec2 xi = fe::to_reference(box, x);
            const auto vals = fe::q2_values(xi);
            const auto gr = fe::q2_gradients(xi);
            std::array<double, fe::q2_nodes> gn{};
            for (int a = 0; a < fe::q2_nodes; ++a)
                gn[static_cast<std::size_t>(a)] = gr[static_cast<std::size_t>(a)].x() * scale.x() * n.x() +
                                                  gr[static_cast<std::size_t>(a)].y() * scale.y() * n.y();

            for (int si = 0; si < 2; ++si) {
                const Phase s = static_cast<Phase>(si);
                const double sig_s = PhysicalParams::jump_sign(s);
                for (int ti = 0; ti < 2; ++ti) {
                    const Phase t = static_cast<Phase>(ti);
                    const double sig_t = PhysicalParams::jump_sign(t);
                    for (int a = 0; a < fe::q2_nodes; ++a) {
                        const double Na = vals[static_cast<std::size_t>(a)];
                        for (int b = 0; b < fe::q2_nodes; ++b) {
                            const double Nb = vals[static_cast<std::size_t>(b)];
                            for (int c = 0; c < 2; ++c) {
                                const int col = si * 18 + 2 * a + c;
                                for (int d = 0; d < 2; ++d) {
                                    const int row = ti * 18 + 2 * b + d;
                                    double v = 0.0;
                                    // (gamma/h_T) {mu} [u.n][v.n]
                                    v += (prm.gamma_nitsche / h_T) * mu_avg * sig_s * n[c] * Na *
                                         sig_t * n[d] * Nb * w;
                                    // -2 {mu n^T D(v) n} [u.n]
                                    v += -2.0 * prm.curly_weight(t) * prm.mu(t) * n[d] *
                                         gn[static_cast<std::size_t>(b)] * sig_s * n[c] * Na * w;
                                    K(row, col) += v;
                                }
                            }
                        }
                    }
                }
            }
        }
        for (int row = 0; row < 36; ++row)
            for (int col = 0; col < 36; ++col)
                blk.add(dofs[static_cast<std::size_t>(row / 18)]
                            .idx[static_cast<std::size_t>(row % 18)],
                        dofs[static_cast<std::size_t>(col / 18)]
                            .idx[static_cast<std::size_t>(col % 18)],
                        K(row, col));
    }
    return blk;
}

namespace detail {

/// Patch matrix of the extension-difference product over omega_e for a
/// scalar tensor basis. NodesT1/NodesT2 give global node ids; shared nodes
/// collapse onto one patch unknown with contributions from both sides.
template <int NN, typename Values>
struct PatchAccumulator {
    std::vector<int> patch_nodes;                      // global node ids, deterministic order
    std::array<int, static_cast<std::size_t>(NN)> map1{};  // T1 local node -> patch index
    std::array<int, static_cast<std::size_t>(NN)> map2{};
    Eigen::MatrixXd M;

    template <typename NodeArray>
    void build(const BackgroundMesh& mesh, int e1, int e2, const NodeArray& nodes1,
               const NodeArray& nodes2, Values values, int quad_order) {
        for (int a = 0; a < NN; ++a) {
            const int g = nodes1[static_cast<std::size_t>(a)];
            auto it = std::find(patch_nodes.begin(), patch_nodes.end(), g);
            if (it == patch_nodes.end()) {
                map1[static_cast<std::size_t>(a)] = static_cast<int>(patch_nodes.size());
                patch_nodes.push_back(g);
            } else {
                map1[static_cast<std::size_t>(a)] = static_cast<int>(it - patch_nodes.begin());
            }
        }
        for (int a = 0; a < NN; ++a) {
            const int g = nodes2[static_cast<std::size_t>(a)];
            auto it = std::find(patch_nodes.begin(), patch_nodes.end(), g);
            if (it == patch_nodes.end()) {
                map2[static_cast<std::size_t>(a)] = static_cast<int>(patch_nodes.size());
                patch_nodes.push_back(g);
            } else {
                map2[static_cast<std::size_t>(a)] = static_cast<int>(it - patch_nodes.begin());
            }
        }
        const int np = static_cast<int>(patch_nodes.size());
        M = Eigen::MatrixXd::Zero(np, np);

        const Box& b1 = mesh.elements[static_cast<std::size_t>(e1)];
        const Box& b2 = mesh.elements[static_cast<std::size_t>(e2)];
        for (const Box* box : {&b1, &b2}) {
            const QuadRule rule = tensor_gauss(*box, quad_order);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec2& x = rule.points[q];
                const auto v1 = values(fe::to_reference(b1, x));
                const auto v2 = values(fe::to_reference(b2, x));
                Eigen::VectorXd psi = Eigen::VectorXd::Zero(np);
                for (int a = 0; a < NN; ++a) {
                    psi[map1[static_cast<std::size_t>(a)]] += v1[static_cast<std::size_t>(a)];
                    psi[map2[static_cast<std::size_t>(a)]] -= v2[static_cast<std::size_t>(a)];
                }
                M.noalias() += rule.weights[q] * psi * psi.transpose();
            }
        }
    }
};

}  // namespace detail

/// Ghost penalty on the velocity: mu J with the 1/h_e^2 scaling, built from
/// canonical polynomial extensions across each ghost facet patch.
inline SparseBlock assemble_ghost_velocity(const TwoPhaseSpace& sp, const CutTopology& topo,
                                           const PhysicalParams& prm) {
    SparseBlock blk;
    blk.rows = blk.cols = sp.total_dofs;
    const BackgroundMesh& mesh = *sp.mesh;

    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        const double factor = prm.mu(p) * prm.gamma_u(p);
        if (factor == 0.0) continue;
        for (int f : topo.ghost_facets_of(p)) {
            const Facet& fac = mesh.interior_facets[static_cast<std::size_t>(f)];
            const double h_e = mesh.h;
            detail::PatchAccumulator<fe::q2_nodes, decltype(&fe::q2_values)> acc;
            acc.build(mesh, fac.elem_a, fac.elem_b, sp.element_q2_nodes(fac.elem_a),
                      sp.element_q2_nodes(fac.elem_b), &fe::q2_values, 5);
            const double scale = factor / (h_e * h_e);
            const int np = static_cast<int>(acc.patch_nodes.size());
            for (int k = 0; k < np; ++k) {
                for (int l = 0; l < np; ++l) {
                    const double v = scale * acc.M(k, l);
                    if (v == 0.0) continue;
                    for (int c = 0; c < 2; ++c)
                        blk.add(sp.vel_dof(p, acc.patch_nodes[static_cast<std::size_t>(k)], c),
                                sp.vel_dof(p, acc.patch_nodes[static_cast<std::size_t>(l)], c), v);
                }
            }
        }
    }
    return blk;
}

/// Ghost penalty on the pressure: mu^{-1} J without an h factor.
inline SparseBlock assemble_ghost_pressure(const TwoPhaseSpace& sp, const CutTopology& topo,
                                           const PhysicalParams& prm) {
    SparseBlock blk;
    blk.rows = blk.cols = sp.total_dofs;
    const BackgroundMesh& mesh = *sp.mesh;

    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        const double factor = prm.gamma_p(p) / prm.mu(p);
        if (factor == 0.0) continue;
        for (int f : topo.ghost_facets_of(p)) {
            const Facet& fac = mesh.interior_facets[static_cast<std::size_t>(f)];
            detail::PatchAccumulator<fe::q1_nodes, decltype(&fe::q1_values)> acc;
            acc.build(mesh, fac.elem_a, fac.elem_b, sp.element_q1_nodes(fac.elem_a),
                      sp.element_q1_nodes(fac.elem_b), &fe::q1_values, 3);
            const int np = static_cast<int>(acc.patch_nodes.size());
            for (int k = 0; k < np; ++k)
                for (int l = 0; l < np; ++l) {
                    const double v = factor * acc.M(k, l);
                    if (v != 0.0)
                        blk.add(sp.pres_dof(p, acc.patch_nodes[static_cast<std::size_t>(k)]),
                                sp.pres_dof(p, acc.patch_nodes[static_cast<std::size_t>(l)]), v);
                }
        }
    }
    return blk;
}

/// Pressure-velocity coupling: -(p, div v) per phase plus <{p},[v.n]> on the
/// interface. Rows are pressure unknowns, columns velocity unknowns.
inline SparseBlock assemble_b_h(const TwoPhaseSpace& sp, const CutTopology& topo,
                                const GeometryCache& geo, const PhysicalParams& prm) {
    SparseBlock blk;
    blk.rows = blk.cols = sp.total_dofs;

    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        for (int e : topo.elements_of(p)) {
            const QuadRule& rule = geo.volume(e, p);
            if (rule.size() == 0) continue;
            const Box& box = sp.mesh->elements[static_cast<std::size_t>(e)];
            const Vec2 scale = fe::reference_scale(box);
            const auto vnodes = sp.element_q2_nodes(e);
            const auto pnodes = sp.element_q1_nodes(e);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec2 xi = fe::to_reference(box, rule.points[q]);
                const auto pv = fe::q1_values(xi);
                const auto gr = fe::q2_gradients(xi);
                const double w = rule.weights[q];
                for (int a = 0; a < fe::q1_nodes; ++a) {
                    const int row = sp.pres_dof(p, pnodes[static_cast<std::size_t>(a)]);
                    const double Pa = pv[static_cast<std::size_t>(a)];
                    for (int b = 0; b < fe::q2_nodes; ++b) {
                        const Vec2 gb(gr[static_cast<std::size_t>(b)].x() * scale.x(),
                                      gr[static_cast<std::size_t>(b)].y() * scale.y());
                        for (int d = 0; d < 2; ++d)
                            blk.add(row, sp.vel_dof(p, vnodes[static_cast<std::size_t>(b)], d),
                                    -w * Pa * gb[d]);
                    }
                }
            }
        }
    }

    for (int e : topo.elements_cut) {
        const QuadRule& rule = geo.interface[static_cast<std::size_t>(e)];
        const Box& box = sp.mesh->elements[static_cast<std::size_t>(e)];
        const auto vnodes = sp.element_q2_nodes(e);
        const auto pnodes = sp.element_q1_nodes(e);
        Eigen::Matrix<double, 8, 36> K = Eigen::Matrix<double, 8, 36>::Zero();
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const Vec2 xi = fe::to_reference(box, rule.points[q]);
            const Vec2& n = rule.normals[q];
            const double w = rule.weights[q];
            const auto pv = fe::q1_values(xi);
            const auto vv = fe::q2_values(xi);
            for (int si = 0; si < 2; ++si) {
                const Phase s = static_cast<Phase>(si);
                const double cw = prm.curly_weight(s);
                if (cw == 0.0) continue;
                for (int ti = 0; ti < 2; ++ti) {
                    const Phase t = static_cast<Phase>(ti);
                    const double sig_t = PhysicalParams::jump_sign(t);
                    for (int a = 0; a < fe::q1_nodes; ++a)
                        for (int b = 0; b < fe::q2_nodes; ++b)
                            for (int d = 0; d < 2; ++d)
                                K(si * 4 + a, ti * 18 + 2 * b + d) +=
                                    w * cw * pv[static_cast<std::size_t>(a)] * sig_t * n[d] *
                                    vv[static_cast<std::size_t>(b)];
                }
            }
        }
        for (int row = 0; row < 8; ++row) {
            const int prow = sp.pres_dof(static_cast<Phase>(row / 4),
                                         pnodes[static_cast<std::size_t>(row % 4)]);
            for (int col = 0; col < 36; ++col)
                blk.add(prow,
                        sp.vel_dof(static_cast<Phase>(col / 18),
                                   vnodes[static_cast<std::size_t>((col % 18) / 2)], col % 2),
                        K(row, col));
        }
    }
    return blk;
}

/// Load functional: per-phase body force over the exact cut volumes plus the
/// interface traction paired with the skew-average normal trace.
inline Eigen::VectorXd assemble_rhs(const TwoPhaseSpace& sp, const CutTopology& topo,
                                    const GeometryCache& geo, const PhysicalParams& prm,
                                    const std::function<Vec2(const Vec2&)>& f_minus,
                                    const std::function<Vec2(const Vec2&)>& f_plus,
                                    const std::function<double(const Vec2&)>& g_gamma) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sp.total_dofs);

    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        const auto& f = (p == Phase::Minus) ? f_minus : f_plus;
        for (int e : topo.elements_of(p)) {
            const QuadRule& rule = geo.volume(e, p);
            if (rule.size() == 0) continue;
            const Box& box = sp.mesh->elements[static_cast<std::size_t>(e)];
            const auto nodes = sp.element_q2_nodes(e);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const Vec2 fx = f(rule.points[q]);
                const auto vals = fe::q2_values(fe::to_reference(box, rule.points[q]));
                const double w = rule.weights[q];
                for (int a = 0; a < fe::q2_nodes; ++a)
                    for (int c = 0; c < 2; ++c)
                        rhs[sp.vel_dof(p, nodes[static_cast<std::size_t>(a)], c)] +=
                            w * fx[c] * vals[static_cast<std::size_t>(a)];
            }
        }
    }

    for (int e : topo.elements_cut) {
        const QuadRule& rule = geo.interface[static_cast<std::size_t>(e)];
        const Box& box = sp.mesh->elements[static_cast<std::size_t>(e)];
        const auto nodes = sp.element_q2_nodes(e);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double g = g_gamma(rule.points[q]);
            const Vec2& n = rule.normals[q];
            const double w = rule.weights[q];
            const auto vals = fe::q2_values(fe::to_reference(box, rule.points[q]));
            for (int ti = 0; ti < 2; ++ti) {
                const Phase t = static_cast<Phase>(ti);
                const double aw = prm.angle_weight(t);
                if (aw == 0.0) continue;
                for (int a = 0; a < fe::q2_nodes; ++a)
                    for (int c = 0; c < 2; ++c)
                        rhs[sp.vel_dof(t, nodes[static_cast<std::size_t>(a)], c)] +=
                            w * g * aw * n[c] * vals[static_cast<std::size_t>(a)];
            }
        }
    }
    return rhs;
}

/// Weighted pressure-mean functional m(q) = sum_phases mu^{-1} (q, 1)_Omega.
inline Eigen::VectorXd assemble_mean_constraint(const TwoPhaseSpace& sp, const CutTopology& topo,
                                                const GeometryCache& geo,
                                                const PhysicalParams& prm) {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(sp.total_dofs);
    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        const double inv_mu = 1.0 / prm.mu(p);
        for (int e : topo.elements_of(p)) {
            const QuadRule& rule = geo.volume(e, p);
            if (rule.size() == 0) continue;
            const Box& box = sp.mesh->elements[static_cast<std::size_t>(e)];
            const auto nodes = sp.element_q1_nodes(e);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const auto vals = fe::q1_values(fe::to_reference(box, rule.points[q]));
                for (int a = 0; a < fe::q1_nodes; ++a)
                    m[sp.pres_dof(p, nodes[static_cast<std::size_t>(a)])] +=
                        inv_mu * rule.weights[q] * vals[static_cast<std::size_t>(a)];
            }
        }
    }
    return m;
}

}  // namespace cutstokes

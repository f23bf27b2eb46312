#pragma once

#include "cutstokes/assembly.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <functional>
#include <stdexcept>
#include <vector>

namespace cutstokes {

/// Assembled blocks of the discrete problem, prior to composition.
struct AssembledBlocks {
    SparseBlock a_i;
    SparseBlock a_n;
    SparseBlock a_ghost;
    SparseBlock b;        // rows pressure, cols velocity
    SparseBlock c_ghost;  // pressure-pressure
    Eigen::VectorXd rhs;
    Eigen::VectorXd mean_constraint;
};

inline AssembledBlocks assemble_all(const TwoPhaseSpace& sp, const CutTopology& topo,
                                    const GeometryCache& geo, const PhysicalParams& prm,
                                    const std::function<Vec2(const Vec2&)>& f_minus,
                                    const std::function<Vec2(const Vec2&)>& f_plus,
                                    const std::function<double(const Vec2&)>& g_gamma) {
    prm.validate();
    AssembledBlocks blocks;
    blocks.a_i = assemble_a_i(sp, topo, geo, prm);
    blocks.a_n = assemble_a_n(sp, topo, geo, prm);
    blocks.a_ghost = assemble_ghost_velocity(sp, topo, prm);
    blocks.c_ghost = assemble_ghost_pressure(sp, topo, prm);
    blocks.b = assemble_b_h(sp, topo, geo, prm);
    blocks.rhs = assemble_rhs(sp, topo, geo, prm, f_minus, f_plus, g_gamma);
    blocks.mean_constraint = assemble_mean_constraint(sp, topo, geo, prm);
    return blocks;
}

/// Symmetric bordered saddle system
///   [ A   B^T  0 ] [u]       [r]
///   [ B  -C    m ] [p]   =   [0]
///   [ 0   m^T  0 ] [lambda]  [0]
/// with strong Dirichlet rows already eliminated symmetrically.
struct SaddleSystem {
    const TwoPhaseSpace* space = nullptr;
    int size = 0;
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs;
};

/// Replace boundary velocity rows of the plus phase by identities with the
/// prescribed nodal values, moving columns into the right-hand side.
inline void apply_dirichlet(const TwoPhaseSpace& sp, const std::function<Vec2(const Vec2&)>& g,
                            std::vector<Eigen::Triplet<double>>& triplets, Eigen::VectorXd& rhs) {
    std::vector<char> is_dirichlet(static_cast<std::size_t>(sp.total_dofs), 0);
    std::vector<double> bc_value(static_cast<std::size_t>(sp.total_dofs), 0.0);
    for (int node : sp.dirichlet_nodes) {
        const Vec2 gval = g(sp.q2_node_coords(node));
        for (int c = 0; c < 2; ++c) {
            const int dof = sp.vel_dof(Phase::Plus, node, c);
            if (dof < 0)
                throw std::logic_error("apply_dirichlet: boundary node outside the plus phase");
            is_dirichlet[static_cast<std::size_t>(dof)] = 1;
            bc_value[static_cast<std::size_t>(dof)] = gval[c];
        }
    }

    std::vector<Eigen::Triplet<double>> kept;
    kept.reserve(triplets.size() + sp.dirichlet_nodes.size() * 2);
    for (const auto& t : triplets) {
        const bool dr = is_dirichlet[static_cast<std::size_t>(t.row())];
        const bool dc = is_dirichlet[static_cast<std::size_t>(t.col())];
        if (!dr && !dc) {
            kept.push_back(t);
        } else if (!dr && dc) {
            rhs[t.row()] -= t.value() * bc_value[static_cast<std::size_t>(t.col())];
        }
        // Rows of Dirichlet dofs are dropped entirely.
    }
    for (int dof = 0; dof < sp.total_dofs; ++dof) {
        if (is_dirichlet[static_cast<std::size_t>(dof)]) {
            kept.emplace_back(dof, dof, 1.0);
            rhs[dof] = bc_value[static_cast<std::size_t>(dof)];
        }
    }
    triplets.swap(kept);
}

inline SaddleSystem build_system(const TwoPhaseSpace& sp, const AssembledBlocks& blocks,
                                 const std::function<Vec2(const Vec2&)>& dirichlet_g) {
    SaddleSystem sys;
    sys.space = &sp;
    sys.size = sp.total_dofs;
    if (blocks.rhs.size() != sp.total_dofs || blocks.mean_constraint.size() != sp.total_dofs)
        throw std::logic_error("build_system: block dimensions do not match the space");

    auto& T = sys.triplets;
    auto append = [&](const SparseBlock& blk) {
        T.insert(T.end(), blk.triplets.begin(), blk.triplets.end());
    };
    append(blocks.a_i);
    append(blocks.a_n);
    append(blocks.a_ghost);
    for (const auto& t : blocks.b.triplets) {
        T.emplace_back(t.row(), t.col(), t.value());  // continuity row: +B u
        T.emplace_back(t.col(), t.row(), t.value());  // momentum row: +B^T p
    }
    for (const auto& t : blocks.c_ghost.triplets)
        T.emplace_back(t.row(), t.col(), -t.value());  // continuity row: -C p
    const int lam = sp.multiplier_index;
    for (int i = 0; i < sp.total_dofs; ++i) {
        const double mi = blocks.mean_constraint[i];
        if (mi != 0.0) {
            T.emplace_back(i, lam, mi);
            T.emplace_back(lam, i, mi);
        }
    }

    sys.rhs = blocks.rhs;
    apply_dirichlet(sp, dirichlet_g, sys.triplets, sys.rhs);
    return sys;
}

enum class SolveStatus { Ok, NonConverged, Singular };

struct SolveResult {
    Eigen::VectorXd x;
    double residual = 0.0;  // relative, ||Kx-b|| / ||b||
    SolveStatus status = SolveStatus::Ok;

    VelocityField velocity(Phase p) const { return extract_velocity(*space, p, x); }
    PressureField pressure(Phase p) const { return extract_pressure(*space, p, x); }
    double multiplier() const { return x[space->multiplier_index]; }

    const TwoPhaseSpace* space = nullptr;
};

/// Direct sparse factorization. Deterministic for fixed inputs.
inline SolveResult solve(const SaddleSystem& sys, double tol = 1e-10) {
    Eigen::SparseMatrix<double> K(sys.size, sys.size);
    K.setFromTriplets(sys.triplets.begin(), sys.triplets.end());
    K.makeCompressed();

    SolveResult out;
    out.space = sys.space;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(K);
    lu.factorize(K);
    if (lu.info() != Eigen::Success) {
        out.status = SolveStatus::Singular;
        out.x = Eigen::VectorXd::Zero(sys.size);
        out.residual = std::numeric_limits<double>::infinity();
        return out;
    }
    out.x = lu.solve(sys.rhs);
    // Iterative refinement recovers digits lost to the factorization.
    for (int it = 0; it < 2; ++it) {
        const Eigen::VectorXd r = sys.rhs - K * out.x;
        out.x += lu.solve(r);
    }
    const double bnorm = sys.rhs.norm();
    const double rnorm = (K * out.x - sys.rhs).norm();
    out.residual = (bnorm > 0.0) ? rnorm / bnorm : rnorm;
    if (!(out.residual <= tol)) out.status = SolveStatus::NonConverged;
    return out;
}

}  // namespace cutstokes

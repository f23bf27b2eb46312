#pragma once

#include "cutstokes/fe.hpp"
#include "cutstokes/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <vector>

namespace cutstokes {

/// Per-phase Q2 vector velocity and Q1 scalar pressure spaces on the active
/// meshes, with independent unknowns per phase on the cut band. Global
/// unknown ordering: [u-, u+, p-, p+, lambda].
struct TwoPhaseSpace {
    const BackgroundMesh* mesh = nullptr;
    const CutTopology* topo = nullptr;

    // Velocity nodes live on the (2n+1)^2 grid, pressure on the (n+1)^2 grid.
    std::array<std::vector<int>, 2> vel_local;   // global Q2 node -> phase-local node or -1
    std::array<std::vector<int>, 2> vel_nodes;   // phase-local node -> global Q2 node
    std::array<std::vector<int>, 2> pres_local;  // global Q1 node -> phase-local node or -1
    std::array<std::vector<int>, 2> pres_nodes;

    std::array<int, 2> vel_offset{};   // start of each phase's velocity dofs
    std::array<int, 2> pres_offset{};
    int multiplier_index = -1;
    int total_dofs = 0;

    std::vector<int> dirichlet_nodes;  // global Q2 nodes on the domain boundary

    int q2_grid_width() const { return 2 * mesh->n + 1; }
    int q1_grid_width() const { return mesh->n + 1; }

    int num_vel_dofs(Phase p) const {
        return 2 * static_cast<int>(vel_nodes[static_cast<std::size_t>(phase_index(p))].size());
    }
    int num_pres_dofs(Phase p) const {
        return static_cast<int>(pres_nodes[static_cast<std::size_t>(phase_index(p))].size());
    }
    int num_velocity_dofs() const { return num_vel_dofs(Phase::Minus) + num_vel_dofs(Phase::Plus); }
    int num_pressure_dofs() const { return num_pres_dofs(Phase::Minus) + num_pres_dofs(Phase::Plus); }

    /// Global system index of a velocity unknown, or -1 if the node is not
    /// active in the phase.
    int vel_dof(Phase p, int global_node, int comp) const {
        const int loc = vel_local[static_cast<std::size_t>(phase_index(p))][static_cast<std::size_t>(global_node)];
        if (loc < 0) return -1;
        return vel_offset[static_cast<std::size_t>(phase_index(p))] + 2 * loc + comp;
    }

    int pres_dof(Phase p, int global_node) const {
        const int loc = pres_local[static_cast<std::size_t>(phase_index(p))][static_cast<std::size_t>(global_node)];
        if (loc < 0) return -1;
        return pres_offset[static_cast<std::size_t>(phase_index(p))] + loc;
    }

    /// Global Q2 node ids of an element, local row-major order.
    std::array<int, fe::q2_nodes> element_q2_nodes(int e) const {
        const int n = mesh->n;
        const int i = e % n, j = e / n;
        const int w = q2_grid_width();
        std::array<int, fe::q2_nodes> out{};
        for (int b = 0; b < 3; ++b)
            for (int a = 0; a < 3; ++a)
                out[static_cast<std::size_t>(b * 3 + a)] = (2 * j + b) * w + (2 * i + a);
        return out;
    }

    std::array<int, fe::q1_nodes> element_q1_nodes(int e) const {
        const int n = mesh->n;
        const int i = e % n, j = e / n;
        const int w = q1_grid_width();
        std::array<int, fe::q1_nodes> out{};
        for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a)
                out[static_cast<std::size_t>(b * 2 + a)] = (j + b) * w + (i + a);
        return out;
    }

    Vec2 q2_node_coords(int global_node) const {
        const int w = q2_grid_width();
        const int i = global_node % w, j = global_node / w;
        return Vec2(-1.0 + 0.5 * mesh->h * i, -1.0 + 0.5 * mesh->h * j);
    }

    Vec2 q1_node_coords(int global_node) const {
        const int w = q1_grid_width();
        const int i = global_node % w, j = global_node / w;
        return Vec2(-1.0 + mesh->h * i, -1.0 + mesh->h * j);
    }
};

inline TwoPhaseSpace build_space(const BackgroundMesh& mesh, const CutTopology& topo) {
    TwoPhaseSpace sp;
    sp.mesh = &mesh;
    sp.topo = &topo;
    const int q2n = sp.q2_grid_width() * sp.q2_grid_width();
    const int q1n = sp.q1_grid_width() * sp.q1_grid_width();

    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        auto& vloc = sp.vel_local[static_cast<std::size_t>(pi)];
        auto& ploc = sp.pres_local[static_cast<std::size_t>(pi)];
        vloc.assign(static_cast<std::size_t>(q2n), -1);
        ploc.assign(static_cast<std::size_t>(q1n), -1);
        for (int e : topo.elements_of(p)) {
            for (int node : sp.element_q2_nodes(e)) vloc[static_cast<std::size_t>(node)] = 0;
            for (int node : sp.element_q1_nodes(e)) ploc[static_cast<std::size_t>(node)] = 0;
        }
        // Ascending global node order gives deterministic numbering.
        for (int node = 0; node < q2n; ++node)
            if (vloc[static_cast<std::size_t>(node)] == 0) {
                vloc[static_cast<std::size_t>(node)] =
                    static_cast<int>(sp.vel_nodes[static_cast<std::size_t>(pi)].size());
                sp.vel_nodes[static_cast<std::size_t>(pi)].push_back(node);
            }
        for (int node = 0; node < q1n; ++node)
            if (ploc[static_cast<std::size_t>(node)] == 0) {
                ploc[static_cast<std::size_t>(node)] =
                    static_cast<int>(sp.pres_nodes[static_cast<std::size_t>(pi)].size());
                sp.pres_nodes[static_cast<std::size_t>(pi)].push_back(node);
            }
    }

    sp.vel_offset[0] = 0;
    sp.vel_offset[1] = sp.num_vel_dofs(Phase::Minus);
    sp.pres_offset[0] = sp.vel_offset[1] + sp.num_vel_dofs(Phase::Plus);
    sp.pres_offset[1] = sp.pres_offset[0] + sp.num_pres_dofs(Phase::Minus);
    sp.multiplier_index = sp.pres_offset[1] + sp.num_pres_dofs(Phase::Plus);
    sp.total_dofs = sp.multiplier_index + 1;

    const int w = sp.q2_grid_width();
    for (int node = 0; node < q2n; ++node) {
        const int i = node % w, j = node / w;
        if (i == 0 || j == 0 || i == w - 1 || j == w - 1) sp.dirichlet_nodes.push_back(node);
    }
    return sp;
}

/// Coefficients of one phase's vector Q2 field; layout (node local, comp).
struct VelocityField {
    const TwoPhaseSpace* space = nullptr;
    Phase phase = Phase::Minus;
    Eigen::VectorXd coeffs;

    double coeff(int local_node, int comp) const { return coeffs[2 * local_node + comp]; }

    Vec2 eval(int e, const Vec2& p) const {
        const Vec2 xi = fe::to_reference(space->mesh->elements[static_cast<std::size_t>(e)], p);
        const auto vals = fe::q2_values(xi);
        const auto nodes = space->element_q2_nodes(e);
        Vec2 u = Vec2::Zero();
        for (int a = 0; a < fe::q2_nodes; ++a) {
            const int loc = space->vel_local[static_cast<std::size_t>(phase_index(phase))]
                                            [static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
            u.x() += coeff(loc, 0) * vals[static_cast<std::size_t>(a)];
            u.y() += coeff(loc, 1) * vals[static_cast<std::size_t>(a)];
        }
        return u;
    }

    /// Jacobian du_i/dx_j.
    Mat2 gradient(int e, const Vec2& p) const {
        const Box& box = space->mesh->elements[static_cast<std::size_t>(e)];
        const Vec2 xi = fe::to_reference(box, p);
        const Vec2 scale = fe::reference_scale(box);
        const auto grads = fe::q2_gradients(xi);
        const auto nodes = space->element_q2_nodes(e);
        Mat2 g = Mat2::Zero();
        for (int a = 0; a < fe::q2_nodes; ++a) {
            const int loc = space->vel_local[static_cast<std::size_t>(phase_index(phase))]
                                            [static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
            const Vec2 gn(grads[static_cast<std::size_t>(a)].x() * scale.x(),
                          grads[static_cast<std::size_t>(a)].y() * scale.y());
            for (int c = 0; c < 2; ++c) {
                g(c, 0) += coeff(loc, c) * gn.x();
                g(c, 1) += coeff(loc, c) * gn.y();
            }
        }
        return g;
    }

    Mat2 sym_gradient(int e, const Vec2& p) const {
        const Mat2 g = gradient(e, p);
        return 0.5 * (g + g.transpose());
    }
};

struct PressureField {
    const TwoPhaseSpace* space = nullptr;
    Phase phase = Phase::Minus;
    Eigen::VectorXd coeffs;

    double eval(int e, const Vec2& p) const {
        const Vec2 xi = fe::to_reference(space->mesh->elements[static_cast<std::size_t>(e)], p);
        const auto vals = fe::q1_values(xi);
        const auto nodes = space->element_q1_nodes(e);
        double v = 0.0;
        for (int a = 0; a < fe::q1_nodes; ++a) {
            const int loc = space->pres_local[static_cast<std::size_t>(phase_index(phase))]
                                             [static_cast<std::size_t>(nodes[static_cast<std::size_t>(a)])];
            v += coeffs[loc] * vals[static_cast<std::size_t>(a)];
        }
        return v;
    }
};

inline int locate_element(const BackgroundMesh& mesh, const Vec2& p) {
    auto clampi = [&](double t) {
        const int i = static_cast<int>(std::floor((t + 1.0) / mesh.h));
        return std::clamp(i, 0, mesh.n - 1);
    };
    return clampi(p.y()) * mesh.n + clampi(p.x());
}

inline VelocityField interpolate_velocity(const TwoPhaseSpace& space, Phase phase,
                                          const std::function<Vec2(const Vec2&)>& f) {
    VelocityField out{&space, phase, Eigen::VectorXd::Zero(space.num_vel_dofs(phase))};
    const auto& nodes = space.vel_nodes[static_cast<std::size_t>(phase_index(phase))];
    for (std::size_t loc = 0; loc < nodes.size(); ++loc) {
        const Vec2 v = f(space.q2_node_coords(nodes[loc]));
        out.coeffs[2 * static_cast<Eigen::Index>(loc)] = v.x();
        out.coeffs[2 * static_cast<Eigen::Index>(loc) + 1] = v.y();
    }
    return out;
}

inline PressureField interpolate_pressure(const TwoPhaseSpace& space, Phase phase,
                                          const std::function<double(const Vec2&)>& f) {
    PressureField out{&space, phase, Eigen::VectorXd::Zero(space.num_pres_dofs(phase))};
    const auto& nodes = space.pres_nodes[static_cast<std::size_t>(phase_index(phase))];
    for (std::size_t loc = 0; loc < nodes.size(); ++loc)
        out.coeffs[static_cast<Eigen::Index>(loc)] = f(space.q1_node_coords(nodes[loc]));
    return out;
}

/// Scatter one phase's field coefficients into a full system-sized vector.
inline void scatter_velocity(const TwoPhaseSpace& space, const VelocityField& f,
                             Eigen::VectorXd& x) {
    const auto& nodes = space.vel_nodes[static_cast<std::size_t>(phase_index(f.phase))];
    for (std::size_t loc = 0; loc < nodes.size(); ++loc)
        for (int c = 0; c < 2; ++c)
            x[space.vel_offset[static_cast<std::size_t>(phase_index(f.phase))] +
              2 * static_cast<Eigen::Index>(loc) + c] = f.coeffs[2 * static_cast<Eigen::Index>(loc) + c];
}

inline void scatter_pressure(const TwoPhaseSpace& space, const PressureField& f,
                             Eigen::VectorXd& x) {
    const auto& nodes = space.pres_nodes[static_cast<std::size_t>(phase_index(f.phase))];
    for (std::size_t loc = 0; loc < nodes.size(); ++loc)
        x[space.pres_offset[static_cast<std::size_t>(phase_index(f.phase))] +
          static_cast<Eigen::Index>(loc)] = f.coeffs[static_cast<Eigen::Index>(loc)];
}

/// Extract one phase's field from a full system-sized vector.
inline VelocityField extract_velocity(const TwoPhaseSpace& space, Phase phase,
                                      const Eigen::VectorXd& x) {
    VelocityField out{&space, phase, Eigen::VectorXd::Zero(space.num_vel_dofs(phase))};
    const int off = space.vel_offset[static_cast<std::size_t>(phase_index(phase))];
    for (int k = 0; k < space.num_vel_dofs(phase); ++k) out.coeffs[k] = x[off + k];
    return out;
}

inline PressureField extract_pressure(const TwoPhaseSpace& space, Phase phase,
                                      const Eigen::VectorXd& x) {
    PressureField out{&space, phase, Eigen::VectorXd::Zero(space.num_pres_dofs(phase))};
    const int off = space.pres_offset[static_cast<std::size_t>(phase_index(phase))];
    for (int k = 0; k < space.num_pres_dofs(phase); ++k) out.coeffs[k] = x[off + k];
    return out;
}

}  // namespace cutstokes

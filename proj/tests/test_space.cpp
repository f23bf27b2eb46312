#include "cutstokes/space.hpp"

#include <catch2/catch.hpp>

#include <cmath>
#include <random>

using namespace cutstokes;

namespace {

struct Setup {
    BackgroundMesh mesh;
    CircleLevelSet ls;
    CutTopology topo;
    TwoPhaseSpace space;

    Setup(int n, const Vec2& c = Vec2(0.0, 0.0), double r = 2.0 / 3.0, bool enforce = true)
        : mesh(build_mesh(n)),
          ls(c, r),
          topo(build_cut_topology(mesh, ls, enforce)),
          space(build_space(mesh, topo)) {}
};

}  // namespace

TEST_CASE("dof counts follow the active node sets") {
    Setup s(4);
    // Q1 vertices touching the minus mesh.
    std::vector<char> touched(static_cast<std::size_t>(s.space.q1_grid_width() *
                                                       s.space.q1_grid_width()),
                              0);
    for (int e : s.topo.elements_minus)
        for (int node : s.space.element_q1_nodes(e)) touched[static_cast<std::size_t>(node)] = 1;
    int count = 0;
    for (char t : touched) count += t;
    REQUIRE(s.space.num_pres_dofs(Phase::Minus) == count);

    // No-cut degenerate: everything plus, the minus space is empty.
    const BackgroundMesh m4 = build_mesh(4);
    CutTopology empty_topo;
    empty_topo.elem_class.assign(static_cast<std::size_t>(m4.num_elements()),
                                 ElementCutClass::InsidePlus);
    for (int e = 0; e < m4.num_elements(); ++e) empty_topo.elements_plus.push_back(e);
    const TwoPhaseSpace sp = build_space(m4, empty_topo);
    REQUIRE(sp.num_vel_dofs(Phase::Minus) == 0);
    REQUIRE(sp.num_vel_dofs(Phase::Plus) == 2 * 9 * 9);

    // n=2 with every element cut: both spaces span the full Q2 grid.
    const BackgroundMesh m2 = build_mesh(2);
    const CircleLevelSet ls2(Vec2(0.0, 0.0), 2.0 / 3.0);
    const CutTopology t2 = build_cut_topology(m2, ls2, /*enforce_internal=*/false);
    REQUIRE(t2.elements_cut.size() == 4);
    const TwoPhaseSpace sp2 = build_space(m2, t2);
    REQUIRE(sp2.num_vel_dofs(Phase::Plus) == 2 * (2 * 2 + 1) * (2 * 2 + 1));
    REQUIRE(sp2.num_vel_dofs(Phase::Minus) == 50);
}

TEST_CASE("cut-band nodes own one unknown per phase") {
    Setup s(8);
    for (int e : s.topo.elements_cut) {
        for (int node : s.space.element_q2_nodes(e)) {
            const int dm = s.space.vel_dof(Phase::Minus, node, 0);
            const int dp = s.space.vel_dof(Phase::Plus, node, 0);
            REQUIRE(dm >= 0);
            REQUIRE(dp >= 0);
            REQUIRE(dm != dp);
        }
    }
    const int total = s.space.num_velocity_dofs() + s.space.num_pressure_dofs() + 1;
    REQUIRE(s.space.total_dofs == total);
    REQUIRE(s.space.multiplier_index == total - 1);
}

TEST_CASE("interpolation reproduces constants and Q2 polynomials") {
    Setup s(8);
    const VelocityField ones = interpolate_velocity(s.space, Phase::Plus, [](const Vec2&) {
        return Vec2(1.0, 1.0);
    });
    for (int i = 0; i < ones.coeffs.size(); ++i) REQUIRE(ones.coeffs[i] == 1.0);

    // A global tensor-quadratic: reproduced exactly at arbitrary points.
    auto q2fun = [](const Vec2& p) {
        return Vec2(0.3 + p.x() * (1.2 - 0.7 * p.x()) + p.y() * (0.4 + 0.5 * p.y()) +
                        0.25 * p.x() * p.x() * p.y() * p.y(),
                    -0.8 + 0.6 * p.x() * p.y() - 0.2 * p.y() * p.y());
    };
    const VelocityField f = interpolate_velocity(s.space, Phase::Plus, q2fun);
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> unif(-0.999, 0.999);
    for (int t = 0; t < 50; ++t) {
        const Vec2 p(unif(gen), unif(gen));
        const int e = locate_element(s.mesh, p);
        if (!s.topo.in_phase(e, Phase::Plus)) continue;
        const Vec2 diff = f.eval(e, p) - q2fun(p);
        REQUIRE(diff.norm() <= 1e-13);
    }
}

TEST_CASE("partition of unity at quadrature points") {
    Setup s(8);
    const GeometryCache geo = build_geometry(s.mesh, s.topo, s.ls, 5);
    for (int e : s.topo.elements_minus) {
        const QuadRule& rule = geo.volume(e, Phase::Minus);
        const Box& box = s.mesh.elements[static_cast<std::size_t>(e)];
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const auto vals = fe::q2_values(fe::to_reference(box, rule.points[q]));
            double sum = 0.0;
            for (double v : vals) sum += v;
            REQUIRE(std::abs(sum - 1.0) <= 1e-13);
        }
    }
}

TEST_CASE("jump of identical phase fields vanishes on the interface") {
    Setup s(16);
    auto smooth = [](const Vec2& p) {
        return Vec2(std::sin(p.x()) * std::cos(p.y()), p.x() * p.y() - 0.3 * p.y());
    };
    const VelocityField um = interpolate_velocity(s.space, Phase::Minus, smooth);
    const VelocityField up = interpolate_velocity(s.space, Phase::Plus, smooth);
    for (int e : s.topo.elements_cut) {
        const QuadRule iface =
            interface_quadrature(s.mesh.elements[static_cast<std::size_t>(e)], s.ls, 5);
        for (const Vec2& p : iface.points) {
            const Vec2 jump = um.eval(e, p) - up.eval(e, p);
            REQUIRE(jump.norm() <= 1e-12);
        }
    }
}

TEST_CASE("nodal evaluation reproduces coefficients") {
    Setup s(4);
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    VelocityField f{&s.space, Phase::Minus,
                    Eigen::VectorXd::Zero(s.space.num_vel_dofs(Phase::Minus))};
    for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = unif(gen);
    for (int e : s.topo.elements_minus) {
        const auto nodes = s.space.element_q2_nodes(e);
        for (int node : nodes) {
            const Vec2 x = s.space.q2_node_coords(node);
            const int loc =
                s.space.vel_local[static_cast<std::size_t>(phase_index(Phase::Minus))]
                                 [static_cast<std::size_t>(node)];
            const Vec2 v = f.eval(e, x);
            REQUIRE(std::abs(v.x() - f.coeff(loc, 0)) <= 1e-13);
            REQUIRE(std::abs(v.y() - f.coeff(loc, 1)) <= 1e-13);
        }
    }
}

TEST_CASE("interpolation error on the interface decays cubically") {
    // Smooth non-polynomial target sampled at interface quadrature points.
    auto target = [](const Vec2& p) {
        return Vec2(std::sin(2.0 * p.x() + 0.5) * std::cos(p.y()),
                    std::cos(p.x()) * std::sin(2.0 * p.y() - 0.2));
    };
    double prev = 0.0;
    for (int n : {8, 16, 32}) {
        Setup s(n);
        const VelocityField f = interpolate_velocity(s.space, Phase::Minus, target);
        double err = 0.0;
        for (int e : s.topo.elements_cut) {
            const QuadRule iface =
                interface_quadrature(s.mesh.elements[static_cast<std::size_t>(e)], s.ls, 5);
            for (const Vec2& p : iface.points)
                err = std::max(err, (f.eval(e, p) - target(p)).norm());
        }
        if (prev > 0.0) {
            const double order = std::log2(prev / err);
            REQUIRE(order >= 2.6);
        }
        prev = err;
    }
}

TEST_CASE("dirichlet nodes lie on the boundary and in the plus phase") {
    Setup s(8);
    for (int node : s.space.dirichlet_nodes) {
        const Vec2 x = s.space.q2_node_coords(node);
        const bool on_boundary = std::abs(std::abs(x.x()) - 1.0) <= 1e-14 ||
                                 std::abs(std::abs(x.y()) - 1.0) <= 1e-14;
        REQUIRE(on_boundary);
        REQUIRE(s.space.vel_dof(Phase::Plus, node, 0) >= 0);
        REQUIRE(s.space.vel_dof(Phase::Plus, node, 1) >= 0);
    }
    const int w = s.space.q2_grid_width();
    REQUIRE(static_cast<int>(s.space.dirichlet_nodes.size()) == 4 * (w - 1));
}

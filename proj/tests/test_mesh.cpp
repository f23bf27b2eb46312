#include "cutstokes/mesh.hpp"

#include <catch2/catch.hpp>

#include <cmath>
#include <set>

using namespace cutstokes;

TEST_CASE("uniform mesh counts and measures") {
    const BackgroundMesh m4 = build_mesh(4);
    REQUIRE(m4.num_elements() == 16);
    REQUIRE(m4.num_vertices() == 25);
    REQUIRE(m4.interior_facets.size() == 24);
    REQUIRE(m4.h == Approx(0.5));

    const BackgroundMesh m2 = build_mesh(2);
    REQUIRE(m2.num_elements() == 4);
    REQUIRE(m2.h == Approx(1.0));

    const BackgroundMesh m64 = build_mesh(64);
    REQUIRE(m64.num_elements() == 4096);

    double area = 0.0;
    for (const Box& e : m4.elements) area += e.area();
    REQUIRE(area == Approx(4.0).epsilon(1e-15));

    REQUIRE_THROWS_AS(build_mesh(1), std::invalid_argument);
}

TEST_CASE("interior facets have two distinct neighbors") {
    const BackgroundMesh mesh = build_mesh(6);
    for (const Facet& f : mesh.interior_facets) {
        REQUIRE(f.elem_a != f.elem_b);
        REQUIRE(f.elem_a >= 0);
        REQUIRE(f.elem_b < mesh.num_elements());
        // Neighbors differ by one step along the facet axis.
        const int di = f.elem_b - f.elem_a;
        REQUIRE(di == (f.axis == 0 ? 1 : mesh.n));
    }
}

TEST_CASE("cut topology of the reference configuration") {
    const BackgroundMesh mesh = build_mesh(4);
    const CircleLevelSet ls(Vec2(0.0, 0.0), 2.0 / 3.0);
    const CutTopology topo = build_cut_topology(mesh, ls);

    REQUIRE(topo.elements_cut.size() == 12);
    // T_h^Gamma = T_h^- intersect T_h^+
    std::set<int> minus(topo.elements_minus.begin(), topo.elements_minus.end());
    std::set<int> plus(topo.elements_plus.begin(), topo.elements_plus.end());
    for (int e : topo.elements_cut) {
        REQUIRE(minus.count(e) == 1);
        REQUIRE(plus.count(e) == 1);
    }
    // Phase covering: union is everything, InsidePlus only in plus.
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const bool in_minus = minus.count(e) == 1;
        const bool in_plus = plus.count(e) == 1;
        REQUIRE((in_minus || in_plus));
        if (topo.elem_class[static_cast<std::size_t>(e)] == ElementCutClass::InsidePlus)
            REQUIRE((in_plus && !in_minus));
    }
}

TEST_CASE("ghost facet sets satisfy the membership rule") {
    const BackgroundMesh mesh = build_mesh(16);
    const CircleLevelSet ls(Vec2(0.01, -0.02), 2.0 / 3.0);
    const CutTopology topo = build_cut_topology(mesh, ls);

    for (int pi = 0; pi < 2; ++pi) {
        const Phase p = static_cast<Phase>(pi);
        std::set<int> selected(topo.ghost_facets_of(p).begin(), topo.ghost_facets_of(p).end());
        for (std::size_t f = 0; f < mesh.interior_facets.size(); ++f) {
            const Facet& fac = mesh.interior_facets[f];
            const bool both = topo.in_phase(fac.elem_a, p) && topo.in_phase(fac.elem_b, p);
            const bool any_cut =
                topo.elem_class[static_cast<std::size_t>(fac.elem_a)] == ElementCutClass::Cut ||
                topo.elem_class[static_cast<std::size_t>(fac.elem_b)] == ElementCutClass::Cut;
            REQUIRE(selected.count(static_cast<int>(f)) == ((both && any_cut) ? 1u : 0u));
        }
    }
}

TEST_CASE("cut elements cover the interface") {
    const BackgroundMesh mesh = build_mesh(16);
    const CircleLevelSet ls(Vec2(0.0, 0.0), 2.0 / 3.0);
    const CutTopology topo = build_cut_topology(mesh, ls);
    for (int e : topo.elements_cut) {
        const QuadRule iface = interface_quadrature(mesh.elements[static_cast<std::size_t>(e)], ls, 5);
        for (const Vec2& p : iface.points)
            REQUIRE(mesh.elements[static_cast<std::size_t>(e)].contains(p));
    }
    // Total measure only accumulates over cut elements; it must see all of Gamma.
    double circ = 0.0;
    for (int e : topo.elements_cut)
        circ += interface_quadrature(mesh.elements[static_cast<std::size_t>(e)], ls, 5).weight_sum();
    REQUIRE(circ == Approx(4.0 * M_PI / 3.0).margin(1e-6));
}

TEST_CASE("cut band size scales like the perimeter") {
    const CircleLevelSet ls(Vec2(0.0, 0.0), 2.0 / 3.0);
    for (int n : {8, 16, 32, 64}) {
        const BackgroundMesh mesh = build_mesh(n);
        const CutTopology topo = build_cut_topology(mesh, ls);
        const double h = mesh.h;
        const double ratio =
            static_cast<double>(topo.elements_cut.size()) / (4.0 * M_PI * (2.0 / 3.0) / (3.0 * h));
        REQUIRE(ratio >= 0.5);
        REQUIRE(ratio <= 2.0);
    }
}

TEST_CASE("interface reaching the boundary is rejected") {
    const BackgroundMesh mesh = build_mesh(8);
    const CircleLevelSet big(Vec2(0.0, 0.0), 1.05);
    REQUIRE(interface_touches_boundary(mesh, big));
    REQUIRE_THROWS_AS(build_cut_topology(mesh, big), std::runtime_error);

    // A small internal circle still cuts elements whenever r > h*sqrt(2).
    const CircleLevelSet small(Vec2(0.0, 0.0), 0.4);
    REQUIRE_FALSE(interface_touches_boundary(mesh, small));
    const CutTopology topo = build_cut_topology(mesh, small);
    REQUIRE(!topo.elements_cut.empty());
}

TEST_CASE("topology construction is deterministic") {
    const CircleLevelSet ls(Vec2(0.013, 0.007), 2.0 / 3.0);
    const BackgroundMesh mesh = build_mesh(16);
    const CutTopology a = build_cut_topology(mesh, ls);
    const CutTopology b = build_cut_topology(mesh, ls);
    REQUIRE(a.elements_minus == b.elements_minus);
    REQUIRE(a.elements_plus == b.elements_plus);
    REQUIRE(a.elements_cut == b.elements_cut);
    REQUIRE(a.ghost_facets_minus == b.ghost_facets_minus);
    REQUIRE(a.ghost_facets_plus == b.ghost_facets_plus);
}

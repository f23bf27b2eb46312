#pragma once

#include "cutstokes/geometry.hpp"

#include <stdexcept>
#include <vector>

namespace cutstokes {

/// Interior facet between two elements. `axis` is the direction of the facet
/// normal (0: facet is a vertical segment, 1: horizontal).
struct Facet {
    int elem_a = -1;
    int elem_b = -1;
    int axis = 0;
};

/// Uniform n-by-n quad mesh of [-1,1]^2 with row-major element ordering.
struct BackgroundMesh {
    int n = 0;
    double h = 0.0;
    std::vector<Box> elements;
    std::vector<Facet> interior_facets;

    int num_elements() const { return n * n; }
    int num_vertices() const { return (n + 1) * (n + 1); }

    int elem_index(int i, int j) const { return j * n + i; }

    bool is_boundary_element(int e) const {
        const int i = e % n, j = e / n;
        return i == 0 || j == 0 || i == n - 1 || j == n - 1;
    }

    Vec2 vertex(int i, int j) const { return Vec2(-1.0 + h * i, -1.0 + h * j); }
};

inline BackgroundMesh build_mesh(int n) {
    if (n < 2) throw std::invalid_argument("build_mesh: n must be >= 2");
    BackgroundMesh mesh;
    mesh.n = n;
    mesh.h = 2.0 / n;
    mesh.elements.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            mesh.elements.push_back(Box{mesh.vertex(i, j), mesh.vertex(i + 1, j + 1)});
    // Vertical facets (normal along x), then horizontal, both row-major.
    for (int j = 0; j < n; ++j)
        for (int i = 0; i + 1 < n; ++i)
            mesh.interior_facets.push_back(Facet{mesh.elem_index(i, j), mesh.elem_index(i + 1, j), 0});
    for (int j = 0; j + 1 < n; ++j)
        for (int i = 0; i < n; ++i)
            mesh.interior_facets.push_back(Facet{mesh.elem_index(i, j), mesh.elem_index(i, j + 1), 1});
    return mesh;
}

/// Per-element classification plus the active element and ghost-facet sets
/// of the unfitted method.
struct CutTopology {
    std::vector<ElementCutClass> elem_class;
    std::vector<int> elements_minus;  // T_h^-
    std::vector<int> elements_plus;   // T_h^+
    std::vector<int> elements_cut;    // T_h^Gamma
    std::vector<int> ghost_facets_minus;  // indices into mesh.interior_facets
    std::vector<int> ghost_facets_plus;

    bool in_phase(int e, Phase p) const {
        const ElementCutClass c = elem_class[static_cast<std::size_t>(e)];
        if (c == ElementCutClass::Cut) return true;
        return (p == Phase::Minus) ? c == ElementCutClass::InsideMinus
                                   : c == ElementCutClass::InsidePlus;
    }

    const std::vector<int>& elements_of(Phase p) const {
        return p == Phase::Minus ? elements_minus : elements_plus;
    }
    const std::vector<int>& ghost_facets_of(Phase p) const {
        return p == Phase::Minus ? ghost_facets_minus : ghost_facets_plus;
    }
};

/// True when the level set changes sign on the domain boundary, i.e. the
/// internal phase reaches the boundary and the internality assumption fails.
inline bool interface_touches_boundary(const BackgroundMesh& mesh, const CircleLevelSet& ls) {
    const int ns = 4 * mesh.n + 1;
    bool neg = false, pos = false;
    auto probe = [&](const Vec2& p) {
        const double v = ls.value(p);
        neg = neg || v < 0.0;
        pos = pos || v > 0.0;
    };
    for (int i = 0; i < ns; ++i) {
        const double t = -1.0 + 2.0 * i / (ns - 1);
        probe(Vec2(t, -1.0));
        probe(Vec2(t, 1.0));
        probe(Vec2(-1.0, t));
        probe(Vec2(1.0, t));
    }
    return neg && pos;
}

/// True when the level set vanishes (to within tol) at a mesh vertex, the
/// degenerate configuration resolved by perturbing the level set.
inline bool needs_perturbation(const BackgroundMesh& mesh, const CircleLevelSet& ls,
                               double tol = 1e-13) {
    for (int j = 0; j <= mesh.n; ++j)
        for (int i = 0; i <= mesh.n; ++i)
            if (std::abs(ls.value(mesh.vertex(i, j))) <= tol) return true;
    return false;
}

inline CutTopology build_cut_topology(const BackgroundMesh& mesh, const CircleLevelSet& ls,
                                      bool enforce_internal = true) {
    if (enforce_internal && interface_touches_boundary(mesh, ls))
        throw std::runtime_error("build_cut_topology: interface reaches the domain boundary");

    CutTopology topo;
    topo.elem_class.resize(static_cast<std::size_t>(mesh.num_elements()));
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const ElementCutClass c = classify_box(mesh.elements[static_cast<std::size_t>(e)], ls);
        topo.elem_class[static_cast<std::size_t>(e)] = c;
        if (c != ElementCutClass::InsidePlus) topo.elements_minus.push_back(e);
        if (c != ElementCutClass::InsideMinus) topo.elements_plus.push_back(e);
        if (c == ElementCutClass::Cut) topo.elements_cut.push_back(e);
    }
    for (std::size_t f = 0; f < mesh.interior_facets.size(); ++f) {
        const Facet& fac = mesh.interior_facets[f];
        const ElementCutClass ca = topo.elem_class[static_cast<std::size_t>(fac.elem_a)];
        const ElementCutClass cb = topo.elem_class[static_cast<std::size_t>(fac.elem_b)];
        const bool any_cut = ca == ElementCutClass::Cut || cb == ElementCutClass::Cut;
        if (!any_cut) continue;
        if (topo.in_phase(fac.elem_a, Phase::Minus) && topo.in_phase(fac.elem_b, Phase::Minus))
            topo.ghost_facets_minus.push_back(static_cast<int>(f));
        if (topo.in_phase(fac.elem_a, Phase::Plus) && topo.in_phase(fac.elem_b, Phase::Plus))
            topo.ghost_facets_plus.push_back(static_cast<int>(f));
    }
    return topo;
}

/// Cached cut-cell and interface rules for one (mesh, level set) pair.
/// Uncut elements carry the plain tensor rule for their phase.
struct GeometryCache {
    const BackgroundMesh* mesh = nullptr;
    int order = 0;
    std::vector<QuadRule> volume_minus;  // per element
    std::vector<QuadRule> volume_plus;
    std::vector<QuadRule> interface;  // nonempty only on cut elements

    const QuadRule& volume(int e, Phase p) const {
        return p == Phase::Minus ? volume_minus[static_cast<std::size_t>(e)]
                                 : volume_plus[static_cast<std::size_t>(e)];
    }
};

inline GeometryCache build_geometry(const BackgroundMesh& mesh, const CutTopology& topo,
                                    const CircleLevelSet& ls, int order) {
    GeometryCache geo;
    geo.mesh = &mesh;
    geo.order = order;
    const std::size_t ne = static_cast<std::size_t>(mesh.num_elements());
    geo.volume_minus.resize(ne);
    geo.volume_plus.resize(ne);
    geo.interface.resize(ne);
    for (int e = 0; e < mesh.num_elements(); ++e) {
        const Box& box = mesh.elements[static_cast<std::size_t>(e)];
        const ElementCutClass c = topo.elem_class[static_cast<std::size_t>(e)];
        if (c == ElementCutClass::Cut) {
            geo.volume_minus[static_cast<std::size_t>(e)] =
                volume_quadrature(box, ls, Phase::Minus, order);
            geo.volume_plus[static_cast<std::size_t>(e)] =
                volume_quadrature(box, ls, Phase::Plus, order);
            geo.interface[static_cast<std::size_t>(e)] = interface_quadrature(box, ls, order);
        } else if (c == ElementCutClass::InsideMinus) {
            geo.volume_minus[static_cast<std::size_t>(e)] = tensor_gauss(box, order);
        } else {
            geo.volume_plus[static_cast<std::size_t>(e)] = tensor_gauss(box, order);
        }
    }
    return geo;
}

}  // namespace cutstokes

#pragma once

#include "cutstokes/errors.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace cutstokes {

struct CaseConfig {
    Vec2 center = Vec2::Zero();
    double mu_minus = 1.0;
    double mu_plus = 10.0;
    double slip_f = 10.0;
    int n = 32;
    double gamma_nitsche = 40.0;
    double gamma_u_minus = 0.05;
    double gamma_u_plus = 0.05;
    double gamma_p_minus = 0.05;
    double gamma_p_plus = 0.05;
    double alpha = 0.0;
    double beta = 1.0;
    double tol = 1e-10;
    int quad_order = 9;

    PhysicalParams params() const {
        PhysicalParams p;
        p.mu_minus = mu_minus;
        p.mu_plus = mu_plus;
        p.slip_f = slip_f;
        p.gamma_nitsche = gamma_nitsche;
        p.gamma_u_minus = gamma_u_minus;
        p.gamma_u_plus = gamma_u_plus;
        p.gamma_p_minus = gamma_p_minus;
        p.gamma_p_plus = gamma_p_plus;
        p.alpha = alpha;
        p.beta = beta;
        return p;
    }
};

struct CaseResult {
    ErrorReport report;
    SolveStatus status = SolveStatus::Ok;
    double lambda = 0.0;
    bool perturbed = false;
    std::string message;
};

/// One full pipeline run: mesh, cut topology, spaces, assembly, solve,
/// error norms. Failures are recorded in the status, not thrown.
inline CaseResult run_case(const CaseConfig& cfg) {
    CaseResult out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        ManufacturedCase mc = make_case(cfg.center, cfg.mu_minus, cfg.mu_plus, cfg.slip_f);
        const BackgroundMesh mesh = build_mesh(cfg.n);
        if (needs_perturbation(mesh, mc.level_set())) {
            mc.center += Vec2(1e-12, 1e-12);
            out.perturbed = true;
            std::cerr << "warning: level set tangent to mesh vertex; center perturbed by 1e-12\n";
        }
        const CircleLevelSet ls = mc.level_set();
        const CutTopology topo = build_cut_topology(mesh, ls);
        const TwoPhaseSpace space = build_space(mesh, topo);
        const GeometryCache geo = build_geometry(mesh, topo, ls, cfg.quad_order);
        PhysicalParams prm = cfg.params();

        const AssembledBlocks blocks = assemble_all(
            space, topo, geo, prm,
            [&](const Vec2& x) { return mc.forcing(Phase::Minus, x); },
            [&](const Vec2& x) { return mc.forcing(Phase::Plus, x); },
            [&](const Vec2& x) { return mc.interface_traction(x); });
        const SaddleSystem sys =
            build_system(space, blocks, [&](const Vec2& x) { return mc.dirichlet(x); });
        const SolveResult sol = solve(sys, cfg.tol);
        out.status = sol.status;
        if (sol.status == SolveStatus::Singular) {
            out.message = "factorization breakdown";
        } else {
            out.report = compute_errors(mc, sol, space, topo, geo);
            out.lambda = sol.multiplier();
        }
    } catch (const std::exception& e) {
        out.status = SolveStatus::Singular;
        out.message = e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    out.report.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return out;
}

struct StudyEntry {
    std::string case_id;
    int n = 0;
    double h = 0.0;
    double mu_minus = 1.0;
    double mu_plus = 10.0;
    double slip_f = 10.0;
    int k = -1;  // position-sweep index, -1 when not applicable
    Vec2 center = Vec2::Zero();
    CaseResult result;
    // Order between this row and the previous one; NaN when not applicable.
    double eoc_l2_u = std::numeric_limits<double>::quiet_NaN();
    double eoc_h1w_u = std::numeric_limits<double>::quiet_NaN();
    double eoc_l2w_p = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline std::vector<CaseResult> run_entries(const std::vector<CaseConfig>& cfgs, int threads) {
    std::vector<CaseResult> results(cfgs.size());
    if (threads <= 1 || cfgs.size() <= 1) {
        for (std::size_t i = 0; i < cfgs.size(); ++i) results[i] = run_case(cfgs[i]);
        return results;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfgs.size()) return;
            results[i] = run_case(cfgs[i]);
        }
    };
    std::vector<std::future<void>> pool;
    const int nt = std::min<int>(threads, static_cast<int>(cfgs.size()));
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
    return results;
}

inline std::string format_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace detail

/// Mesh-refinement study; fills per-column orders between consecutive rows.
inline std::vector<StudyEntry> convergence_study(const CaseConfig& base,
                                                 const std::vector<int>& n_list,
                                                 int threads = 1) {
    std::vector<CaseConfig> cfgs;
    for (int n : n_list) {
        CaseConfig c = base;
        c.n = n;
        cfgs.push_back(c);
    }
    const std::vector<CaseResult> results = detail::run_entries(cfgs, threads);

    std::vector<StudyEntry> table;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        StudyEntry e;
        e.case_id = "n" + std::to_string(cfgs[i].n);
        e.n = cfgs[i].n;
        e.h = 2.0 / cfgs[i].n;
        e.mu_minus = base.mu_minus;
        e.mu_plus = base.mu_plus;
        e.slip_f = base.slip_f;
        e.center = base.center;
        e.result = results[i];
        if (i > 0 && results[i - 1].status == SolveStatus::Ok &&
            results[i].status == SolveStatus::Ok) {
            const ErrorReport& prev = table[i - 1].result.report;
            const ErrorReport& cur = results[i].report;
            auto eoc = [](double coarse, double fine) { return std::log2(coarse / fine); };
            e.eoc_l2_u = eoc(prev.l2_u, cur.l2_u);
            e.eoc_h1w_u = eoc(prev.h1w_u, cur.h1w_u);
            e.eoc_l2w_p = eoc(prev.l2w_p, cur.l2w_p);
        }
        table.push_back(std::move(e));
    }
    return table;
}

inline std::vector<StudyEntry> viscosity_sweep(const CaseConfig& base,
                                               const std::vector<double>& mu_plus_list,
                                               int threads = 1) {
    std::vector<CaseConfig> cfgs;
    for (double mu : mu_plus_list) {
        CaseConfig c = base;
        c.mu_plus = mu;
        cfgs.push_back(c);
    }
    const std::vector<CaseResult> results = detail::run_entries(cfgs, threads);
    std::vector<StudyEntry> table;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        StudyEntry e;
        e.case_id = "mu_plus_" + detail::format_g(cfgs[i].mu_plus);
        e.n = cfgs[i].n;
        e.h = 2.0 / cfgs[i].n;
        e.mu_minus = cfgs[i].mu_minus;
        e.mu_plus = cfgs[i].mu_plus;
        e.slip_f = cfgs[i].slip_f;
        e.center = cfgs[i].center;
        e.result = results[i];
        table.push_back(std::move(e));
    }
    return table;
}

inline std::vector<StudyEntry> slip_sweep(const CaseConfig& base,
                                          const std::vector<double>& f_list, int threads = 1) {
    std::vector<CaseConfig> cfgs;
    for (double f : f_list) {
        CaseConfig c = base;
        c.slip_f = f;
        cfgs.push_back(c);
    }
    const std::vector<CaseResult> results = detail::run_entries(cfgs, threads);
    std::vector<StudyEntry> table;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        StudyEntry e;
        e.case_id = "f_" + detail::format_g(cfgs[i].slip_f);
        e.n = cfgs[i].n;
        e.h = 2.0 / cfgs[i].n;
        e.mu_minus = cfgs[i].mu_minus;
        e.mu_plus = cfgs[i].mu_plus;
        e.slip_f = cfgs[i].slip_f;
        e.center = cfgs[i].center;
        e.result = results[i];
        table.push_back(std::move(e));
    }
    return table;
}

/// Interface center for position-sweep index k at mesh size h.
inline Vec2 position_center(int k, double h) {
    const double rho = h / 20.0 * k;
    const double phi = k * M_PI / 10.0;
    return Vec2(rho * std::cos(phi), rho * std::sin(phi));
}

inline std::vector<StudyEntry> position_sweep(const CaseConfig& base, const std::vector<int>& k_list,
                                              int threads = 1) {
    const double h = 2.0 / base.n;
    std::vector<CaseConfig> cfgs;
    for (int k : k_list) {
        CaseConfig c = base;
        c.center = position_center(k, h);
        cfgs.push_back(c);
    }
    const std::vector<CaseResult> results = detail::run_entries(cfgs, threads);
    std::vector<StudyEntry> table;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        StudyEntry e;
        e.case_id = "k" + std::to_string(k_list[i]);
        e.n = cfgs[i].n;
        e.h = h;
        e.mu_minus = cfgs[i].mu_minus;
        e.mu_plus = cfgs[i].mu_plus;
        e.slip_f = cfgs[i].slip_f;
        e.k = k_list[i];
        e.center = cfgs[i].center;
        e.result = results[i];
        table.push_back(std::move(e));
    }
    return table;
}

}  // namespace cutstokes

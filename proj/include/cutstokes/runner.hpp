#pragma once

#include "cutstokes/config.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace cutstokes {

inline constexpr const char* code_version = "cutstokes 1.0.0";

inline constexpr const char* csv_header =
    "study,case_id,n,h,mu_minus,mu_plus,f,k,c1,c2,err_l2_u,err_h1w_u,err_h1w_u_scaled,"
    "err_l2w_p,eoc_l2_u,eoc_h1w_u,eoc_l2w_p,residual,status,wall_ms";

namespace detail {

inline std::string csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string csv_optional(double v) { return std::isnan(v) ? std::string() : csv_number(v); }

inline const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Ok: return "OK";
        case SolveStatus::NonConverged: return "NON_CONVERGED";
        case SolveStatus::Singular: return "SINGULAR";
    }
    return "UNKNOWN";
}

inline const char* study_name(StudyKind s) {
    switch (s) {
        case StudyKind::Convergence: return "convergence";
        case StudyKind::Viscosity: return "viscosity";
        case StudyKind::Slip: return "slip";
        case StudyKind::Position: return "position";
        case StudyKind::Single: return "single";
    }
    return "unknown";
}

}  // namespace detail

/// Flat CSV serialization shared by every study. Wall-clock times are kept
/// out of the CSV so reruns are byte-identical; they live in meta.json.
inline std::string to_csv(StudyKind study, const std::vector<StudyEntry>& table) {
    std::string out = std::string(csv_header) + "\n";
    for (const StudyEntry& e : table) {
        const ErrorReport& r = e.result.report;
        const bool ok = e.result.status == SolveStatus::Ok;
        out += detail::study_name(study);
        out += ',';
        out += e.case_id;
        out += ',';
        out += std::to_string(e.n);
        out += ',';
        out += detail::csv_number(e.h);
        out += ',';
        out += detail::csv_number(e.mu_minus);
        out += ',';
        out += detail::csv_number(e.mu_plus);
        out += ',';
        out += detail::csv_number(e.slip_f);
        out += ',';
        out += (e.k >= 0 ? std::to_string(e.k) : std::string());
        out += ',';
        out += detail::csv_number(e.center.x());
        out += ',';
        out += detail::csv_number(e.center.y());
        out += ',';
        out += ok ? detail::csv_number(r.l2_u) : std::string();
        out += ',';
        out += ok ? detail::csv_number(r.h1w_u) : std::string();
        out += ',';
        out += ok ? detail::csv_number(r.h1w_u_scaled) : std::string();
        out += ',';
        out += ok ? detail::csv_number(r.l2w_p) : std::string();
        out += ',';
        out += detail::csv_optional(e.eoc_l2_u);
        out += ',';
        out += detail::csv_optional(e.eoc_h1w_u);
        out += ',';
        out += detail::csv_optional(e.eoc_l2w_p);
        out += ',';
        out += ok ? detail::csv_number(r.residual) : std::string();
        out += ',';
        out += detail::status_name(e.result.status);
        out += ",0\n";
    }
    return out;
}

inline std::vector<StudyEntry> run_study(const RunConfig& cfg) {
    const CaseConfig base = cfg.base_case();
    switch (cfg.study) {
        case StudyKind::Convergence:
            return convergence_study(base, cfg.n_list, cfg.threads);
        case StudyKind::Viscosity:
            return viscosity_sweep(base, cfg.mu_plus_list, cfg.threads);
        case StudyKind::Slip:
            return slip_sweep(base, cfg.f_list, cfg.threads);
        case StudyKind::Position:
            return position_sweep(base, cfg.k_list, cfg.threads);
        case StudyKind::Single: {
            std::vector<StudyEntry> table;
            StudyEntry e;
            e.case_id = "single_n" + std::to_string(base.n);
            e.n = base.n;
            e.h = 2.0 / base.n;
            e.mu_minus = base.mu_minus;
            e.mu_plus = base.mu_plus;
            e.slip_f = base.slip_f;
            e.k = cfg.k > 0 ? cfg.k : -1;
            e.center = base.center;
            e.result = run_case(base);
            table.push_back(std::move(e));
            return table;
        }
    }
    return {};
}

/// Point samples of a single-run solution on a uniform grid, for plotting.
inline std::string sample_solution_table(const RunConfig& cfg) {
    CaseConfig base = cfg.base_case();
    ManufacturedCase mc = make_case(base.center, base.mu_minus, base.mu_plus, base.slip_f);
    const BackgroundMesh mesh = build_mesh(base.n);
    if (needs_perturbation(mesh, mc.level_set())) mc.center += Vec2(1e-12, 1e-12);
    const CircleLevelSet ls = mc.level_set();
    const CutTopology topo = build_cut_topology(mesh, ls);
    const TwoPhaseSpace space = build_space(mesh, topo);
    const GeometryCache geo = build_geometry(mesh, topo, ls, base.quad_order);
    const PhysicalParams prm = base.params();
    const AssembledBlocks blocks = assemble_all(
        space, topo, geo, prm, [&](const Vec2& x) { return mc.forcing(Phase::Minus, x); },
        [&](const Vec2& x) { return mc.forcing(Phase::Plus, x); },
        [&](const Vec2& x) { return mc.interface_traction(x); });
    const SaddleSystem sys =
        build_system(space, blocks, [&](const Vec2& x) { return mc.dirichlet(x); });
    const SolveResult sol = solve(sys, base.tol);

    const VelocityField u[2] = {sol.velocity(Phase::Minus), sol.velocity(Phase::Plus)};
    const PressureField p[2] = {sol.pressure(Phase::Minus), sol.pressure(Phase::Plus)};

    std::string out = "# x y phase u1 u2 p\n";
    const int m = cfg.sample_grid;
    char buf[256];
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const Vec2 x(-1.0 + 2.0 * i / (m - 1), -1.0 + 2.0 * j / (m - 1));
            const Phase ph = ls.value(x) < 0.0 ? Phase::Minus : Phase::Plus;
            const int pi = phase_index(ph);
            const int e = locate_element(mesh, x);
            const Vec2 uv = u[pi].eval(e, x);
            const double pv = p[pi].eval(e, x);
            std::snprintf(buf, sizeof(buf), "%.10e %.10e %c %.10e %.10e %.10e\n", x.x(), x.y(),
                          ph == Phase::Minus ? '-' : '+', uv.x(), uv.y(), pv);
            out += buf;
        }
    }
    return out;
}

/// Run a configured study and write results.csv / meta.json (and the
/// optional solution table) into the output directory. Returns the process
/// exit status: nonzero when any case failed.
inline int run(const RunConfig& cfg) {
    validate_config(cfg);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const std::vector<StudyEntry> table = run_study(cfg);

    {
        std::ofstream csv(fs::path(cfg.out_dir) / "results.csv", std::ios::binary);
        csv << to_csv(cfg.study, table);
    }

    nlohmann::json meta;
    meta["code_version"] = code_version;
    meta["study"] = detail::study_name(cfg.study);
    meta["config"] = {
        {"n", cfg.n},
        {"n_list", cfg.n_list},
        {"mu_minus", cfg.mu_minus},
        {"mu_plus", cfg.mu_plus},
        {"f", cfg.slip_f},
        {"c1", cfg.c1},
        {"c2", cfg.c2},
        {"k", cfg.k},
        {"gamma", cfg.gamma_nitsche},
        {"gamma_u_minus", cfg.gamma_u_minus},
        {"gamma_u_plus", cfg.gamma_u_plus},
        {"gamma_p_minus", cfg.gamma_p_minus},
        {"gamma_p_plus", cfg.gamma_p_plus},
        {"alpha", cfg.alpha},
        {"beta", cfg.beta},
        {"tol", cfg.tol},
        {"threads", cfg.threads},
        {"mu_plus_list", cfg.mu_plus_list},
        {"f_list", cfg.f_list},
        {"k_list", cfg.k_list},
        {"sample_grid", cfg.sample_grid},
        {"dump_solution", cfg.dump_solution},
    };
    meta["h1w_scale"] = "weighted H1 magnitude of the exact velocity field";
    nlohmann::json cases = nlohmann::json::array();
    bool any_failed = false;
    for (const StudyEntry& e : table) {
        const bool failed = e.result.status != SolveStatus::Ok;
        any_failed = any_failed || failed;
        cases.push_back({
            {"case_id", e.case_id},
            {"status", detail::status_name(e.result.status)},
            {"residual", e.result.report.residual},
            {"lambda", e.result.lambda},
            {"wall_ms", e.result.report.wall_ms},
            {"perturbed", e.result.perturbed},
            {"message", e.result.message},
        });
    }
    meta["cases"] = cases;
    {
        std::ofstream js(fs::path(cfg.out_dir) / "meta.json", std::ios::binary);
        js << meta.dump(2) << "\n";
    }

    if (cfg.dump_solution && cfg.study == StudyKind::Single) {
        std::ofstream dump(fs::path(cfg.out_dir) / "solution.txt", std::ios::binary);
        dump << sample_solution_table(cfg);
    }
    return any_failed ? 1 : 0;
}

}  // namespace cutstokes

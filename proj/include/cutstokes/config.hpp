#pragma once

#include "cutstokes/studies.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace cutstokes {

enum class StudyKind { Convergence, Viscosity, Slip, Position, Single };

struct ConfigError : std::runtime_error {
    enum class Kind { Parse, Validation };
    Kind kind;
    ConfigError(Kind k, const std::string& what)
        : std::runtime_error(std::string(k == Kind::Parse ? "PARSE_ERROR: " : "VALIDATION_ERROR: ") +
                             what),
          kind(k) {}
};

/// Fully resolved run configuration; every field defaults to the standard
/// experiment setup.
struct RunConfig {
    StudyKind study = StudyKind::Single;
    int n = 32;
    std::vector<int> n_list = {4, 8, 16, 32};
    double mu_minus = 1.0;
    double mu_plus = 10.0;
    double slip_f = 10.0;
    double c1 = 0.0;
    double c2 = 0.0;
    int k = 0;  // alternative way to place the center for single runs
    double gamma_nitsche = 40.0;
    double gamma_u_minus = 0.05;
    double gamma_u_plus = 0.05;
    double gamma_p_minus = 0.05;
    double gamma_p_plus = 0.05;
    double alpha = 0.0;
    double beta = 1.0;
    double tol = 1e-10;
    int threads = 1;
    bool dump_solution = false;
    int sample_grid = 65;
    std::string out_dir = ".";
    std::vector<double> mu_plus_list = {1e0, 1e1, 1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8};
    std::vector<double> f_list;       // defaults to 2^-8 .. 2^8
    std::vector<int> k_list;          // defaults to 1..20

    RunConfig() {
        for (int e = -8; e <= 8; ++e) f_list.push_back(std::ldexp(1.0, e));
        for (int kk = 1; kk <= 20; ++kk) k_list.push_back(kk);
    }

    CaseConfig base_case() const {
        CaseConfig c;
        c.center = Vec2(c1, c2);
        c.mu_minus = mu_minus;
        c.mu_plus = mu_plus;
        c.slip_f = slip_f;
        c.n = n;
        c.gamma_nitsche = gamma_nitsche;
        c.gamma_u_minus = gamma_u_minus;
        c.gamma_u_plus = gamma_u_plus;
        c.gamma_p_minus = gamma_p_minus;
        c.gamma_p_plus = gamma_p_plus;
        c.alpha = alpha;
        c.beta = beta;
        c.tol = tol;
        return c;
    }
};

namespace detail {

inline double parse_number(const std::string& key, const std::string& text, int line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError(ConfigError::Kind::Parse, "line " + std::to_string(line) + ", key '" +
                                                        key + "': not a number: '" + text + "'");
    }
    if (pos != text.size())
        throw ConfigError(ConfigError::Kind::Parse, "line " + std::to_string(line) + ", key '" +
                                                        key + "': trailing characters in '" +
                                                        text + "'");
    return v;
}

inline int parse_int(const std::string& key, const std::string& text, int line) {
    const double v = parse_number(key, text, line);
    if (v != std::floor(v))
        throw ConfigError(ConfigError::Kind::Parse,
                          "line " + std::to_string(line) + ", key '" + key + "': expected integer");
    return static_cast<int>(v);
}

inline std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace detail

inline void validate_config(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) {
        throw ConfigError(ConfigError::Kind::Validation, msg);
    };
    if (cfg.mu_minus <= 0.0 || cfg.mu_plus <= 0.0) fail("viscosities must be positive");
    if (cfg.mu_minus > cfg.mu_plus) fail("mu_minus <= mu_plus required");
    if (cfg.slip_f <= 0.0) fail("slip coefficient f must be positive");
    if (cfg.gamma_nitsche <= 0.0) fail("gamma must be positive");
    if (cfg.gamma_u_minus < 0.0 || cfg.gamma_u_plus < 0.0 || cfg.gamma_p_minus < 0.0 ||
        cfg.gamma_p_plus < 0.0)
        fail("ghost penalties must be >= 0");
    if (std::abs(cfg.alpha + cfg.beta - 1.0) > 1e-14 || cfg.alpha < 0.0 || cfg.alpha > 1.0 ||
        cfg.beta < 0.0 || cfg.beta > 1.0)
        fail("average weights must satisfy alpha+beta=1, 0 <= alpha,beta <= 1");
    if (cfg.tol <= 0.0) fail("solver tolerance must be positive");
    if (cfg.n < 2 || cfg.n % 2 != 0) fail("n must be even and >= 2");
    if (cfg.n_list.empty()) fail("n_list must not be empty");
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
        if (!detail::is_power_of_two(cfg.n_list[i]) || cfg.n_list[i] < 2)
            fail("n_list entries must be powers of two >= 2");
        if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) fail("n_list must be strictly increasing");
    }
    for (double m : cfg.mu_plus_list)
        if (m < cfg.mu_minus) fail("mu_plus_list entries must be >= mu_minus");
    for (double f : cfg.f_list)
        if (f <= 0.0) fail("f_list entries must be positive");
    for (int kk : cfg.k_list)
        if (kk < 0) fail("k_list entries must be >= 0");
    if (cfg.threads < 1) fail("threads must be >= 1");
    if (cfg.sample_grid < 2) fail("sample_grid must be >= 2");
    if (cfg.k < 0) fail("k must be >= 0");
}

/// Parse whitespace-separated key=value tokens; '#' starts a comment.
/// Unknown keys are parse errors, invariant violations validation errors.
inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool center_from_k = false;
    std::istringstream stream(text);
    std::string linebuf;
    int lineno = 0;
    while (std::getline(stream, linebuf)) {
        ++lineno;
        const std::size_t hash = linebuf.find('#');
        if (hash != std::string::npos) linebuf.erase(hash);
        std::istringstream tokens(linebuf);
        std::string token;
        while (tokens >> token) {
            const std::size_t eq = token.find('=');
            if (eq == std::string::npos)
                throw ConfigError(ConfigError::Kind::Parse,
                                  "line " + std::to_string(lineno) + ": expected key=value, got '" +
                                      token + "'");
            const std::string key = token.substr(0, eq);
            const std::string val = token.substr(eq + 1);
            if (key == "study") {
                if (val == "convergence")
                    cfg.study = StudyKind::Convergence;
                else if (val == "viscosity")
                    cfg.study = StudyKind::Viscosity;
                else if (val == "slip")
                    cfg.study = StudyKind::Slip;
                else if (val == "position")
                    cfg.study = StudyKind::Position;
                else if (val == "single")
                    cfg.study = StudyKind::Single;
                else
                    throw ConfigError(ConfigError::Kind::Parse,
                                      "line " + std::to_string(lineno) + ": unknown study '" + val +
                                          "'");
            } else if (key == "n") {
                cfg.n = detail::parse_int(key, val, lineno);
            } else if (key == "n_list") {
                cfg.n_list.clear();
                for (const std::string& item : detail::split_csv(val))
                    cfg.n_list.push_back(detail::parse_int(key, item, lineno));
            } else if (key == "mu_minus") {
                cfg.mu_minus = detail::parse_number(key, val, lineno);
            } else if (key == "mu_plus") {
                cfg.mu_plus = detail::parse_number(key, val, lineno);
            } else if (key == "f") {
                cfg.slip_f = detail::parse_number(key, val, lineno);
            } else if (key == "c1") {
                cfg.c1 = detail::parse_number(key, val, lineno);
            } else if (key == "c2") {
                cfg.c2 = detail::parse_number(key, val, lineno);
            } else if (key == "k") {
                cfg.k = detail::parse_int(key, val, lineno);
                center_from_k = true;
            } else if (key == "gamma") {
                cfg.gamma_nitsche = detail::parse_number(key, val, lineno);
            } else if (key == "gamma_u_minus") {
                cfg.gamma_u_minus = detail::parse_number(key, val, lineno);
            } else if (key == "gamma_u_plus") {
                cfg.gamma_u_plus = detail::parse_number(key, val, lineno);
            } else if (key == "gamma_p_minus") {
                cfg.gamma_p_minus = detail::parse_number(key, val, lineno);
            } else if (key == "gamma_p_plus") {
                cfg.gamma_p_plus = detail::parse_number(key, val, lineno);
            } else if (key == "alpha") {
                cfg.alpha = detail::parse_number(key, val, lineno);
            } else if (key == "beta") {
                cfg.beta = detail::parse_number(key, val, lineno);
            } else if (key == "tol") {
                cfg.tol = detail::parse_number(key, val, lineno);
            } else if (key == "threads") {
                cfg.threads = detail::parse_int(key, val, lineno);
            } else if (key == "dump_solution") {
                if (val == "true" || val == "1")
                    cfg.dump_solution = true;
                else if (val == "false" || val == "0")
                    cfg.dump_solution = false;
                else
                    throw ConfigError(ConfigError::Kind::Parse,
                                      "line " + std::to_string(lineno) +
                                          ", key 'dump_solution': expected true/false");
            } else if (key == "sample_grid") {
                cfg.sample_grid = detail::parse_int(key, val, lineno);
            } else if (key == "out_dir") {
                cfg.out_dir = val;
            } else if (key == "mu_plus_list") {
                cfg.mu_plus_list.clear();
                for (const std::string& item : detail::split_csv(val))
                    cfg.mu_plus_list.push_back(detail::parse_number(key, item, lineno));
            } else if (key == "f_list") {
                cfg.f_list.clear();
                for (const std::string& item : detail::split_csv(val))
                    cfg.f_list.push_back(detail::parse_number(key, item, lineno));
            } else if (key == "k_list") {
                cfg.k_list.clear();
                for (const std::string& item : detail::split_csv(val))
                    cfg.k_list.push_back(detail::parse_int(key, item, lineno));
            } else {
                throw ConfigError(ConfigError::Kind::Parse, "line " + std::to_string(lineno) +
                                                                ": unknown key '" + key + "'");
            }
        }
    }
    if (center_from_k && cfg.k > 0) {
        const Vec2 c = position_center(cfg.k, 2.0 / cfg.n);
        cfg.c1 = c.x();
        cfg.c2 = c.y();
    }
    validate_config(cfg);
    return cfg;
}

}  // namespace cutstokes

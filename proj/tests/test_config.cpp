#include "cutstokes/runner.hpp"

#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cutstokes;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("empty config resolves to the standard defaults") {
    const RunConfig cfg = parse_config("");
    REQUIRE(cfg.study == StudyKind::Single);
    REQUIRE(cfg.gamma_nitsche == 40.0);
    REQUIRE(cfg.gamma_u_minus == 0.05);
    REQUIRE(cfg.gamma_u_plus == 0.05);
    REQUIRE(cfg.gamma_p_minus == 0.05);
    REQUIRE(cfg.gamma_p_plus == 0.05);
    REQUIRE(cfg.alpha == 0.0);
    REQUIRE(cfg.beta == 1.0);
    REQUIRE(cfg.mu_minus == 1.0);
    REQUIRE(cfg.mu_plus == 10.0);
    REQUIRE(cfg.slip_f == 10.0);
    REQUIRE(cfg.n == 32);
    REQUIRE(cfg.n_list == std::vector<int>{4, 8, 16, 32});
    REQUIRE(cfg.f_list.size() == 17);
    REQUIRE(cfg.f_list.front() == Approx(1.0 / 256.0));
    REQUIRE(cfg.f_list.back() == Approx(256.0));
    REQUIRE(cfg.k_list.size() == 20);
    REQUIRE(cfg.mu_plus_list.size() == 9);
}

TEST_CASE("invalid average weights are a validation error") {
    try {
        parse_config("alpha=0.5 beta=0.6");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        REQUIRE(e.kind == ConfigError::Kind::Validation);
        REQUIRE(std::string(e.what()).find("alpha+beta") != std::string::npos);
    }
}

TEST_CASE("study selection and lists parse") {
    const RunConfig cfg = parse_config("study=convergence n_list=4,8,16,32");
    REQUIRE(cfg.study == StudyKind::Convergence);
    REQUIRE(cfg.n_list == std::vector<int>{4, 8, 16, 32});
}

TEST_CASE("unknown keys and malformed values are parse errors") {
    for (const char* text : {"frobnicate=1", "n=abc", "mu_plus=1.5x", "studyconvergence"}) {
        try {
            parse_config(text);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            REQUIRE(e.kind == ConfigError::Kind::Parse);
        }
    }
}

TEST_CASE("structural invariants are validated") {
    REQUIRE_THROWS_AS(parse_config("n=7"), ConfigError);            // odd
    REQUIRE_THROWS_AS(parse_config("n_list=4,12"), ConfigError);    // not a power of two
    REQUIRE_THROWS_AS(parse_config("n_list=8,4"), ConfigError);     // not increasing
    REQUIRE_THROWS_AS(parse_config("gamma=-1"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("f=0"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("mu_minus=5 mu_plus=2"), ConfigError);
    REQUIRE_THROWS_AS(parse_config("gamma_u_minus=-0.1"), ConfigError);
    REQUIRE_NOTHROW(parse_config("# comment only\n\nn=16"));
}

TEST_CASE("position index k places the interface center") {
    const RunConfig cfg = parse_config("k=5 n=32");
    const Vec2 expect = position_center(5, 2.0 / 32.0);
    REQUIRE(cfg.c1 == Approx(expect.x()));
    REQUIRE(cfg.c2 == Approx(expect.y()));
}

TEST_CASE("runner writes deterministic artifacts") {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "cutstokes_test_run";
    std::filesystem::remove_all(dir);
    RunConfig cfg = parse_config("study=single n=4 dump_solution=true sample_grid=9");
    cfg.out_dir = dir.string();
    REQUIRE(run(cfg) == 0);
    REQUIRE(std::filesystem::exists(dir / "results.csv"));
    REQUIRE(std::filesystem::exists(dir / "meta.json"));
    REQUIRE(std::filesystem::exists(dir / "solution.txt"));

    const std::string csv1 = slurp(dir / "results.csv");
    REQUIRE(csv1.rfind(csv_header, 0) == 0);
    REQUIRE(run(cfg) == 0);
    const std::string csv2 = slurp(dir / "results.csv");
    REQUIRE(csv1 == csv2);

    // 9x9 samples plus the header line.
    const std::string dump = slurp(dir / "solution.txt");
    REQUIRE(std::count(dump.begin(), dump.end(), '\n') == 82);

    std::filesystem::remove_all(dir);
}

TEST_CASE("runner records failing sweep entries and exits nonzero") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "cutstokes_test_fail";
    std::filesystem::remove_all(dir);
    RunConfig cfg = parse_config("study=position n=8 k_list=1,64");
    cfg.out_dir = dir.string();
    REQUIRE(run(cfg) != 0);
    const std::string csv = slurp(dir / "results.csv");
    REQUIRE(csv.find("SINGULAR") != std::string::npos);
    REQUIRE(csv.find("k1") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("convergence csv carries order columns") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "cutstokes_test_conv";
    std::filesystem::remove_all(dir);
    RunConfig cfg = parse_config("study=convergence n_list=4,8");
    cfg.out_dir = dir.string();
    REQUIRE(run(cfg) == 0);
    const std::string csv = slurp(dir / "results.csv");
    std::istringstream lines(csv);
    std::string header, row_coarse, row_fine;
    std::getline(lines, header);
    std::getline(lines, row_coarse);
    std::getline(lines, row_fine);
    // The coarsest row leaves the order cells empty.
    REQUIRE(row_coarse.find(",,,,") != std::string::npos);
    REQUIRE(row_fine.find(",,,,") == std::string::npos);
    std::filesystem::remove_all(dir);
}

#include "cutstokes/cutstokes.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int env_threads() {
    if (const char* v = std::getenv("CUTSTOKES_THREADS")) {
        const int t = std::atoi(v);
        if (t >= 1) return t;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cutstokes: unfitted two-phase Stokes solver with slip between phases"};
    app.require_subcommand(1);

    CLI::App* run_cmd = app.add_subcommand("run", "Run a configured study");
    std::string config_path;
    std::string out_dir;
    int n_max = 32;
    int threads = 0;
    run_cmd->add_option("config", config_path, "Path to a key=value config file")->required();
    run_cmd->add_option("--out", out_dir, "Output directory (default: from config)");
    run_cmd->add_option("--n-max", n_max, "Cap refinement levels; 64 enables the finest mesh");
    run_cmd->add_option("--threads", threads, "Worker threads for sweep entries");

    CLI11_PARSE(app, argc, argv);

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot open config file '" << config_path << "'\n";
        return 2;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    cutstokes::RunConfig cfg;
    const bool n_list_defaulted = [&] {
        // Peek: did the config set an explicit n_list?
        return buffer.str().find("n_list=") == std::string::npos;
    }();
    try {
        cfg = cutstokes::parse_config(buffer.str());
    } catch (const cutstokes::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads >= 1)
        cfg.threads = threads;
    else if (env_threads() >= 1 && cfg.threads == 1)
        cfg.threads = env_threads();

    // The default refinement ladder stops at n=32; --n-max 64 extends it.
    if (n_list_defaulted) {
        cfg.n_list.clear();
        for (int n = 4; n <= n_max; n *= 2) cfg.n_list.push_back(n);
        if (cfg.n_list.empty()) cfg.n_list = {4};
    } else {
        std::vector<int> capped;
        for (int n : cfg.n_list)
            if (n <= n_max) capped.push_back(n);
        if (!capped.empty()) cfg.n_list = capped;
    }

    try {
        return cutstokes::run(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

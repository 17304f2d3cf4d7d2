// congesta: packed-medium equilibrium and level-set kinematics pipeline.
// Subcommands: run (full scenario), counterexample (torus-strip residual
// report), oned (one-dimensional closed-form pipeline).

#include "congesta/scenario.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const congesta::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == congesta::errc::config ? 3 : 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

void apply_overrides(congesta::Scenario& s, const std::string& out_dir,
                     const std::string& levels, const std::string& resolution, bool quiet) {
    if (!out_dir.empty()) s.out_dir = out_dir;
    if (quiet) s.quiet = true;
    if (!levels.empty()) {
        s.levels.clear();
        std::stringstream ss(levels);
        std::string tok;
        while (std::getline(ss, tok, ',')) s.levels.push_back(std::stod(tok));
    }
    if (!resolution.empty()) {
        auto x = resolution.find('x');
        if (x == std::string::npos) {
            s.grid.nx = s.grid.ny = std::stoi(resolution);
        } else {
            s.grid.nx = std::stoi(resolution.substr(0, x));
            s.grid.ny = std::stoi(resolution.substr(x + 1));
        }
        if (s.fields.dimension == 1) s.grid.ny = 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"packed-medium equilibrium, level-set kinematics, and tangential flow"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, levels, resolution;
    bool quiet = false;

    CLI::App* run = app.add_subcommand("run", "run a scenario file end to end");
    run->add_option("scenario", scenario_path, "scenario TOML file")->required();
    run->add_option("--out", out_dir, "output directory override");
    run->add_option("--levels", levels, "comma-separated p values");
    run->add_option("--resolution", resolution, "grid resolution N or NxM");
    run->add_flag("--quiet", quiet, "suppress progress output");

    double ce_t = 1.0;
    int ce_resolution = 256;
    CLI::App* ce = app.add_subcommand("counterexample",
                                      "torus-strip continuity residual report");
    ce->add_option("--t", ce_t, "report time (bounded away from 0)");
    ce->add_option("--resolution", ce_resolution, "grid nodes per axis");
    ce->add_option("--out", out_dir, "output directory override");

    CLI::App* oned = app.add_subcommand("oned", "one-dimensional closed-form pipeline");
    oned->add_option("scenario", scenario_path, "scenario TOML file")->required();
    oned->add_option("--out", out_dir, "output directory override");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        return guarded([&] {
            congesta::Scenario s = congesta::load_scenario(scenario_path);
            apply_overrides(s, out_dir, levels, resolution, quiet);
            congesta::RunResult res = congesta::run_scenario(s);
            if (!s.quiet)
                std::cout << (res.exit_code == 0 ? "all invariants PASS" : "run FAILED")
                          << " (exit " << res.exit_code << ")\n";
            return res.exit_code;
        });
    }
    if (ce->parsed()) {
        return guarded([&] {
            congesta::Scenario s = congesta::counterexample_scenario(ce_t, ce_resolution);
            if (!out_dir.empty()) s.out_dir = out_dir;
            congesta::RunResult res = congesta::counterexample_report(s);
            std::cout << "max pointwise residual: "
                      << res.summary["max_pointwise_residual"].dump()
                      << " (threshold 0.05), exit " << res.exit_code << "\n";
            return res.exit_code;
        });
    }
    if (oned->parsed()) {
        return guarded([&] {
            congesta::Scenario s = congesta::load_scenario(scenario_path);
            if (s.fields.dimension != 1)
                congesta::fail(congesta::errc::config, "oned needs a one-dimensional scenario");
            if (!out_dir.empty()) s.out_dir = out_dir;
            return congesta::run_scenario(s).exit_code;
        });
    }
    return 0;
}

#pragma once

#include "congesta/fields.hpp"
#include "congesta/grid.hpp"
#include "congesta/equilibrium.hpp"

#include <json.hpp>

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace congesta {

/// Declarative run configuration, loaded from a TOML-style key/value file
/// with dotted sections (field, grid, time, levels, tolerances, trajectories,
/// outputs). Unknown keys are configuration errors.
struct Scenario {
    std::string name;
    double N = 10.0;

    FieldSpec fields;
    GridSpec grid;

    double t_start = 0.0;
    double t_end = 0.0;
    int time_steps = 1;     // number of time samples (>= 1)
    double dt_probe = 1e-3;

    std::vector<double> levels; // absolute p values, strictly inside (0, N)

    double tol_mass_rel = 1e-4;
    double tol_bisect = 1e-6;
    double tol_avg_scale = 1e-3; // tol_avg = scale * N / L per curve
    double solver_tol = 1e-10;
    int table_samples = 512;

    std::vector<Vec2> trajectory_seeds;
    double trajectory_dt = 0.01;

    std::filesystem::path out_dir = "out";
    std::set<std::string> outputs; // equilibrium, dos, curves, kinematics, tangential,
                                   // trajectories, oned, summary
    bool quiet = false;

    std::vector<double> time_samples() const;
    SolveOptions solve_options() const;
    void validate() const; // invariants: 0 < p < N, torus box, grid sanity
};

Scenario load_scenario(const std::filesystem::path& path);

/// The built-in torus-strip configuration used by the counter-example report.
Scenario counterexample_scenario(double t, int resolution);

struct RunResult {
    int exit_code = 0; // 0 pass, 2 invariant failure, 3 config error, 4 numerical abort
    nlohmann::ordered_json summary;
};

/// Full pipeline over the scenario's time window: equilibrium, level curves,
/// normal kinematics, averaged continuity, tangential solves, file emission.
RunResult run_scenario(const Scenario& s);

/// Pointwise continuity residual of the pure-normal velocity on a grid,
/// per-curve averaged residuals, and the tangential remedy. Emits
/// counterexample.json plus the per-curve CSVs.
RunResult counterexample_report(const Scenario& s);

} // namespace congesta

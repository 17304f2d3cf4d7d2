#include "congesta/csv.hpp"
#include "congesta/kinematics.hpp"
#include "congesta/oned.hpp"
#include "congesta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

namespace congesta {

namespace {

using json = nlohmann::ordered_json;

std::string level_tag(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    return buf;
}

void write_summary(const Scenario& s, const json& summary) {
    if (!s.outputs.count("summary")) return;
    std::filesystem::create_directories(s.out_dir);
    std::ofstream out(s.out_dir / "summary.json");
    out << summary.dump(2) << "\n";
}

void emit_equilibrium(const Scenario& s, const EquilibriumState& state,
                      const std::filesystem::path& dir) {
    if (s.outputs.count("equilibrium")) {
        CsvWriter csv(dir / "equilibrium.csv", {"x1", "x2", "W", "tau_inv", "n", "pi"});
        const GridSpec& g = state.grid();
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                size_t k = static_cast<size_t>(j) * g.nx + i;
                Vec2 x = g.node(i, j);
                double n = state.node_W()[k] <= state.fermi_level() ? state.node_tau_inv()[k] : 0.0;
                csv.row({x.x, x.y, state.node_W()[k], state.node_tau_inv()[k], n,
                         state.node_pi()[k]});
            }
        }
    }
    if (s.outputs.count("dos")) {
        CsvWriter csv(dir / "dos.csv", {"u", "P", "dPdu"});
        const PchipTable& tab = state.P_table();
        std::vector<double> us(tab.xs().begin(), tab.xs().end());
        auto dos = density_of_states(state, us);
        for (size_t k = 0; k < us.size(); ++k)
            csv.row({us[k], tab.ys()[k], dos[k].second});
    }
}

struct CurveReport {
    json entry;
    bool invariants_pass = true;
};

CurveReport process_curve(const Scenario& s, const ProbePair& probes, const LevelCurve& curve,
                          int component, const std::filesystem::path& dir) {
    CurveReport rep;
    const int n = curve.size();
    const double tol_avg = s.tol_avg_scale * s.N / curve.length;

    double coarea = weighted_level_integral(curve, curve.tau_inv);
    bool coarea_ok = std::abs(coarea - 1.0) <= 1e-2;

    SourceEval src = tangential_source(probes, curve);
    double avg = check_averaged_continuity(curve, src.f);
    bool avg_ok = avg < tol_avg;

    TangentialSolveOptions topt;
    topt.tol_avg = tol_avg;
    topt.solver_tol = s.solver_tol;
    CurveEllipticSystem sys = solve_theta_on_curve(curve, src.f, topt);
    std::vector<double> v_par = tangential_velocity(curve, sys.solution);
    double energy = parallel_kinetic_energy(curve, v_par);
    double weak = weak_form_residual(sys);
    double coercivity = measure_coercivity(sys);
    double theta_norm = 0.0, v_par_max = 0.0;
    for (double v : sys.solution) theta_norm = std::max(theta_norm, std::abs(v));
    for (double v : v_par) v_par_max = std::max(v_par_max, std::abs(v));
    int one_sided = 0;
    for (uint8_t b : src.one_sided) one_sided += b;

    rep.invariants_pass = coarea_ok && avg_ok && coercivity > 0.0;
    rep.entry = json{{"p", curve.p},
                     {"component", component},
                     {"vertices", n},
                     {"length", curve.length},
                     {"coarea_tau_inv", coarea},
                     {"coarea_pass", coarea_ok},
                     {"avg_residual", avg},
                     {"tol_avg", tol_avg},
                     {"avg_residual_pass", avg_ok},
                     {"theta_norm", theta_norm},
                     {"energy", energy},
                     {"v_par_max", v_par_max},
                     {"weak_residual", weak},
                     {"coercivity", coercivity},
                     {"one_sided_stencils", one_sided},
                     {"load_orthogonalized", sys.load_orthogonalized}};

    std::string tag = level_tag(curve.p);
    if (component > 0) tag += "_c" + std::to_string(component);
    if (s.outputs.count("curves")) {
        CsvWriter csv(dir / ("curve_p" + tag + ".csv"),
                      {"s", "x1", "x2", "nu1", "nu2", "tau_inv", "grad_pi_norm"});
        for (int i = 0; i < n; ++i)
            csv.row({curve.arclength[i], curve.vertices[i].x, curve.vertices[i].y,
                     curve.normal[i].x, curve.normal[i].y, curve.tau_inv[i],
                     curve.grad_pi_norm[i]});
    }
    if (s.outputs.count("kinematics")) {
        CsvWriter csv(dir / ("kinematics_p" + tag + ".csv"), {"s", "w_perp", "f"});
        for (int i = 0; i < n; ++i) {
            double w = normal_speed(probes, curve.vertices[i]);
            csv.row({curve.arclength[i], w, src.f[i]});
        }
    }
    if (s.outputs.count("tangential")) {
        CsvWriter csv(dir / ("tangential_p" + tag + ".csv"), {"s", "theta", "v_par"});
        for (int i = 0; i < n; ++i)
            csv.row({curve.arclength[i], sys.solution[i], v_par[i]});
    }
    return rep;
}

RunResult run_scenario_2d(const Scenario& s) {
    json summary;
    summary["scenario"] = s.name;
    summary["config"] = {{"potential", potential_id(s.fields.potential)},
                         {"volume", volume_id(s.fields.volume)},
                         {"N", s.N},
                         {"resolution", {s.grid.nx, s.grid.ny}},
                         {"table_samples", s.table_samples}};
    summary["steps"] = json::array();

    bool invariants_pass = true;
    bool aborted = false;

    // the box must hold the medium at the end of the window
    solve_equilibrium(s.fields, s.N, s.t_end, s.grid, s.solve_options());

    std::vector<double> ts = s.time_samples();
    for (size_t k = 0; k < ts.size(); ++k) {
        double t = ts[k];
        json step;
        step["t"] = t;
        std::filesystem::path dir = s.out_dir / ("step" + std::to_string(k));
        std::filesystem::create_directories(dir);
        try {
            ProbePair probes = make_probe_pair(s.fields, s.N, t, s.grid, s.solve_options(),
                                               s.dt_probe);
            const EquilibriumState& state = *probes.base;
            step["U_N"] = state.fermi_level();

            bool monotone = state.P_table().strictly_increasing();
            double mass = state.cells().sweep_P(state.fermi_level());
            bool mass_ok = std::abs(mass - s.N) <= std::max(1e-3 * s.N, s.tol_mass_rel * s.N);
            step["invariants"] = {{"P_strictly_increasing", monotone},
                                  {"mass_residual", std::abs(mass - s.N)},
                                  {"mass_pass", mass_ok}};
            invariants_pass = invariants_pass && monotone && mass_ok;

            emit_equilibrium(s, state, dir);

            step["curves"] = json::array();
            for (double p : s.levels) {
                std::vector<LevelCurve> comps = extract_level_curve_components(state, p);
                for (size_t ci = 0; ci < comps.size(); ++ci) {
                    CurveReport rep = process_curve(s, probes, comps[ci],
                                                    comps.size() > 1 ? static_cast<int>(ci + 1) : 0,
                                                    dir);
                    invariants_pass = invariants_pass && rep.invariants_pass;
                    step["curves"].push_back(std::move(rep.entry));
                }
            }
        } catch (const Error& e) {
            step["error"] = e.what();
            aborted = true;
        }
        summary["steps"].push_back(std::move(step));
        if (!s.quiet)
            std::cout << "step " << k << " t=" << ts[k]
                      << (summary["steps"].back().contains("error") ? " ERROR" : " done") << "\n";
    }

    // particle traces over the full window
    if (!s.trajectory_seeds.empty() && s.outputs.count("trajectories") && !aborted) {
        try {
            AdvectionContext ctx(s.fields, s.N, s.grid, s.solve_options(), s.dt_probe, s.levels,
                                 s.tol_avg_scale);
            json trajs = json::array();
            std::vector<Trajectory> all;
            for (size_t id = 0; id < s.trajectory_seeds.size(); ++id) {
                Trajectory tr = advect_particle(ctx, s.trajectory_seeds[id], s.t_start, s.t_end,
                                                s.trajectory_dt);
                double p0 = tr.points.front().pi, drift = 0.0;
                for (const auto& pt : tr.points) drift = std::max(drift, std::abs(pt.pi - p0));
                bool conserved = drift < 1e-2 * s.N;
                invariants_pass = invariants_pass && conserved;
                trajs.push_back({{"seed", {s.trajectory_seeds[id].x, s.trajectory_seeds[id].y}},
                                 {"pi_drift", drift},
                                 {"pi_conserved", conserved},
                                 {"clamped", tr.clamped}});
                CsvWriter csv(s.out_dir / ("trajectory_" + std::to_string(id) + ".csv"),
                              {"t", "x1", "x2", "pi"});
                for (const auto& pt : tr.points) csv.row({pt.t, pt.x.x, pt.x.y, pt.pi});
                all.push_back(std::move(tr));
            }
            // non-swapping surrogate: level ordering is preserved between traces
            bool ordered = true;
            for (size_t a = 0; a < all.size(); ++a)
                for (size_t b = a + 1; b < all.size(); ++b) {
                    size_t steps = std::min(all[a].points.size(), all[b].points.size());
                    double sign0 = all[a].points[0].pi < all[b].points[0].pi ? 1.0 : -1.0;
                    for (size_t q = 0; q < steps; ++q)
                        if (sign0 * (all[b].points[q].pi - all[a].points[q].pi) <= 0.0)
                            ordered = false;
                }
            invariants_pass = invariants_pass && ordered;
            summary["trajectories"] = std::move(trajs);
            summary["ordering_preserved"] = ordered;
        } catch (const Error& e) {
            summary["trajectory_error"] = e.what();
            aborted = true;
        }
    }

    RunResult res;
    summary["all_invariants_pass"] = invariants_pass;
    res.exit_code = aborted ? 4 : (invariants_pass ? 0 : 2);
    summary["exit_code"] = res.exit_code;
    write_summary(s, summary);
    res.summary = std::move(summary);
    return res;
}

RunResult run_scenario_1d(const Scenario& s) {
    json summary;
    summary["scenario"] = s.name;
    summary["steps"] = json::array();
    bool invariants_pass = true;
    bool aborted = false;

    std::filesystem::create_directories(s.out_dir);
    std::unique_ptr<CsvWriter> csv;
    if (s.outputs.count("oned"))
        csv = std::make_unique<CsvWriter>(
            s.out_dir / "oned.csv",
            std::vector<std::string>{"t", "a", "b", "a_prime", "b_prime", "v_f0", "v_f25",
                                     "v_f50", "v_f75", "v_f100"});

    for (double t : s.time_samples()) {
        json step;
        step["t"] = t;
        try {
            Interval1D dom = solve_domain_1d(s.fields, s.N, t);
            auto [ap, bp] = endpoint_speed_1d(s.fields, s.N, t);
            step["a"] = dom.a;
            step["b"] = dom.b;
            step["a_prime"] = ap;
            step["b_prime"] = bp;

            // endpoint consistency v(a) = a', v(b) = b'
            double va = velocity_1d(s.fields, s.N, dom.a, t);
            double vb = velocity_1d(s.fields, s.N, dom.b, t);
            bool endpoint_ok = std::abs(va - ap) < 1e-8 && std::abs(vb - bp) < 1e-8;

            // mass derivative identity b' n(b) - a' n(a) + integral dt(n) = 0
            double I = integrate_1d(
                [&](double x) { return s.fields.dt_tau_inv({x, 0.0}, t); }, dom.a, dom.b);
            double na = s.fields.tau_inv({dom.a, 0.0}, t), nb = s.fields.tau_inv({dom.b, 0.0}, t);
            double mass_identity = std::abs(bp * nb - ap * na + I);
            bool identity_ok = mass_identity < 1e-8;

            // pointwise continuity residual at interior samples
            double span = dom.b - dom.a;
            double hfd = 1e-4 * span;
            double worst = 0.0;
            for (int q = 1; q <= 100; ++q) {
                double x = dom.a + span * q / 101.0;
                if (x - 2 * hfd < dom.a || x + 2 * hfd > dom.b) continue;
                auto v = [&](double y) { return velocity_1d(s.fields, s.N, y, t); };
                double dxv = (v(x - 2 * hfd) - 8 * v(x - hfd) + 8 * v(x + hfd) - v(x + 2 * hfd)) /
                             (12 * hfd);
                double n = s.fields.tau_inv({x, 0.0}, t);
                double dxn = s.fields.grad_tau_inv({x, 0.0}, t).x;
                double resid = s.fields.dt_tau_inv({x, 0.0}, t) + v(x) * dxn + n * dxv;
                worst = std::max(worst, std::abs(resid));
            }
            bool continuity_ok = worst < 1e-6;

            step["invariants"] = {{"endpoint_consistency", endpoint_ok},
                                  {"mass_derivative_identity", mass_identity},
                                  {"mass_identity_pass", identity_ok},
                                  {"continuity_residual", worst},
                                  {"continuity_pass", continuity_ok}};
            invariants_pass = invariants_pass && endpoint_ok && identity_ok && continuity_ok;

            if (csv) {
                auto vat = [&](double frac) {
                    return velocity_1d(s.fields, s.N, dom.a + frac * span, t);
                };
                csv->row({t, dom.a, dom.b, ap, bp, vat(0.0), vat(0.25), vat(0.5), vat(0.75),
                          vat(1.0)});
            }
        } catch (const Error& e) {
            step["error"] = e.what();
            aborted = true;
        }
        summary["steps"].push_back(std::move(step));
    }

    RunResult res;
    summary["all_invariants_pass"] = invariants_pass;
    res.exit_code = aborted ? 4 : (invariants_pass ? 0 : 2);
    summary["exit_code"] = res.exit_code;
    write_summary(s, summary);
    res.summary = std::move(summary);
    return res;
}

} // namespace

RunResult run_scenario(const Scenario& s) {
    s.validate();
    return s.fields.dimension == 1 ? run_scenario_1d(s) : run_scenario_2d(s);
}

RunResult counterexample_report(const Scenario& s) {
    if (s.fields.topology != Topology::torus_strip ||
        s.fields.potential.kind != PotentialParams::Kind::separable_x2 ||
        s.fields.volume.kind != VolumeParams::Kind::radial_time)
        fail(errc::config, "counter-example report needs the torus-strip x2^2/2 / |x| t setup");
    if (s.t_start < 0.1)
        fail(errc::config, "counter-example time must be bounded away from 0");

    const double t = s.t_start;
    ProbePair probes = make_probe_pair(s.fields, s.N, t, s.grid, s.solve_options(), s.dt_probe);
    const EquilibriumState& state = *probes.base;

    // pointwise continuity residual under the pure-normal velocity
    const GridSpec& g = s.grid;
    const double band = 0.1;                         // singular-volume exclusion
    const double skirt = 4.0 * std::max(g.hx(), g.hy()); // degenerate-normal line x2 = 0
    double max_resid = 0.0;
    long sampled = 0, excluded = 0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            Vec2 x = g.node(i, j);
            size_t k = static_cast<size_t>(j) * g.nx + i;
            if (state.node_W()[k] > state.fermi_level()) continue;
            if (norm(s.fields.wrap(x)) < band || std::abs(x.y) < skirt) {
                ++excluded;
                continue;
            }
            ++sampled;
            max_resid = std::max(max_resid, std::abs(continuity_residual_at(probes, x)));
        }
    }

    nlohmann::ordered_json report;
    report["scenario"] = s.name;
    report["t"] = t;
    report["U_N"] = state.fermi_level();
    report["max_pointwise_residual"] = max_resid;
    report["pointwise_threshold"] = 0.05;
    bool pointwise_ok = max_resid > 0.05;
    report["pointwise_pass"] = pointwise_ok;
    report["nodes_sampled"] = sampled;
    report["nodes_excluded"] = excluded;
    report["exclusion_band"] = band;

    std::filesystem::create_directories(s.out_dir);
    bool all_ok = pointwise_ok;
    report["curves"] = nlohmann::ordered_json::array();
    for (double p : s.levels) {
        std::vector<LevelCurve> comps = extract_level_curve_components(state, p);
        for (size_t ci = 0; ci < comps.size(); ++ci) {
            const LevelCurve& curve = comps[ci];
            SourceEval src = tangential_source(probes, curve);
            double avg = check_averaged_continuity(curve, src.f);
            bool avg_ok = avg < 1e-3;

            TangentialSolveOptions topt;
            topt.tol_avg = s.tol_avg_scale * s.N / curve.length;
            topt.solver_tol = s.solver_tol;
            CurveEllipticSystem sys = solve_theta_on_curve(curve, src.f, topt);
            std::vector<double> v_par = tangential_velocity(curve, sys.solution);
            double v_max = 0.0, f_max = 0.0;
            for (double v : v_par) v_max = std::max(v_max, std::abs(v));
            for (double v : src.f) f_max = std::max(f_max, std::abs(v));
            double weak = weak_form_residual(sys);
            bool v_ok = v_max > 10.0 * s.solver_tol;
            bool weak_ok = weak < 1e-6;
            all_ok = all_ok && avg_ok && v_ok && weak_ok;

            report["curves"].push_back({{"p", p},
                                        {"component", ci + 1},
                                        {"max_f", f_max},
                                        {"avg_residual", avg},
                                        {"avg_pass", avg_ok},
                                        {"v_par_max", v_max},
                                        {"v_par_nonzero_pass", v_ok},
                                        {"weak_residual", weak},
                                        {"weak_pass", weak_ok}});

            std::string tag = level_tag(p) + "_c" + std::to_string(ci + 1);
            CsvWriter csv(s.out_dir / ("tangential_p" + tag + ".csv"),
                          {"s", "f", "theta", "v_par"});
            for (int i = 0; i < curve.size(); ++i)
                csv.row({curve.arclength[i], src.f[i], sys.solution[i], v_par[i]});
        }
    }

    RunResult res;
    res.exit_code = all_ok ? 0 : 2;
    report["exit_code"] = res.exit_code;
    std::ofstream out(s.out_dir / "counterexample.json");
    out << report.dump(2) << "\n";
    res.summary = std::move(report);
    return res;
}

} // namespace congesta

#include "congesta/scenario.hpp"
#include "congesta/toml.hpp"

#include <algorithm>
#include <cmath>

namespace congesta {

std::vector<double> Scenario::time_samples() const {
    std::vector<double> ts;
    if (time_steps <= 1 || t_end == t_start) {
        ts.push_back(t_start);
        return ts;
    }
    for (int k = 0; k < time_steps; ++k)
        ts.push_back(t_start + (t_end - t_start) * k / (time_steps - 1));
    return ts;
}

SolveOptions Scenario::solve_options() const {
    SolveOptions opt;
    opt.tol_mass_rel = tol_mass_rel;
    opt.tol_bisect = tol_bisect;
    opt.table_samples = table_samples;
    return opt;
}

void Scenario::validate() const {
    grid.validate();
    if (!(N > 0.0)) fail(errc::config, "N must be positive");
    if (fields.dimension != 1 && fields.dimension != 2)
        fail(errc::config, "dimension must be 1 or 2");
    if (fields.dimension == 1 && grid.ny != 1)
        fail(errc::config, "one-dimensional scenarios use ny = 1");
    if (fields.topology == Topology::torus_strip) {
        if (std::abs(grid.lo.x + 1.0) > 1e-12 || std::abs(grid.hi.x - 1.0) > 1e-12)
            fail(errc::config, "torus-strip topology requires the x1 box [-1, 1]");
    }
    for (double p : levels) {
        if (!(p > 0.0) || !(p < N))
            fail(errc::config,
                 "level p = " + std::to_string(p) + " must lie strictly inside (0, N)");
    }
    if (time_steps < 1) fail(errc::config, "time steps must be >= 1");
    if (!(dt_probe > 0.0)) fail(errc::config, "dt_probe must be positive");
    if (table_samples < 16) fail(errc::config, "table_samples too small");
    validate_field_spec(fields, grid.lo, grid.hi, t_start);
}

namespace {

const std::set<std::string> kKnownKeys = {
    "name",
    "N",
    "field.potential",
    "field.volume",
    "field.dimension",
    "field.topology",
    "grid.xmin",
    "grid.xmax",
    "grid.ymin",
    "grid.ymax",
    "grid.resolution",
    "grid.nx",
    "grid.ny",
    "time.start",
    "time.end",
    "time.steps",
    "time.dt_probe",
    "levels.values",
    "tolerances.mass_rel",
    "tolerances.bisection",
    "tolerances.avg_scale",
    "tolerances.solver",
    "tolerances.table_samples",
    "trajectories.seeds",
    "trajectories.dt",
    "outputs.dir",
    "outputs.emit",
    "outputs.quiet",
};

const std::set<std::string> kEmitKinds = {"equilibrium", "dos",         "curves",
                                          "kinematics",  "tangential",  "trajectories",
                                          "oned",        "summary"};

double want_number(const toml::Table& t, const std::string& key, double def) {
    auto it = t.find(key);
    if (it == t.end()) return def;
    if (it->second.kind != toml::Value::Kind::number)
        fail(errc::config, "key " + key + " must be a number");
    return it->second.num;
}

std::string want_string(const toml::Table& t, const std::string& key, const std::string& def) {
    auto it = t.find(key);
    if (it == t.end()) return def;
    if (it->second.kind != toml::Value::Kind::string)
        fail(errc::config, "key " + key + " must be a string");
    return it->second.str;
}

bool want_bool(const toml::Table& t, const std::string& key, bool def) {
    auto it = t.find(key);
    if (it == t.end()) return def;
    if (it->second.kind != toml::Value::Kind::boolean)
        fail(errc::config, "key " + key + " must be a boolean");
    return it->second.num != 0.0;
}

} // namespace

Scenario load_scenario(const std::filesystem::path& path) {
    toml::Table t = toml::parse_file(path);
    for (const auto& [key, value] : t) {
        if (!kKnownKeys.count(key))
            fail(errc::config, "unknown key: " + value.bare_key + " (full path: " + key + ")");
    }
    auto require = [&](const std::string& key) {
        if (!t.count(key)) fail(errc::config, "missing required key: " + key);
    };
    require("field.potential");
    require("field.volume");
    require("N");

    Scenario s;
    s.name = want_string(t, "name", path.stem().string());
    s.N = want_number(t, "N", 0.0);
    s.fields.potential = parse_potential(want_string(t, "field.potential", ""));
    s.fields.volume = parse_volume(want_string(t, "field.volume", ""));
    s.fields.dimension = static_cast<int>(want_number(t, "field.dimension", 2));
    std::string topo = want_string(t, "field.topology", "full_plane");
    if (topo == "full_plane") s.fields.topology = Topology::full_plane;
    else if (topo == "torus_strip") s.fields.topology = Topology::torus_strip;
    else fail(errc::config, "unknown topology: " + topo);

    int res = static_cast<int>(want_number(t, "grid.resolution", 256));
    s.grid.nx = static_cast<int>(want_number(t, "grid.nx", res));
    s.grid.ny = s.fields.dimension == 1 ? 1 : static_cast<int>(want_number(t, "grid.ny", res));
    s.grid.lo = {want_number(t, "grid.xmin", -3.0), want_number(t, "grid.ymin", -3.0)};
    s.grid.hi = {want_number(t, "grid.xmax", 3.0), want_number(t, "grid.ymax", 3.0)};
    if (s.fields.dimension == 1) { s.grid.lo.y = 0.0; s.grid.hi.y = 0.0; }

    s.t_start = want_number(t, "time.start", 0.0);
    s.t_end = want_number(t, "time.end", s.t_start);
    s.time_steps = static_cast<int>(want_number(t, "time.steps", 1));
    double window = std::max(std::abs(s.t_end - s.t_start), 1.0);
    s.dt_probe = want_number(t, "time.dt_probe", 1e-3 * window);

    if (auto it = t.find("levels.values"); it != t.end()) {
        if (it->second.kind != toml::Value::Kind::array)
            fail(errc::config, "levels.values must be an array");
        s.levels = it->second.nums;
    } else {
        s.levels = {s.N / 4.0, s.N / 2.0, 3.0 * s.N / 4.0, s.N * (1.0 - 1e-3)};
    }

    s.tol_mass_rel = want_number(t, "tolerances.mass_rel", 1e-4);
    s.tol_bisect = want_number(t, "tolerances.bisection", 1e-6);
    s.tol_avg_scale = want_number(t, "tolerances.avg_scale", 1e-3);
    s.solver_tol = want_number(t, "tolerances.solver", 1e-10);
    s.table_samples = static_cast<int>(want_number(t, "tolerances.table_samples", 512));

    if (auto it = t.find("trajectories.seeds"); it != t.end()) {
        if (it->second.kind != toml::Value::Kind::array || it->second.nums.size() % 2 != 0)
            fail(errc::config, "trajectories.seeds must be a flat [x1,y1,x2,y2,...] array");
        for (size_t k = 0; k + 1 < it->second.nums.size(); k += 2)
            s.trajectory_seeds.push_back({it->second.nums[k], it->second.nums[k + 1]});
    }
    s.trajectory_dt = want_number(t, "trajectories.dt", 0.01);

    s.out_dir = want_string(t, "outputs.dir", "out/" + s.name);
    if (auto it = t.find("outputs.emit"); it != t.end()) {
        if (it->second.kind != toml::Value::Kind::array)
            fail(errc::config, "outputs.emit must be an array of strings");
        for (const std::string& kind : it->second.strs) {
            if (!kEmitKinds.count(kind)) fail(errc::config, "unknown output kind: " + kind);
            s.outputs.insert(kind);
        }
    } else {
        s.outputs = kEmitKinds;
    }
    s.quiet = want_bool(t, "outputs.quiet", false);

    s.validate();
    return s;
}

Scenario counterexample_scenario(double t, int resolution) {
    Scenario s;
    s.name = "counterexample_52";
    s.N = 7.0;
    s.fields.potential = parse_potential("separable_x2");
    s.fields.volume = parse_volume("radial_time");
    s.fields.dimension = 2;
    s.fields.topology = Topology::torus_strip;
    s.grid.lo = {-1.0, -1.5};
    s.grid.hi = {1.0, 1.5};
    s.grid.nx = resolution;
    s.grid.ny = resolution;
    s.t_start = s.t_end = t;
    s.time_steps = 1;
    s.dt_probe = 1e-3;
    s.levels = {s.N / 4.0, s.N / 2.0, 3.0 * s.N / 4.0};
    s.table_samples = 8192; // the singular volume needs a denser tabulation
    s.out_dir = "out/counterexample_52";
    s.outputs = {"curves", "kinematics", "tangential", "summary"};
    return s;
}

} // namespace congesta

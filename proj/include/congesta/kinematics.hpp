#pragma once

#include "congesta/level_curve.hpp"
#include "congesta/tangential.hpp"

#include <memory>

namespace congesta {

/// Frozen-time equilibria at t and t +/- dt_probe. The probe solves reuse the
/// base state's table range so interpolation artifacts cancel in the
/// centered time difference.
struct ProbePair {
    std::shared_ptr<const EquilibriumState> base, plus, minus;
    double dt_probe = 1e-3;
};

ProbePair make_probe_pair(const FieldSpec& spec, double N, double t, const GridSpec& grid,
                          const SolveOptions& opt, double dt_probe);

/// Normal speed of the level set through x: w_perp = -dt(pi)/|grad pi|, with
/// dt(pi) by centered differencing of the probe equilibria.
double normal_speed(const ProbePair& probes, Vec2 x);

/// Spec-level convenience: solves the two probe equilibria on the spot.
double normal_speed(const FieldSpec& spec, const EquilibriumState& state_t, Vec2 x, double t,
                    double dt_probe);

struct SourceEval {
    std::vector<double> f;          // per-vertex source of the tangential problem
    std::vector<uint8_t> one_sided; // stencil fell back to one-sided differencing
};

/// f = -dt(tau^-1) - div(tau^-1 w_perp nu) at each curve vertex. The
/// divergence uses a centered 5-point stencil in the local (normal, tangent)
/// frame with arm length h = min grid spacing; arms that leave the medium
/// fall back to one-sided differences and are flagged.
SourceEval tangential_source(const ProbePair& probes, const LevelCurve& curve);

/// Pointwise continuity residual dt(n) + div(n w_perp nu) under the
/// pure-normal velocity (equals -f); used by the counter-example report.
double continuity_residual_at(const ProbePair& probes, Vec2 x);

/// |<delta(pi - p), f>| on the curve; PASS iff below the caller's tol_avg.
double check_averaged_continuity(const LevelCurve& curve, std::span<const double> f);

struct TrajectoryPoint {
    double t;
    Vec2 x;
    double pi;
};

struct Trajectory {
    std::vector<TrajectoryPoint> points;
    bool clamped = false; // stopped where the level would exceed N
};

/// Everything advection needs per scenario: field spec, mass, grid, solver
/// options, tangential-solve levels. Holds a small cache of per-time
/// advection fields (equilibria + curve solves), keyed by the stage time.
class AdvectionContext {
public:
    AdvectionContext(FieldSpec spec, double N, GridSpec grid, SolveOptions solve,
                     double dt_probe, std::vector<double> levels, double tol_avg_scale = 1e-3);

    Vec2 velocity(Vec2 x, double t); // w_perp nu + v_par tangent
    double pi_at(Vec2 x, double t);
    double total_mass() const { return N_; }

    struct Field {
        ProbePair probes;
        std::vector<LevelCurve> curves;
        std::vector<std::vector<double>> v_par;
    };
    const Field& field_at(double t);

private:
    FieldSpec spec_;
    double N_;
    GridSpec grid_;
    SolveOptions solve_;
    double dt_probe_;
    std::vector<double> levels_;
    double tol_avg_scale_;
    std::vector<std::pair<double, std::shared_ptr<Field>>> cache_; // tiny LRU
};

/// Classical 4-stage Runge-Kutta integration of dx/dt = v(x,t). Trajectories
/// are clamped (and flagged) where the particle's level would exceed N;
/// exceeding N by more than escape_band*N raises errc::escape.
Trajectory advect_particle(AdvectionContext& ctx, Vec2 x0, double t0, double t1, double dt,
                           double escape_band = 1e-2);

} // namespace congesta

#include "congesta/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace congesta {

ProbePair make_probe_pair(const FieldSpec& spec, double N, double t, const GridSpec& grid,
                          const SolveOptions& opt, double dt_probe) {
    if (!(dt_probe > 0.0)) fail(errc::config, "dt_probe must be positive");
    ProbePair pp;
    pp.dt_probe = dt_probe;
    pp.base = std::make_shared<EquilibriumState>(solve_equilibrium(spec, N, t, grid, opt));
    SolveOptions probe_opt = opt;
    probe_opt.forced_u_max = pp.base->u_max();
    pp.plus = std::make_shared<EquilibriumState>(
        solve_equilibrium(spec, N, t + dt_probe, grid, probe_opt));
    pp.minus = std::make_shared<EquilibriumState>(
        solve_equilibrium(spec, N, t - dt_probe, grid, probe_opt));
    return pp;
}

double normal_speed(const ProbePair& probes, Vec2 x) {
    Vec2 gp = probes.base->grad_pi(x);
    double gn = norm(gp);
    if (gn < 1e-12)
        fail(errc::degenerate_normal, "|grad pi| below 1e-12 in normal_speed");
    double dpi = (probes.plus->pi_at(x) - probes.minus->pi_at(x)) / (2.0 * probes.dt_probe);
    return -dpi / gn;
}

double normal_speed(const FieldSpec& spec, const EquilibriumState& state_t, Vec2 x, double t,
                    double dt_probe) {
    SolveOptions opt;
    opt.forced_u_max = state_t.u_max();
    opt.table_samples = static_cast<int>(state_t.P_table().size());
    ProbePair pp;
    pp.dt_probe = dt_probe;
    pp.base = std::make_shared<EquilibriumState>(state_t);
    pp.plus = std::make_shared<EquilibriumState>(
        solve_equilibrium(spec, state_t.total_mass(), t + dt_probe, state_t.grid(), opt));
    pp.minus = std::make_shared<EquilibriumState>(
        solve_equilibrium(spec, state_t.total_mass(), t - dt_probe, state_t.grid(), opt));
    return normal_speed(pp, x);
}

namespace {

// tau^-1 w_perp nu, the normal mass flux entering the continuity equation
Vec2 normal_flux(const ProbePair& probes, Vec2 y) {
    const EquilibriumState& base = *probes.base;
    double w = normal_speed(probes, y);
    Vec2 nu = base.unit_normal(y);
    double ti = base.spec().tau_inv(y, base.time());
    return nu * (ti * w);
}

struct DivergenceResult {
    double value;
    bool one_sided;
};

// centered differencing of the flux in a local orthonormal frame; arms that
// leave the medium (W > U_N) or the table range fall back to one-sided
DivergenceResult flux_divergence(const ProbePair& probes, Vec2 x, Vec2 nu, double h) {
    const EquilibriumState& base = *probes.base;
    Vec2 that = rot90(nu);
    DivergenceResult out{0.0, false};
    Vec2 center_flux{0.0, 0.0};
    bool have_center = false;

    auto usable = [&](Vec2 y) {
        double w = base.spec().effective_potential(y, base.time());
        return w <= base.fermi_level();
    };
    for (Vec2 dir : {nu, that}) {
        Vec2 yp = x + dir * h, ym = x - dir * h;
        bool up = usable(yp), um = usable(ym);
        if (up && um) {
            out.value += dot(normal_flux(probes, yp) - normal_flux(probes, ym), dir) / (2.0 * h);
        } else if (up || um) {
            if (!have_center) {
                center_flux = normal_flux(probes, x);
                have_center = true;
            }
            Vec2 y = up ? yp : ym;
            double sign = up ? 1.0 : -1.0;
            out.value += sign * dot(normal_flux(probes, y) - center_flux, dir) / h;
            out.one_sided = true;
        } else {
            fail(errc::resolution, "divergence stencil has no usable arm; refine the grid");
        }
    }
    return out;
}

} // namespace

SourceEval tangential_source(const ProbePair& probes, const LevelCurve& curve) {
    const EquilibriumState& base = *probes.base;
    const GridSpec& grid = base.grid();
    const double h = grid.ny > 1 ? std::min(grid.hx(), grid.hy()) : grid.hx();
    const int n = curve.size();
    SourceEval out;
    out.f.resize(n);
    out.one_sided.assign(n, 0);
    for (int i = 0; i < n; ++i) {
        Vec2 v = curve.vertices[i];
        DivergenceResult div = flux_divergence(probes, v, curve.normal[i], h);
        out.f[i] = -base.spec().dt_tau_inv(v, base.time()) - div.value;
        out.one_sided[i] = div.one_sided ? 1 : 0;
    }
    return out;
}

double continuity_residual_at(const ProbePair& probes, Vec2 x) {
    const EquilibriumState& base = *probes.base;
    Vec2 nu = base.unit_normal(x);
    const GridSpec& grid = base.grid();
    const double h = grid.ny > 1 ? std::min(grid.hx(), grid.hy()) : grid.hx();
    DivergenceResult div = flux_divergence(probes, x, nu, h);
    return base.spec().dt_tau_inv(x, base.time()) + div.value;
}

double check_averaged_continuity(const LevelCurve& curve, std::span<const double> f) {
    return std::abs(weighted_level_integral(curve, f));
}

// ---------------------------------------------------------------------------
// Advection
// ---------------------------------------------------------------------------

AdvectionContext::AdvectionContext(FieldSpec spec, double N, GridSpec grid, SolveOptions solve,
                                   double dt_probe, std::vector<double> levels,
                                   double tol_avg_scale)
    : spec_(std::move(spec)), N_(N), grid_(grid), solve_(solve), dt_probe_(dt_probe),
      levels_(std::move(levels)), tol_avg_scale_(tol_avg_scale) {
    std::sort(levels_.begin(), levels_.end());
}

const AdvectionContext::Field& AdvectionContext::field_at(double t) {
    for (size_t k = 0; k < cache_.size(); ++k) {
        if (cache_[k].first == t) {
            auto entry = cache_[k];
            cache_.erase(cache_.begin() + k);
            cache_.insert(cache_.begin(), entry);
            return *cache_.front().second;
        }
    }
    auto field = std::make_shared<Field>();
    field->probes = make_probe_pair(spec_, N_, t, grid_, solve_, dt_probe_);
    for (double p : levels_) {
        LevelCurve curve = extract_level_curve(*field->probes.base, p);
        SourceEval src = tangential_source(field->probes, curve);
        TangentialSolveOptions topt;
        topt.tol_avg = tol_avg_scale_ * N_ / curve.length;
        CurveEllipticSystem sys = solve_theta_on_curve(curve, src.f, topt);
        field->v_par.push_back(tangential_velocity(curve, sys.solution));
        field->curves.push_back(std::move(curve));
    }
    cache_.insert(cache_.begin(), {t, field});
    if (cache_.size() > 8) cache_.pop_back();
    return *cache_.front().second;
}

namespace {

double v_par_on_curve(const LevelCurve& curve, const std::vector<double>& v_par, Vec2 x) {
    const int n = curve.size();
    int best = 0;
    double best_d = 1e300;
    for (int i = 0; i < n; ++i) {
        double d = norm2(x - curve.vertices[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    // project onto the two segments adjacent to the nearest vertex
    double value = v_par[best];
    double best_seg = best_d;
    for (int s : {(best + n - 1) % n, best}) {
        Vec2 a = curve.vertices[s];
        Vec2 d = curve.delta(s);
        double len2 = norm2(d);
        if (len2 == 0.0) continue;
        double u = std::clamp(dot(x - a, d) / len2, 0.0, 1.0);
        Vec2 proj = a + d * u;
        double dist = norm2(x - proj);
        if (dist < best_seg) {
            best_seg = dist;
            value = (1.0 - u) * v_par[s] + u * v_par[(s + 1) % n];
        }
    }
    return value;
}

} // namespace

Vec2 AdvectionContext::velocity(Vec2 x, double t) {
    const Field& fld = field_at(t);
    double w = normal_speed(fld.probes, x);
    Vec2 nu = fld.probes.base->unit_normal(x);
    double vpar = 0.0;
    if (!fld.curves.empty()) {
        double p = fld.probes.base->pi_at(x);
        size_t hi = 0;
        while (hi < fld.curves.size() && fld.curves[hi].p < p) ++hi;
        if (hi == 0) {
            vpar = v_par_on_curve(fld.curves[0], fld.v_par[0], x);
        } else if (hi == fld.curves.size()) {
            vpar = v_par_on_curve(fld.curves.back(), fld.v_par.back(), x);
        } else {
            double p0 = fld.curves[hi - 1].p, p1 = fld.curves[hi].p;
            double w1 = (p - p0) / (p1 - p0);
            vpar = (1.0 - w1) * v_par_on_curve(fld.curves[hi - 1], fld.v_par[hi - 1], x) +
                   w1 * v_par_on_curve(fld.curves[hi], fld.v_par[hi], x);
        }
    }
    return nu * w + rot90(nu) * vpar;
}

double AdvectionContext::pi_at(Vec2 x, double t) {
    return field_at(t).probes.base->pi_at(x);
}

Trajectory advect_particle(AdvectionContext& ctx, Vec2 x0, double t0, double t1, double dt,
                           double escape_band) {
    if (!(dt > 0.0)) fail(errc::config, "advection step must be positive");
    const double N = ctx.total_mass();
    Trajectory traj;
    double p0 = ctx.pi_at(x0, t0);
    if (p0 > N)
        fail(errc::out_of_domain, "seed point outside the medium");
    traj.points.push_back({t0, x0, p0});

    Vec2 x = x0;
    double t = t0;
    while (t < t1 - 1e-14 * std::max(1.0, std::abs(t1))) {
        double step = std::min(dt, t1 - t);
        Vec2 k1 = ctx.velocity(x, t);
        Vec2 k2 = ctx.velocity(x + k1 * (step / 2.0), t + step / 2.0);
        Vec2 k3 = ctx.velocity(x + k2 * (step / 2.0), t + step / 2.0);
        Vec2 k4 = ctx.velocity(x + k3 * step, t + step);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (step / 6.0);
        t += step;
        double p = ctx.pi_at(x, t);
        if (p > N * (1.0 + escape_band))
            fail(errc::escape, "trajectory left the medium at t = " + std::to_string(t) +
                                   " (pi = " + std::to_string(p) + ", N = " + std::to_string(N) +
                                   ")");
        traj.points.push_back({t, x, p});
        if (p > N) {
            traj.clamped = true;
            break;
        }
    }
    return traj;
}

} // namespace congesta

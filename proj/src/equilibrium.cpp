#include "congesta/equilibrium.hpp"

#include <algorithm>
#include <cmath>

namespace congesta {

double clip_fraction(double s, double a, double b) {
    double c = a + b;
    if (c <= 0.0) return s >= 0.0 ? 1.0 : 0.0;
    if (s <= -c) return 0.0;
    if (s >= c) return 1.0;
    double m = std::abs(a - b);
    double mx = std::max(a, b);
    if (s < -m) return (s + c) * (s + c) / (8.0 * a * b);
    if (s <= m) return 0.5 + s / (2.0 * mx);
    return 1.0 - (c - s) * (c - s) / (8.0 * a * b);
}

double clip_fraction_integral(double s, double a, double b) {
    // antiderivative of clip_fraction in s, zero at s = -(a+b)
    double c = a + b;
    if (c <= 0.0) return std::max(s, 0.0);
    if (s <= -c) return 0.0;
    if (s >= c) return s;
    double m = std::abs(a - b);
    double mx = std::max(a, b);
    if (s < -m) return (s + c) * (s + c) * (s + c) / (24.0 * a * b);
    double Im = (a > 0.0 && b > 0.0) ? (c - m) * (c - m) * (c - m) / (24.0 * a * b) : 0.0;
    if (s <= m) return Im + (s + m) / 2.0 + (s * s - m * m) / (4.0 * mx);
    double cs = c - s, cm = c - m;
    return (Im + m) + (s - m) - (cm * cm * cm - cs * cs * cs) / (24.0 * a * b);
}

// ---------------------------------------------------------------------------
// CellTable
// ---------------------------------------------------------------------------

void CellTable::build_subcells(int c, std::vector<double>& w, std::vector<double>& m,
                               std::vector<double>& a, std::vector<double>& b) const {
    const int cx = grid_.cells_x();
    const int i = c % cx, j = c / cx;
    const bool one_d = grid_.ny == 1;
    const double hx = grid_.hx(), hy = one_d ? 0.0 : grid_.hy();
    const int K = kSubdiv;
    const int Ky = one_d ? 1 : K;
    const double shx = hx / K, shy = one_d ? 0.0 : hy / K;
    const double sub_area = grid_.cell_area() / (K * Ky);
    Vec2 xc = grid_.cell_center(i, j);
    w.clear(); m.clear(); a.clear(); b.clear();
    w.reserve(static_cast<size_t>(K) * Ky);
    for (int sj = 0; sj < Ky; ++sj) {
        for (int si = 0; si < K; ++si) {
            Vec2 xs{xc.x + (si + 0.5) * shx - hx / 2.0,
                    one_d ? 0.0 : xc.y + (sj + 0.5) * shy - hy / 2.0};
            double ti;
            try {
                ti = spec_.tau_inv(xs, t_);
            } catch (const Error& e) {
                if (e.code() != errc::singular_volume) throw;
                // nudge off the singular point; the 1/|x| mass is integrable
                ti = spec_.tau_inv({xs.x + 0.25 * shx, xs.y + 0.25 * (shy > 0 ? shy : shx)}, t_);
            }
            Gradient g = spec_.grad_effective_potential(xs, t_);
            w.push_back(spec_.effective_potential(xs, t_));
            m.push_back(ti * sub_area);
            a.push_back(std::abs(g.value.x) * shx / 2.0);
            b.push_back(one_d ? 0.0 : std::abs(g.value.y) * shy / 2.0);
        }
    }
}

CellTable CellTable::build(const FieldSpec& spec, const GridSpec& grid, double t) {
    grid.validate();
    CellTable ct;
    ct.spec_ = spec;
    ct.grid_ = grid;
    ct.t_ = t;

    const int cx = grid.cells_x();
    const int cy = grid.cells_y();
    const bool one_d = grid.ny == 1;
    const double hx = grid.hx();
    const double hy = one_d ? 0.0 : grid.hy();
    const size_t n = static_cast<size_t>(cx) * cy;
    ct.w_.resize(n);
    ct.a_.resize(n);
    ct.b_.resize(n);
    ct.mass_.resize(n);
    ct.wlo_.resize(n);
    ct.whi_.resize(n);
    ct.flagged_.assign(n, 0);

    const bool tau_varies = spec.volume_spatially_varying();
    const auto singulars = spec.singular_points();
    const double near_r = 5.0 * std::max(hx, hy);

    std::vector<double> sw, sm, sa, sb;
    for (int j = 0; j < cy; ++j) {
        for (int i = 0; i < cx; ++i) {
            size_t c = static_cast<size_t>(j) * cx + i;
            Vec2 xc = grid.cell_center(i, j);
            ct.w_[c] = spec.effective_potential(xc, t);
            Gradient g = spec.grad_effective_potential(xc, t);
            ct.a_[c] = std::abs(g.value.x) * hx / 2.0;
            ct.b_[c] = one_d ? 0.0 : std::abs(g.value.y) * hy / 2.0;

            bool flag = false;
            for (Vec2 s : singulars) {
                Vec2 d = spec.wrap(xc) - s;
                if (spec.topology == Topology::torus_strip && std::abs(d.x) > 1.0)
                    d.x = 2.0 - std::abs(d.x);
                if (norm(d) < near_r) flag = true;
            }
            if (tau_varies && !flag) {
                double ti = spec.tau_inv(xc, t);
                Vec2 gt = spec.grad_tau_inv(xc, t);
                flag = (std::abs(gt.x) * hx + std::abs(gt.y) * hy) / ti > 0.02;
            }
            ct.flagged_[c] = flag ? 1 : 0;

            if (!flag) {
                ct.mass_[c] = spec.tau_inv(xc, t) * grid.cell_area();
                ct.wlo_[c] = ct.w_[c] - (ct.a_[c] + ct.b_[c]);
                ct.whi_[c] = ct.w_[c] + (ct.a_[c] + ct.b_[c]);
            } else {
                ct.build_subcells(static_cast<int>(c), sw, sm, sa, sb);
                double mass = 0.0, wlo = 1e300, whi = -1e300;
                for (size_t k = 0; k < sw.size(); ++k) {
                    mass += sm[k];
                    wlo = std::min(wlo, sw[k] - (sa[k] + sb[k]));
                    whi = std::max(whi, sw[k] + (sa[k] + sb[k]));
                }
                ct.mass_[c] = mass;
                ct.wlo_[c] = wlo;
                ct.whi_[c] = whi;
            }
        }
    }

    // largest level that cannot have reached the box edge
    double ub = 1e300;
    auto edge_min = [&](int i, int j) {
        size_t c = static_cast<size_t>(j) * cx + i;
        ub = std::min(ub, ct.wlo_[c]);
    };
    const bool wrap_x = spec.topology == Topology::torus_strip;
    if (!wrap_x)
        for (int j = 0; j < cy; ++j) { edge_min(0, j); edge_min(cx - 1, j); }
    if (!one_d)
        for (int i = 0; i < cx; ++i) { edge_min(i, 0); edge_min(i, cy - 1); }
    ct.u_box_ = ub;
    return ct;
}

double CellTable::cell_partial(int c, double u) const {
    thread_local std::vector<double> sw, sm, sa, sb;
    build_subcells(c, sw, sm, sa, sb);
    double total = 0.0;
    for (size_t k = 0; k < sw.size(); ++k)
        total += clip_fraction(u - sw[k], sa[k], sb[k]) * sm[k];
    return total;
}

double CellTable::sweep_P(double u) const {
    if (u > u_box_)
        fail(errc::domain_truncated,
             "sublevel set at u = " + std::to_string(u) +
                 " may reach the grid bounding box (u_box = " + std::to_string(u_box_) +
                 "); enlarge the box");
    double total = 0.0;
    const size_t n = mass_.size();
    for (size_t c = 0; c < n; ++c) {
        if (u >= whi_[c]) {
            total += mass_[c];
        } else if (u > wlo_[c]) {
            if (!flagged_[c])
                total += clip_fraction(u - w_[c], a_[c], b_[c]) * mass_[c];
            else
                total += cell_partial(static_cast<int>(c), u);
        }
    }
    return total;
}

std::vector<double> CellTable::sweep_table(double u_max, int samples) const {
    // Entry j holds P averaged over [u_j - du/2, u_j + du/2] (exact per cell,
    // via the clip antiderivative). The boxcar suppresses sub-sample quadrature
    // ripple that would otherwise alias into the interpolant's derivative.
    // Entry 0 stays exactly P(0) = 0.
    if (u_max > u_box_)
        fail(errc::domain_truncated, "table range exceeds the grid bounding box");
    const double du = u_max / (samples - 1);
    std::vector<double> table(samples, 0.0), full(samples + 1, 0.0);
    std::vector<double> sw, sm, sa, sb;
    const size_t n = mass_.size();
    auto averaged = [du](double u, double w, double a, double b) {
        return (clip_fraction_integral(u + du / 2.0 - w, a, b) -
                clip_fraction_integral(u - du / 2.0 - w, a, b)) /
               du;
    };
    for (size_t c = 0; c < n; ++c) {
        int j_full = static_cast<int>(std::ceil(whi_[c] / du + 0.5));
        if (j_full < 1) j_full = 1;
        if (j_full <= samples - 1) full[j_full] += mass_[c];
        if (wlo_[c] - du / 2.0 >= u_max) continue;
        int j_lo = std::max(1, static_cast<int>(std::floor(wlo_[c] / du - 0.5)) + 1);
        int j_hi = std::min(j_full - 1, samples - 1);
        if (j_lo > j_hi) continue;
        if (!flagged_[c]) {
            for (int j = j_lo; j <= j_hi; ++j)
                table[j] += averaged(j * du, w_[c], a_[c], b_[c]) * mass_[c];
        } else {
            build_subcells(static_cast<int>(c), sw, sm, sa, sb);
            for (int j = j_lo; j <= j_hi; ++j) {
                double u = j * du, part = 0.0;
                for (size_t k = 0; k < sw.size(); ++k)
                    part += averaged(u, sw[k], sa[k], sb[k]) * sm[k];
                table[j] += part;
            }
        }
    }
    double carry = 0.0;
    for (int j = 0; j < samples; ++j) {
        carry += full[j];
        table[j] += carry;
    }
    table[0] = 0.0;
    return table;
}

// ---------------------------------------------------------------------------
// Fermi level solve
// ---------------------------------------------------------------------------

double compute_P(const FieldSpec& spec, double u, double t, const GridSpec& grid) {
    if (u < 0.0) fail(errc::config, "compute_P requires u >= 0");
    if (u == 0.0) return 0.0;
    return CellTable::build(spec, grid, t).sweep_P(u);
}

EquilibriumState solve_equilibrium(const FieldSpec& spec, double N, double t,
                                   const GridSpec& grid, const SolveOptions& opt) {
    if (!(N > 0.0)) fail(errc::config, "total mass N must be positive");
    EquilibriumState st;
    st.cells_ = std::make_shared<const CellTable>(CellTable::build(spec, grid, t));
    st.t_ = t;
    st.N_ = N;
    const CellTable& ct = *st.cells_;

    double u_max;
    if (opt.forced_u_max) {
        u_max = *opt.forced_u_max;
        if (u_max > ct.u_box())
            fail(errc::domain_truncated, "forced table range exceeds the box");
    } else {
        // bracket the Fermi level by doubling, then tighten the upper bracket
        double hi = 1.0, lo = 0.0;
        while (ct.sweep_P(hi) < N) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e18) fail(errc::insufficient_capacity, "P(u) never reaches N");
        }
        for (int it = 0; it < 8; ++it) {
            double mid = 0.5 * (lo + hi);
            if (ct.sweep_P(mid) >= N) hi = mid;
            else lo = mid;
        }
        u_max = std::min(1.5 * hi, 0.999 * ct.u_box());
        if (u_max < hi)
            fail(errc::domain_truncated, "grid bounding box too small for the table range");
    }
    st.u_max_ = u_max;

    const int samples = std::max(16, opt.table_samples);
    std::vector<double> Ps = ct.sweep_table(u_max, samples);
    std::vector<double> us(samples);
    const double du = u_max / (samples - 1);
    for (int j = 0; j < samples; ++j) us[j] = j * du;
    st.table_ = PchipTable(std::move(us), std::move(Ps));

    if (st.table_.y_back() <= N)
        fail(errc::insufficient_capacity,
             "P(u_max) = " + std::to_string(st.table_.y_back()) +
                 " does not exceed N = " + std::to_string(N));

    // coarse inverse on the tabulation, then refine on direct sweeps
    double u0 = st.table_.inverse(N);
    double lo = std::max(0.0, u0 - du), hi = std::min(u_max, u0 + du);
    while (lo > 0.0 && ct.sweep_P(lo) > N) lo = std::max(0.0, lo - du);
    while (hi < u_max && ct.sweep_P(hi) < N) hi = std::min(u_max, hi + du);
    const double tol_mass = opt.tol_mass_rel * N;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        double P = ct.sweep_P(mid);
        if (std::abs(P - N) < 0.5 * tol_mass) break;
        if (P < N) lo = mid;
        else hi = mid;
        if (hi - lo < opt.tol_bisect) { mid = 0.5 * (lo + hi); break; }
    }
    st.U_N_ = mid;
    if (std::abs(ct.sweep_P(st.U_N_) - N) > tol_mass)
        fail(errc::insufficient_capacity, "Fermi level refinement failed the mass tolerance");

    // node fields for contouring and emission
    const int nx = grid.nx, ny = grid.ny;
    st.node_W_.resize(static_cast<size_t>(nx) * ny);
    st.node_pi_.resize(st.node_W_.size());
    st.node_tau_inv_.resize(st.node_W_.size());
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            size_t k = static_cast<size_t>(j) * nx + i;
            Vec2 x = grid.node(i, j);
            double w = spec.effective_potential(x, t);
            st.node_W_[k] = w;
            st.node_pi_[k] = st.table_.value(std::clamp(w, 0.0, u_max));
            bool singular = false;
            for (Vec2 s : spec.singular_points())
                if (norm(spec.wrap(x) - s) == 0.0) singular = true;
            st.node_tau_inv_[k] = singular ? 0.0 : spec.tau_inv(x, t);
        }
    }
    return st;
}

double EquilibriumState::pi_at(Vec2 x) const {
    double w = spec().effective_potential(x, t_);
    if (w > u_max_)
        fail(errc::out_of_table, "W(x,t) = " + std::to_string(w) +
                                     " beyond tabulated u_max = " + std::to_string(u_max_));
    return table_.value(std::max(0.0, w));
}

double EquilibriumState::density_at(Vec2 x) const {
    double w = spec().effective_potential(x, t_);
    return w <= U_N_ ? spec().tau_inv(x, t_) : 0.0;
}

Vec2 EquilibriumState::grad_pi(Vec2 x) const {
    double w = spec().effective_potential(x, t_);
    if (w > u_max_) fail(errc::out_of_table, "grad_pi beyond the tabulated range");
    Gradient g = spec().grad_effective_potential(x, t_);
    return g.value * table_.derivative(std::max(0.0, w));
}

Vec2 EquilibriumState::unit_normal(Vec2 x) const {
    Vec2 gp = grad_pi(x);
    double n = norm(gp);
    if (n < 1e-12)
        fail(errc::degenerate_normal, "|grad pi| below 1e-12 at the query point");
    return gp / n;
}

std::vector<std::pair<double, double>> density_of_states(const EquilibriumState& state,
                                                         const std::vector<double>& u_samples) {
    std::vector<std::pair<double, double>> out;
    out.reserve(u_samples.size());
    const PchipTable& tab = state.P_table();
    const double du = tab.spacing();
    for (double u : u_samples) {
        if (u < 0.0 || u > state.u_max())
            fail(errc::out_of_table, "density-of-states sample outside table range");
        double lo = u - du, hi = u + du;
        if (lo < 0.0) lo = u;
        if (hi > state.u_max()) hi = u;
        double d = (tab.value(hi) - tab.value(lo)) / (hi - lo);
        out.emplace_back(u, d);
    }
    return out;
}

} // namespace congesta

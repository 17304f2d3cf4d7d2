#include "congesta/tangential.hpp"

#include <algorithm>
#include <cmath>

namespace congesta {

namespace {

struct Assembly {
    std::vector<double> seg;  // segment lengths h_i
    std::vector<double> a;    // per-segment coefficient
    std::vector<double> w;    // lumped coarea weights
};

Assembly assemble(const LevelCurve& curve) {
    const int n = curve.size();
    if (n < 16)
        fail(errc::resolution, "curve too coarse for the elliptic solve");
    Assembly out;
    out.seg.resize(n);
    out.a.resize(n);
    for (int i = 0; i < n; ++i) {
        out.seg[i] = curve.seg_len(i);
        int j = (i + 1) % n;
        double ai = curve.tau_inv[i] / curve.grad_pi_norm[i];
        double aj = curve.tau_inv[j] / curve.grad_pi_norm[j];
        out.a[i] = 0.5 * (ai + aj);
        if (!(out.a[i] > 0.0))
            fail(errc::invalid_coefficient, "non-positive weak-form coefficient on a segment");
        if (!(out.seg[i] > 0.0))
            fail(errc::invalid_coefficient, "zero-length curve segment");
    }
    out.w = coarea_weights(curve);
    return out;
}

/// Thomas solve of the grounded system (theta_0 = 0 removed): strictly
/// tridiagonal because dropping one node of a cycle cuts both wrap couplings.
std::vector<double> solve_grounded(const Assembly& as, std::span<const double> rhs) {
    const int n = static_cast<int>(as.seg.size());
    const int m = n - 1;
    std::vector<double> diag(m), lower(m, 0.0), upper(m, 0.0), b(m);
    for (int k = 0; k < m; ++k) {
        int i = k + 1; // global node index
        int prev = i - 1;
        diag[k] = as.a[prev] / as.seg[prev] + as.a[i] / as.seg[i];
        if (k + 1 < m) upper[k] = -as.a[i] / as.seg[i];
        if (k > 0) lower[k] = -as.a[prev] / as.seg[prev];
        b[k] = rhs[i];
    }
    for (int k = 1; k < m; ++k) {
        double w = lower[k] / diag[k - 1];
        diag[k] -= w * upper[k - 1];
        b[k] -= w * b[k - 1];
    }
    std::vector<double> theta(n, 0.0);
    theta[m] = b[m - 1] / diag[m - 1];
    for (int k = m - 2; k >= 0; --k)
        theta[k + 1] = (b[k] - upper[k] * theta[k + 2]) / diag[k];
    return theta;
}

} // namespace

std::vector<double> CurveEllipticSystem::apply_stiffness(std::span<const double> theta) const {
    const int n = curve->size();
    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        double k = coefficient[i] / curve->seg_len(i);
        double d = k * (theta[j] - theta[i]);
        out[i] -= d;
        out[j] += d;
    }
    return out;
}

CurveEllipticSystem solve_theta_on_curve(const LevelCurve& curve, std::span<const double> f,
                                         const TangentialSolveOptions& opt) {
    const int n = curve.size();
    if (static_cast<int>(f.size()) != n)
        fail(errc::config, "source not aligned with curve vertices");

    Assembly as = assemble(curve);
    CurveEllipticSystem sys;
    sys.curve = &curve;
    sys.coefficient = as.a;
    sys.weight = as.w;

    double avg = 0.0, wsum = 0.0;
    for (int i = 0; i < n; ++i) {
        avg += f[i] * as.w[i];
        wsum += as.w[i];
    }
    sys.avg_f_residual = std::abs(avg);
    if (sys.avg_f_residual > 10.0 * opt.tol_avg)
        fail(errc::inconsistent_source,
             "averaged source residual " + std::to_string(sys.avg_f_residual) +
                 " violates the solvability condition (tol_avg = " + std::to_string(opt.tol_avg) +
                 ")");
    std::vector<double> f_eff(f.begin(), f.end());
    if (sys.avg_f_residual > opt.tol_avg) {
        double mean = avg / wsum;
        for (double& v : f_eff) v -= mean;
        sys.load_orthogonalized = true;
    }

    sys.load.resize(n);
    for (int i = 0; i < n; ++i) {
        double ds = 0.5 * (as.seg[(i + n - 1) % n] + as.seg[i]);
        sys.load[i] = f_eff[i] / curve.grad_pi_norm[i] * ds;
    }

    sys.solution = solve_grounded(as, sys.load);

    // project onto zero weighted average (kernel direction of the cycle)
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += sys.solution[i] * as.w[i];
    mean /= wsum;
    for (double& v : sys.solution) v -= mean;
    return sys;
}

std::vector<double> tangential_velocity(const LevelCurve& curve, std::span<const double> theta) {
    const int n = curve.size();
    if (static_cast<int>(theta.size()) != n)
        fail(errc::config, "theta not aligned with curve vertices");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        int im = (i + n - 1) % n, ip = (i + 1) % n;
        double h = curve.seg_len(im) + curve.seg_len(i);
        v[i] = -(theta[ip] - theta[im]) / h;
    }
    return v;
}

double parallel_kinetic_energy(const LevelCurve& curve, std::span<const double> v_par) {
    const int n = curve.size();
    if (static_cast<int>(v_par.size()) != n)
        fail(errc::config, "v_par not aligned with curve vertices");
    std::vector<double> sq(v_par.size());
    for (size_t i = 0; i < sq.size(); ++i) sq[i] = v_par[i] * v_par[i];
    return weighted_level_integral(curve, sq);
}

std::vector<double> forward_source(const LevelCurve& curve, std::span<const double> theta) {
    Assembly as = assemble(curve);
    CurveEllipticSystem tmp;
    tmp.curve = &curve;
    tmp.coefficient = as.a;
    std::vector<double> b = tmp.apply_stiffness(theta);
    const int n = curve.size();
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        double ds = 0.5 * (as.seg[(i + n - 1) % n] + as.seg[i]);
        f[i] = b[i] * curve.grad_pi_norm[i] / ds;
    }
    return f;
}

double weak_form_residual(const CurveEllipticSystem& sys, int k_max) {
    const LevelCurve& c = *sys.curve;
    const int n = c.size();
    const double L = c.length;
    double fnorm = 0.0;
    for (int i = 0; i < n; ++i) fnorm += std::abs(sys.load[i]);
    if (fnorm == 0.0) fnorm = 1.0;

    double worst = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        for (int phase = 0; phase < 2; ++phase) {
            auto xi = [&](double s) {
                double arg = 2.0 * M_PI * k * s / L;
                return phase == 0 ? std::cos(arg) : std::sin(arg);
            };
            // FEM side with the interpolated test function: theta' is constant
            // per segment, so the integral telescopes through xi at the nodes.
            double lhs = 0.0, rhs = 0.0;
            for (int i = 0; i < n; ++i) {
                int j = (i + 1) % n;
                double sj = (j == 0) ? L : c.arclength[j];
                double dtheta = sys.solution[j] - sys.solution[i];
                lhs += sys.coefficient[i] * dtheta / c.seg_len(i) * (xi(sj) - xi(c.arclength[i]));
                rhs += sys.load[i] * xi(c.arclength[i]);
            }
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst / fnorm;
}

double measure_coercivity(const CurveEllipticSystem& sys, int iterations) {
    const LevelCurve& c = *sys.curve;
    const int n = c.size();
    Assembly as = assemble(c);
    double wsum = 0.0;
    for (double w : sys.weight) wsum += w;

    auto project = [&](std::vector<double>& v) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += v[i] * sys.weight[i];
        mean /= wsum;
        for (double& x : v) x -= mean;
    };
    auto m_norm = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += v[i] * v[i] * sys.weight[i];
        return std::sqrt(s);
    };

    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::cos(2.0 * M_PI * c.arclength[i] / c.length);
    project(v);
    double lambda = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = v[i] * sys.weight[i];
        std::vector<double> y = solve_grounded(as, rhs);
        project(y);
        double ny = m_norm(y);
        if (!(ny > 0.0)) break;
        for (double& x : y) x /= ny;
        // Rayleigh quotient on the normalized iterate
        CurveEllipticSystem tmp;
        tmp.curve = &c;
        tmp.coefficient = as.a;
        std::vector<double> Ky = tmp.apply_stiffness(y);
        double num = 0.0;
        for (int i = 0; i < n; ++i) num += y[i] * Ky[i];
        lambda = num; // denominator is 1 by M-normalization
        v = std::move(y);
    }
    return lambda;
}

} // namespace congesta

#include "congesta/oned.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

namespace congesta {

double integrate_1d(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 12, tol);
}

namespace {

double W1(const FieldSpec& spec, double x, double t) {
    return spec.effective_potential({x, 0.0}, t);
}
double dxW1(const FieldSpec& spec, double x, double t) {
    return spec.grad_effective_potential({x, 0.0}, t).value.x;
}
double dtW1(const FieldSpec& spec, double x, double t) {
    return spec.dt_effective_potential({x, 0.0}, t);
}
double n1(const FieldSpec& spec, double x, double t) {
    return spec.tau_inv({x, 0.0}, t);
}
double dtn1(const FieldSpec& spec, double x, double t) {
    return spec.dt_tau_inv({x, 0.0}, t);
}

// the two roots of W(x,t) = u on either side of the critical point
std::pair<double, double> level_roots(const FieldSpec& spec, double u, double t) {
    const double xc = spec.critical_point.x;
    auto root_on_side = [&](double dir) {
        double step = 1.0;
        double far = xc + dir * step;
        int guard = 0;
        while (W1(spec, far, t) < u) {
            step *= 2.0;
            far = xc + dir * step;
            if (++guard > 80)
                fail(errc::insufficient_capacity, "W never reaches the level along this side");
        }
        double lo = xc, hi = far; // W(lo) <= u <= W(hi) measured from the critical point
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            if (W1(spec, mid, t) < u) lo = mid;
            else hi = mid;
            if (std::abs(hi - lo) < 1e-15 * std::max(1.0, std::abs(hi))) break;
        }
        return 0.5 * (lo + hi);
    };
    return {root_on_side(-1.0), root_on_side(+1.0)};
}

double interval_mass(const FieldSpec& spec, double u, double t) {
    auto [a, b] = level_roots(spec, u, t);
    return integrate_1d([&](double x) { return n1(spec, x, t); }, a, b);
}

} // namespace

Interval1D solve_domain_1d(const FieldSpec& spec, double N, double t) {
    if (spec.dimension != 1) fail(errc::config, "solve_domain_1d needs a one-dimensional spec");
    if (!(N > 0.0)) fail(errc::config, "N must be positive");

    double hi = 1.0, lo = 0.0;
    int guard = 0;
    while (interval_mass(spec, hi, t) < N) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 80) fail(errc::insufficient_capacity, "interval mass never reaches N");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double m = interval_mass(spec, mid, t);
        if (std::abs(m - N) < 1e-12 * std::max(1.0, N)) { lo = hi = mid; break; }
        if (m < N) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
    }
    double u = 0.5 * (lo + hi);
    Interval1D out;
    auto [a, b] = level_roots(spec, u, t);
    out.a = a;
    out.b = b;
    out.t = t;
    out.N = N;
    out.level = u;
    return out;
}

std::pair<double, double> endpoint_speed_1d(const FieldSpec& spec, double N, double t) {
    Interval1D dom = solve_domain_1d(spec, N, t);
    const double a = dom.a, b = dom.b;
    double na = n1(spec, a, t), nb = n1(spec, b, t);
    double Wxa = dxW1(spec, a, t), Wxb = dxW1(spec, b, t);
    double Wta = dtW1(spec, a, t), Wtb = dtW1(spec, b, t);
    double I = integrate_1d([&](double x) { return dtn1(spec, x, t); }, a, b);

    double den_a = nb * Wxa - na * Wxb;
    if (std::abs(den_a) < 1e-14)
        fail(errc::degenerate_endpoint, "vanishing denominator in the endpoint-speed form");
    double a_prime = (nb * (Wtb - Wta) - Wxb * I) / den_a;
    // exchange a <-> b (the directed mass integral flips sign)
    double den_b = na * Wxb - nb * Wxa;
    double b_prime = (na * (Wta - Wtb) + Wxa * I) / den_b;
    return {a_prime, b_prime};
}

double velocity_1d(const FieldSpec& spec, double N, double x, double t) {
    Interval1D dom = solve_domain_1d(spec, N, t);
    const double span = dom.b - dom.a;
    if (x < dom.a - 1e-12 * span || x > dom.b + 1e-12 * span)
        fail(errc::out_of_domain, "x outside the packed interval [a, b]");
    auto [a_prime, b_prime] = endpoint_speed_1d(spec, N, t);
    (void)b_prime;
    double flux = integrate_1d([&](double y) { return dtn1(spec, y, t); }, dom.a, x);
    return (n1(spec, dom.a, t) * a_prime - flux) / n1(spec, x, t);
}

} // namespace congesta

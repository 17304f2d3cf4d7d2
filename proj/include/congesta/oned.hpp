#pragma once

#include "congesta/fields.hpp"

#include <functional>
#include <utility>

namespace congesta {

/// The packed interval [a, b] at time t: W(a,t) = W(b,t) and the enclosed
/// mass equals N. All one-dimensional quantities come from adaptive
/// quadrature and bisection; no grid is involved.
struct Interval1D {
    double a = 0.0;
    double b = 0.0;
    double t = 0.0;
    double N = 0.0;
    double level = 0.0; // common potential value W(a) = W(b)
};

/// Nested bisection: outer on the level u (whose two roots of W = u bound the
/// interval), inner mass equation integral tau^-1 = N.
Interval1D solve_domain_1d(const FieldSpec& spec, double N, double t);

/// Endpoint speeds (a', b') from the closed form obtained by differentiating
/// the level and mass conditions in time.
std::pair<double, double> endpoint_speed_1d(const FieldSpec& spec, double N, double t);

/// v(x,t) = (n(a) a' - integral_a^x dt(n)) / n(x); throws out-of-domain
/// outside [a, b].
double velocity_1d(const FieldSpec& spec, double N, double x, double t);

/// Adaptive Gauss-Kronrod integral used throughout the module.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double tol = 1e-12);

} // namespace congesta

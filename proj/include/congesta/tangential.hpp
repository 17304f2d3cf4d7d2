#pragma once

#include "congesta/level_curve.hpp"

#include <span>
#include <vector>

namespace congesta {

/// Periodic piecewise-linear finite elements on the arclength parametrization
/// of a closed level curve: assemble and solve
///     integral a(s) theta' xi' ds = integral (f / |grad pi|) xi ds,
/// a(s) = tau^-1 / |grad pi| per segment, with the zero weighted-average
/// constraint enforced by projection (the kernel is the constants).
struct CurveEllipticSystem {
    const LevelCurve* curve = nullptr;
    std::vector<double> coefficient; // a_i per segment
    std::vector<double> load;        // lumped RHS, b_i = (f_i/|grad pi|_i) (h_{i-1}+h_i)/2
    std::vector<double> weight;      // lumped coarea weights
    std::vector<double> solution;    // theta, zero weighted average
    double avg_f_residual = 0.0;     // |<delta(pi-p), f>| before any orthogonalization
    bool load_orthogonalized = false;

    /// Stiffness apply K*theta (cyclic tridiagonal), used by the
    /// manufactured-solution oracle and the weak-residual check.
    std::vector<double> apply_stiffness(std::span<const double> theta) const;
};

struct TangentialSolveOptions {
    double tol_avg = 1e-3;   // solvability threshold on the averaged source
    double solver_tol = 1e-10;
};

/// Solve for the velocity potential theta on one curve. Throws
/// inconsistent-source when the averaged f residual exceeds 10 x tol_avg and
/// invalid-coefficient when some a_i <= 0. Between tol_avg and 10 x tol_avg
/// the load is orthogonalized and flagged.
CurveEllipticSystem solve_theta_on_curve(const LevelCurve& curve, std::span<const double> f,
                                         const TangentialSolveOptions& opt = {});

/// Minimal-displacement tangential speed v_par(s) = -d theta/ds by centered
/// arclength differencing; the vector field is v_par * rot90(normal).
std::vector<double> tangential_velocity(const LevelCurve& curve, std::span<const double> theta);

/// Discrete parallel kinetic energy K[v_par] = weighted_level_integral(v_par^2).
double parallel_kinetic_energy(const LevelCurve& curve, std::span<const double> v_par);

/// Forward operator: given nodal theta, the pointwise source f that the
/// discrete system associates with it (manufactured-solution oracle).
std::vector<double> forward_source(const LevelCurve& curve, std::span<const double> theta);

/// Weak-form residual max_k |a(theta, xi_k) - L(xi_k)| over Fourier test
/// functions xi_k = cos/sin(2 pi k s / L), k = 1..k_max.
double weak_form_residual(const CurveEllipticSystem& sys, int k_max = 8);

/// Smallest generalized eigenvalue of (K, diag(weight)) on the zero
/// weighted-average subspace, by inverse power iteration.
double measure_coercivity(const CurveEllipticSystem& sys, int iterations = 60);

} // namespace congesta

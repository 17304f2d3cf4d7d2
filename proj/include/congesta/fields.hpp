#pragma once

#include "congesta/errors.hpp"
#include "congesta/vec.hpp"

#include <string>
#include <vector>

namespace congesta {

enum class Topology {
    full_plane,
    torus_strip, // periodic in x1 on (-1,1], unbounded in x2
};

/// Closed-form confining potential families. All derivatives are hand-coded;
/// the checks downstream rely on exact gradients and time derivatives.
struct PotentialParams {
    enum class Kind { harmonic, aniso_quadratic, separable_x2, polynomial };
    Kind kind = Kind::harmonic;
    double a = 1.0;              // aniso_quadratic: W = (a x1^2 + b x2^2)/2
    double b = 1.0;
    std::vector<double> coeffs;  // polynomial in x1, one-dimensional use
};

/// Average-volume families tau(x,t) > 0.
struct VolumeParams {
    enum class Kind { constant, linear_time, radial_time, angular };
    Kind kind = Kind::constant;
    double tau0 = 1.0;
    double eps = 0.0;            // angular: tau0 (1 + eps x1/|x|)
};

struct Gradient {
    Vec2 value;
    bool degenerate = false; // set at the configured critical point
};

/// Immutable description of the model inputs: potential V, volume field tau,
/// effective potential W(x,t) = V(x,t,tau(x,t)), with analytic derivatives.
/// All evaluators are pure; instances are safe to share across workers.
struct FieldSpec {
    PotentialParams potential;
    VolumeParams volume;
    int dimension = 2;
    Topology topology = Topology::full_plane;
    Vec2 critical_point{0.0, 0.0}; // declared input, not discovered

    /// Torus representative of x: x1 mapped into (-1,1], x2 untouched.
    Vec2 wrap(Vec2 x) const;

    double tau(Vec2 x, double t) const;          // throws on tau <= 0 / singularities
    double tau_inv(Vec2 x, double t) const;
    double dt_tau_inv(Vec2 x, double t) const;   // analytic d/dt of tau^-1
    Vec2 grad_tau_inv(Vec2 x, double t) const;   // analytic spatial gradient of tau^-1

    double effective_potential(Vec2 x, double t) const;             // W
    Gradient grad_effective_potential(Vec2 x, double t) const;      // grad W
    double dt_effective_potential(Vec2 x, double t) const;          // dW/dt at fixed x

    /// True when tau depends on x (drives boundary-cell quadrature subdivision).
    bool volume_spatially_varying() const;

    /// Points where tau is singular or undefined (e.g. the origin for |x| t).
    std::vector<Vec2> singular_points() const;
};

/// Parse family identifier strings used by scenario files, e.g.
/// "harmonic", "aniso_quadratic(1,4)", "polynomial(0,0,0.5,0.1)",
/// "constant(0.5)", "linear_time(1.0)", "radial_time", "angular(1.0,0.2)".
PotentialParams parse_potential(const std::string& id);
VolumeParams parse_volume(const std::string& id);

std::string potential_id(const PotentialParams& p);
std::string volume_id(const VolumeParams& v);

/// Sampling checks for the Theorem 1 assumptions that are input properties:
/// W >= 0, single critical point (|grad W| > 0 away from it), confinement
/// W -> inf along rays (full plane only). Throws errc::invalid_field.
void validate_field_spec(const FieldSpec& spec, Vec2 box_lo, Vec2 box_hi, double t);

// Spec-level operation aliases.
double eval_effective_potential(const FieldSpec& spec, Vec2 x, double t);
double eval_inverse_volume(const FieldSpec& spec, Vec2 x, double t);

} // namespace congesta

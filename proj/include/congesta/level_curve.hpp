#pragma once

#include "congesta/equilibrium.hpp"

#include <span>
#include <vector>

namespace congesta {

/// A closed level curve of the particle-count coordinate pi at level p,
/// decorated with everything the coarea-weighted integrals and the per-curve
/// elliptic solve need. Vertices are stored cyclically (no duplicated end
/// vertex); segment i joins vertex i to vertex (i+1) mod size(). On the torus
/// strip the curve may close through the periodic seam, so segment vectors
/// always go through delta(). Immutable after extraction.
struct LevelCurve {
    double p = 0.0;
    double t = 0.0;
    Topology topology = Topology::full_plane;
    double period = 2.0; // x1 period for torus_strip

    std::vector<Vec2> vertices;
    std::vector<double> arclength;     // cumulative, arclength[0] = 0
    double length = 0.0;
    std::vector<double> tau_inv;
    std::vector<double> grad_pi_norm;
    std::vector<Vec2> normal;          // outward unit normal

    int size() const { return static_cast<int>(vertices.size()); }

    /// Minimal-image vector from vertex i to the next vertex.
    Vec2 delta(int i) const;
    double seg_len(int i) const { return norm(delta(i)); }

    /// Simplicity check: no two non-adjacent segments intersect.
    bool is_simple() const;
};

/// March the node grid of pi at level p and return every closed component,
/// ordered deterministically, each oriented so the tangent matches
/// rot90(normal) (counter-clockwise for convex curves, outward normal).
/// Throws no-curve when the level is not crossed, domain-truncated when a
/// contour leaves the box, resolution when a component has < 16 vertices.
std::vector<LevelCurve> extract_level_curve_components(const EquilibriumState& state, double p);

/// The unique closed component (the generic full-plane case).
LevelCurve extract_level_curve(const EquilibriumState& state, double p);

/// Discrete coarea-weighted integral over the curve:
/// sum of trapezoid(integrand / |grad pi|) * segment length.
double weighted_level_integral(const LevelCurve& curve, std::span<const double> integrand);

/// Coarea weights w_i (mass-lumped ds / |grad pi|); weighted_level_integral
/// equals dot(w, integrand).
std::vector<double> coarea_weights(const LevelCurve& curve);

} // namespace congesta

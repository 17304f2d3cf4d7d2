#pragma once

#include "congesta/fields.hpp"
#include "congesta/grid.hpp"
#include "congesta/pchip.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace congesta {

/// Frozen-time field values cached at quadrature cell centers, plus the
/// per-cell data needed for sub-cell area fractions. Cells where tau varies
/// notably (or that sit near a singular point of tau) are flagged for
/// K x K subdivision during sweeps.
class CellTable {
public:
    static CellTable build(const FieldSpec& spec, const GridSpec& grid, double t);

    /// Integral of tau^-1 over {W <= u}: midpoint quadrature with sub-cell
    /// area fractions from a linear reconstruction of W in each cell.
    /// Throws domain-truncated when the sublevel set reaches the box edge.
    double sweep_P(double u) const;

    /// Largest level whose sublevel set provably stays inside the box.
    double u_box() const { return u_box_; }

    /// Tabulate P at sample levels u_j = j*du in one pass over cells. Each
    /// entry is the exact boxcar average of the quadrature over one sample
    /// window (anti-aliased); entry 0 is exactly 0.
    std::vector<double> sweep_table(double u_max, int samples) const;

    const GridSpec& grid() const { return grid_; }
    const FieldSpec& spec() const { return spec_; }
    double time() const { return t_; }

    static constexpr int kSubdiv = 16; // subdivision factor for flagged cells

private:
    double cell_partial(int c, double u) const; // flagged-cell exact partial mass
    void build_subcells(int c, std::vector<double>& w, std::vector<double>& m,
                        std::vector<double>& a, std::vector<double>& b) const;

    FieldSpec spec_;
    GridSpec grid_;
    double t_ = 0.0;
    double u_box_ = 0.0;
    std::vector<double> w_;      // W at cell centers
    std::vector<double> a_, b_;  // per-axis half-spans |g| h / 2
    std::vector<double> mass_;   // full-cell mass (exactly what a sweep adds when filled)
    std::vector<double> wlo_, whi_;
    std::vector<uint8_t> flagged_;
};

/// Area fraction of a rectangular cell lying under a linear level offset s,
/// where a, b are the field half-spans across the two cell axes.
double clip_fraction(double s, double a, double b);

/// Antiderivative of clip_fraction in s (zero at s = -(a+b)); used for the
/// boxcar-averaged tabulation.
double clip_fraction_integral(double s, double a, double b);

struct SolveOptions {
    double tol_mass_rel = 1e-4;   // |P(U_N) - N| < tol_mass_rel * N
    double tol_bisect = 1e-6;     // bisection tolerance on u
    int table_samples = 512;      // P_table resolution
    std::optional<double> forced_u_max; // probe solves reuse the base table range
};

/// The solved frozen-time packing problem: Fermi level U_N, tabulated P(u,t),
/// and node fields used for contouring. Immutable once solved.
class EquilibriumState {
public:
    const FieldSpec& spec() const { return cells_->spec(); }
    const GridSpec& grid() const { return cells_->grid(); }
    double time() const { return t_; }
    double total_mass() const { return N_; }
    double fermi_level() const { return U_N_; }
    double u_max() const { return u_max_; }
    double P_max() const { return table_.y_back(); }
    const PchipTable& P_table() const { return table_; }
    const CellTable& cells() const { return *cells_; }

    double pi_at(Vec2 x) const;        // P(W(x,t), t); throws out-of-table
    double density_at(Vec2 x) const;   // tau^-1 inside the closed sublevel set, else 0
    double dPdu(double u) const { return table_.derivative(u); }
    Vec2 grad_pi(Vec2 x) const;        // dP/du (W) * grad W
    Vec2 unit_normal(Vec2 x) const;    // throws degenerate-normal below 1e-12

    const std::vector<double>& node_W() const { return node_W_; }
    const std::vector<double>& node_pi() const { return node_pi_; }
    const std::vector<double>& node_tau_inv() const { return node_tau_inv_; }

    friend EquilibriumState solve_equilibrium(const FieldSpec&, double, double,
                                              const GridSpec&, const SolveOptions&);

private:
    std::shared_ptr<const CellTable> cells_;
    PchipTable table_;
    double t_ = 0.0, N_ = 0.0, U_N_ = 0.0, u_max_ = 0.0;
    std::vector<double> node_W_, node_pi_, node_tau_inv_;
};

/// Solve the frozen-time problem: bracket and bisect P(u,t) = N on the
/// monotone tabulation, then refine against direct quadrature sweeps.
EquilibriumState solve_equilibrium(const FieldSpec& spec, double N, double t,
                                   const GridSpec& grid, const SolveOptions& opt = {});

/// Spec-level operation: single P(u,t) evaluation on a fresh cell table.
double compute_P(const FieldSpec& spec, double u, double t, const GridSpec& grid);

/// dP/du by centered differencing of the tabulation at the table spacing.
std::vector<std::pair<double, double>> density_of_states(const EquilibriumState& state,
                                                         const std::vector<double>& u_samples);

} // namespace congesta

#pragma once

#include "congesta/errors.hpp"

#include <vector>

namespace congesta {

/// Shape-preserving monotone cubic interpolant (Fritsch-Carlson slopes).
/// Built from strictly increasing abscissae; monotone data stays monotone
/// under evaluation, which keeps the tabulated P(u,t) invertible.
class PchipTable {
public:
    PchipTable() = default;
    PchipTable(std::vector<double> xs, std::vector<double> ys);

    double value(double x) const;       // throws out-of-table beyond [front, back]
    double derivative(double x) const;  // derivative of the interpolant
    double inverse(double y) const;     // monotone inversion by bisection + Newton

    double x_front() const { return xs_.front(); }
    double x_back() const { return xs_.back(); }
    double y_front() const { return ys_.front(); }
    double y_back() const { return ys_.back(); }
    size_t size() const { return xs_.size(); }
    double spacing() const { return xs_.size() > 1 ? xs_[1] - xs_[0] : 0.0; }

    const std::vector<double>& xs() const { return xs_; }
    const std::vector<double>& ys() const { return ys_; }

    bool strictly_increasing() const;

private:
    size_t locate(double x) const;

    std::vector<double> xs_, ys_, d_; // nodes, values, endpoint slopes
};

} // namespace congesta

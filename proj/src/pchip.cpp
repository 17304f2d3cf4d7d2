#include "congesta/pchip.hpp"

#include <algorithm>
#include <cmath>

namespace congesta {

PchipTable::PchipTable(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
    const size_t n = xs_.size();
    if (n < 2 || ys_.size() != n)
        fail(errc::config, "pchip table needs >= 2 aligned samples");
    for (size_t i = 1; i < n; ++i)
        if (!(xs_[i] > xs_[i - 1]))
            fail(errc::config, "pchip abscissae must be strictly increasing");

    d_.assign(n, 0.0);
    std::vector<double> h(n - 1), delta(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        h[i] = xs_[i + 1] - xs_[i];
        delta[i] = (ys_[i + 1] - ys_[i]) / h[i];
    }
    for (size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            // weighted harmonic mean keeps the interpolant monotone
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0) d = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(d) > 3.0 * std::abs(d0)) d = 3.0 * d0;
        return d;
    };
    d_[0] = (n == 2) ? delta[0] : end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = (n == 2) ? delta[0]
                         : end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

size_t PchipTable::locate(double x) const {
    if (x < xs_.front() || x > xs_.back())
        fail(errc::out_of_table, "argument " + std::to_string(x) + " outside table range [" +
                                     std::to_string(xs_.front()) + ", " +
                                     std::to_string(xs_.back()) + "]");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    size_t i = static_cast<size_t>(it - xs_.begin());
    if (i > 0) --i;
    if (i + 1 >= xs_.size()) i = xs_.size() - 2;
    return i;
}

double PchipTable::value(double x) const {
    size_t i = locate(x);
    double h = xs_[i + 1] - xs_[i];
    double s = (x - xs_[i]) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    double h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s);
    double h11 = s * s * (s - 1);
    return h00 * ys_[i] + h10 * h * d_[i] + h01 * ys_[i + 1] + h11 * h * d_[i + 1];
}

double PchipTable::derivative(double x) const {
    size_t i = locate(x);
    double h = xs_[i + 1] - xs_[i];
    double s = (x - xs_[i]) / h;
    double g00 = 6 * s * s - 6 * s;
    double g10 = 3 * s * s - 4 * s + 1;
    double g01 = -6 * s * s + 6 * s;
    double g11 = 3 * s * s - 2 * s;
    return (g00 * ys_[i] + g01 * ys_[i + 1]) / h + g10 * d_[i] + g11 * d_[i + 1];
}

double PchipTable::inverse(double y) const {
    if (y < std::min(ys_.front(), ys_.back()) || y > std::max(ys_.front(), ys_.back()))
        fail(errc::out_of_table, "inverse target outside table range");
    double lo = xs_.front(), hi = xs_.back();
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (value(mid) < y) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

bool PchipTable::strictly_increasing() const {
    for (size_t i = 1; i < ys_.size(); ++i)
        if (!(ys_[i] > ys_[i - 1])) return false;
    return true;
}

} // namespace congesta

#include "vmcyl/radial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vmcyl {

std::vector<double> uniform_grid(double R0, std::size_t n)
{
    if (!(R0 > 0.0))
        throw std::invalid_argument("uniform_grid: R0 must be positive");
    if (n < 2)
        throw std::invalid_argument("uniform_grid: need at least 2 nodes");
    std::vector<double> g(n);
    const double h = R0 / double(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = h * double(i);
    g.back() = R0;
    return g;
}

std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y)
{
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2)
        return d;
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    std::vector<double> h(n - 1), del(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        del[i] = (y[i + 1] - y[i]) / h[i];
    }
    // interior: weighted harmonic mean where the secants agree in sign
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0.0) {
            d[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
    }
    // one-sided ends with monotonicity limiting
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0))
            s = 3.0 * d0;
        return s;
    };
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    return d;
}

std::vector<double> cubic_fit_slopes(const std::vector<double>& x,
                                     const std::vector<double>& y)
{
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2)
        return d;
    if (n < 4) {
        return pchip_slopes(x, y);
    }
    for (std::size_t i = 0; i < n; ++i) {
        // window of 4 nodes around i, shifted inside the range
        std::size_t j0 = (i == 0) ? 0 : (i >= n - 2 ? n - 4 : i - 1);
        const double* xs = &x[j0];
        const double* ys = &y[j0];
        // Newton divided differences of the cubic through (xs, ys)
        double c0 = ys[0];
        double c1 = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        double c1b = (ys[2] - ys[1]) / (xs[2] - xs[1]);
        double c1c = (ys[3] - ys[2]) / (xs[3] - xs[2]);
        double c2 = (c1b - c1) / (xs[2] - xs[0]);
        double c2b = (c1c - c1b) / (xs[3] - xs[1]);
        double c3 = (c2b - c2) / (xs[3] - xs[0]);
        (void)c0;
        // derivative of the Newton form at x[i]
        const double t = x[i];
        const double u0 = t - xs[0], u1 = t - xs[1], u2 = t - xs[2];
        d[i] = c1 + c2 * (u0 + u1) + c3 * (u0 * u1 + u0 * u2 + u1 * u2);
    }
    return d;
}

RadialProfile::RadialProfile(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values))
{
    if (grid_.size() != values_.size())
        throw std::invalid_argument("RadialProfile: grid/value size mismatch");
    if (grid_.size() < 2)
        throw std::invalid_argument("RadialProfile: need at least 2 nodes");
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
        if (!(grid_[i] < grid_[i + 1]))
            throw std::invalid_argument("RadialProfile: grid not strictly increasing");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("RadialProfile: non-finite value");
    slopes_ = pchip_slopes(grid_, values_);
    // detect uniform spacing for O(1) lookup
    const double h0 = grid_[1] - grid_[0];
    bool uniform = true;
    for (std::size_t i = 1; i + 1 < grid_.size(); ++i)
        if (std::abs(grid_[i + 1] - grid_[i] - h0) > 1e-12 * h0) {
            uniform = false;
            break;
        }
    h_ = uniform ? h0 : 0.0;
}

RadialProfile RadialProfile::zeros(const std::vector<double>& grid)
{
    return RadialProfile(grid, std::vector<double>(grid.size(), 0.0));
}

std::size_t RadialProfile::locate(double r) const
{
    const double lo = grid_.front(), hi = grid_.back();
    const double slack = 1e-9 * (hi - lo); // absorbs wall-event rounding
    if (r < lo - slack || r > hi + slack)
        throw std::domain_error("RadialProfile: radius outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
    if (h_ > 0.0) {
        auto k = static_cast<std::ptrdiff_t>((r - lo) / h_);
        if (k < 0) k = 0;
        if (k > static_cast<std::ptrdiff_t>(grid_.size()) - 2)
            k = static_cast<std::ptrdiff_t>(grid_.size()) - 2;
        return static_cast<std::size_t>(k);
    }
    auto it = std::upper_bound(grid_.begin(), grid_.end(), r);
    std::size_t k = (it == grid_.begin()) ? 0 : std::size_t(it - grid_.begin()) - 1;
    if (k > grid_.size() - 2)
        k = grid_.size() - 2;
    return k;
}

double RadialProfile::operator()(double r) const
{
    const std::size_t k = locate(r);
    const double h = grid_[k + 1] - grid_[k];
    const double t = (r - grid_[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * values_[k] + h * h10 * slopes_[k] + h01 * values_[k + 1] +
           h * h11 * slopes_[k + 1];
}

double RadialProfile::derivative(double r) const
{
    const std::size_t k = locate(r);
    const double h = grid_[k + 1] - grid_[k];
    const double t = (r - grid_[k]) / h;
    const double t2 = t * t;
    const double g00 = (6 * t2 - 6 * t) / h;
    const double g10 = 3 * t2 - 4 * t + 1;
    const double g01 = (-6 * t2 + 6 * t) / h;
    const double g11 = 3 * t2 - 2 * t;
    return g00 * values_[k] + g10 * slopes_[k] + g01 * values_[k + 1] +
           g11 * slopes_[k + 1];
}

double sup_norm(const std::vector<double>& v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

PotentialState PotentialState::zeros(const std::vector<double>& grid)
{
    PotentialState s;
    s.phi = RadialProfile::zeros(grid);
    s.a_phi = RadialProfile::zeros(grid);
    s.a_z = RadialProfile::zeros(grid);
    return s;
}

double sup_distance(const PotentialState& p, const PotentialState& q)
{
    double m = sup_diff(p.phi.values(), q.phi.values());
    m = std::max(m, sup_diff(p.a_phi.values(), q.a_phi.values()));
    m = std::max(m, sup_diff(p.a_z.values(), q.a_z.values()));
    return m;
}

} // namespace vmcyl

#include "vmcyl/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "vmcyl/quadrature.hpp"

namespace vmcyl {

double bessel_i0_minus1(double x)
{
    const double y = 0.25 * x * x;
    double term = y, sum = y;
    for (int k = 2; k < 400; ++k) {
        term *= y / double(k * k);
        sum += term;
        if (term < 1e-16 * sum)
            break;
    }
    return sum;
}

double bessel_i0(double x)
{
    return 1.0 + bessel_i0_minus1(x);
}

EnvelopeBounds::EnvelopeBounds(double c1, double c2, EnvelopeRule rule)
    : c1_(c1), c2_(c2), rule_(rule)
{
    if (!(c1 >= 0.0) || !(c2 >= 0.0))
        throw std::invalid_argument("EnvelopeBounds: constants must be nonnegative");
}

double EnvelopeBounds::series(double r, int k_max, bool relaxed) const
{
    // terms T_k = c1 c2^{k-1} r^{2k} / (4^k (k!)^2); the relaxed variant
    // carries the extra factor 1/(1 - 1/(4k^2))
    const double r2 = r * r;
    double term = 0.25 * c1_ * r2;
    double sum = 0.0;
    for (int k = 1; k <= k_max && k <= 400; ++k) {
        double t = term;
        if (relaxed)
            t /= (1.0 - 1.0 / (4.0 * double(k) * double(k)));
        sum += t;
        term *= 0.25 * c2_ * r2 / (double(k + 1) * double(k + 1));
        if (term <= 1e-16 * sum)
            break;
    }
    return sum;
}

double EnvelopeBounds::phi_bound(double r) const
{
    if (rule_ == EnvelopeRule::bessel) {
        if (c2_ <= 0.0)
            return 0.25 * c1_ * r * r;
        return (c1_ / c2_) * bessel_i0_minus1(std::sqrt(c2_) * std::abs(r));
    }
    return series(r, std::numeric_limits<int>::max(), false);
}

double EnvelopeBounds::a_phi_bound(double r) const
{
    return series(r, std::numeric_limits<int>::max(), true);
}

double EnvelopeBounds::phi_bound_partial(double r, int k) const
{
    return series(r, k, false);
}

double EnvelopeBounds::a_phi_bound_partial(double r, int k) const
{
    return series(r, k, true);
}

RadialProfile volterra_envelope(double c1, double c2, const std::vector<double>& grid)
{
    if (!(c1 >= 0.0) || !(c2 >= 0.0))
        throw std::invalid_argument("volterra_envelope: constants must be nonnegative");
    const std::size_t n = grid.size();
    if (n < 2)
        throw std::invalid_argument("volterra_envelope: need at least 2 nodes");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(grid[i] < grid[i + 1]))
            throw std::invalid_argument("volterra_envelope: grid not strictly increasing");
    if (grid.front() != 0.0)
        throw std::invalid_argument("volterra_envelope: grid must start at 0");

    // Piecewise-linear product integration. On panel j the unknown enters
    // as y(tau) = y_j (1 - tau) + y_{j+1} tau; cumulative moments of s*y and
    // s ln s * y are updated with exact panel integrals. At each node the
    // newest value appears linearly and is solved for.
    std::vector<double> y(n, 0.0);
    std::vector<PanelMoments> pm;
    pm.reserve(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j)
        pm.push_back(panel_moments(grid[j], grid[j + 1] - grid[j]));

    double m1 = 0.0, mlog = 0.0; // cumulative ∫ s y and ∫ s ln s y up to r_j
    for (std::size_t i = 1; i < n; ++i) {
        const PanelMoments& p = pm[i - 1];
        const double r = grid[i];
        const double lr = std::log(r);
        // contribution of the known left endpoint: y_{i-1} (1 - tau)
        const double left_s = p.s[0] - p.s[1];
        const double left_slog = p.slog[0] - p.slog[1];
        // coefficient of the unknown right endpoint: tau
        const double right_s = p.s[1];
        const double right_slog = p.slog[1];
        const double known = 0.25 * c1 * r * r +
                             c2 * (lr * (m1 + y[i - 1] * left_s) - (mlog + y[i - 1] * left_slog));
        const double coeff = c2 * (lr * right_s - right_slog);
        y[i] = known / (1.0 - coeff);
        m1 += y[i - 1] * left_s + y[i] * right_s;
        mlog += y[i - 1] * left_slog + y[i] * right_slog;
    }
    return RadialProfile(grid, y);
}

} // namespace vmcyl

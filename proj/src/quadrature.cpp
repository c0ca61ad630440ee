#include "vmcyl/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "vmcyl/radial.hpp"

namespace vmcyl {

namespace {

GaussRule make_gauss(int n)
{
    GaussRule r;
    r.x.resize(std::size_t(n));
    r.w.resize(std::size_t(n));
    for (int i = 0; i < n; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root
        double x = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / double(k);
                p0 = p1;
                p1 = p2;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15)
                break;
        }
        r.x[std::size_t(n - 1 - i)] = x;
        r.w[std::size_t(n - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

} // namespace

const GaussRule& gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, make_gauss(n)).first;
    return it->second;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int nodes)
{
    const GaussRule& gl = gauss_legendre(nodes);
    const double h = (b - a) / double(panels);
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + h * double(p);
        const double mid = lo + 0.5 * h, half = 0.5 * h;
        double acc = 0.0;
        for (std::size_t k = 0; k < gl.x.size(); ++k)
            acc += gl.w[k] * f(mid + half * gl.x[k]);
        total += acc * half;
    }
    return total;
}

namespace {

// I_p(a) = ∫_0^1 tau^p ln(a + tau) dtau, p = 0..4, a >= 0.
void log_base_integrals(double a, double out[5])
{
    if (a == 0.0) {
        for (int p = 0; p < 5; ++p)
            out[p] = -1.0 / double((p + 1) * (p + 1));
        return;
    }
    if (a < 1.5) {
        // closed form; the alternating terms stay O(1) in this range
        const double l1a = std::log1p(a), la = std::log(a);
        for (int p = 0; p < 5; ++p) {
            double rp = 0.0, apow = 1.0;
            for (int i = 0; i <= p; ++i) {
                rp += apow / double(p + 1 - i);
                apow *= -a;
            }
            rp += apow * (l1a - la); // apow = (-a)^{p+1}
            out[p] = (l1a - rp) / double(p + 1);
        }
        return;
    }
    // series in 1/a, converges geometrically with ratio 1/a <= 2/3
    const double la = std::log(a);
    for (int p = 0; p < 5; ++p) {
        double sum = 0.0, pw = 1.0;
        for (int m = 1; m < 200; ++m) {
            pw /= a;
            const double term = ((m & 1) ? 1.0 : -1.0) * pw / (double(m) * double(p + m + 1));
            sum += term;
            if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30))
                break;
        }
        out[p] = la / double(p + 1) + sum;
    }
}

} // namespace

PanelMoments panel_moments(double r_left, double h)
{
    PanelMoments m{};
    const double a = r_left;
    double A[7];
    for (int p = 0; p < 7; ++p)
        A[p] = 1.0 / double(p + 1); // ∫ tau^p dtau
    double I[5];
    log_base_integrals(a / h, I);
    const double lh = std::log(h);
    double L[6];
    for (int p = 0; p < 5; ++p)
        L[p] = lh * A[p] + I[p]; // ∫ tau^p ln(a + h tau) dtau
    // L[5] only needed through B[4] = a L[4] + h L[5]; extend the same way
    {
        double I5;
        if (a == 0.0) {
            I5 = -1.0 / 36.0;
        } else if (a / h < 1.5) {
            const double aa = a / h;
            const double l1a = std::log1p(aa), la = std::log(aa);
            double rp = 0.0, apow = 1.0;
            for (int i = 0; i <= 5; ++i) {
                rp += apow / double(6 - i);
                apow *= -aa;
            }
            rp += apow * (l1a - la);
            I5 = (l1a - rp) / 6.0;
        } else {
            const double aa = a / h;
            double sum = 0.0, pw = 1.0;
            for (int mm = 1; mm < 200; ++mm) {
                pw /= aa;
                const double term = ((mm & 1) ? 1.0 : -1.0) * pw / (double(mm) * double(5 + mm + 1));
                sum += term;
                if (std::abs(term) < 1e-18 * (std::abs(sum) + 1e-30))
                    break;
            }
            I5 = std::log(aa) / 6.0 + sum;
        }
        L[5] = lh * (1.0 / 6.0) + I5;
    }
    for (int p = 0; p < 5; ++p) {
        m.one[p] = h * A[p];
        m.s[p] = h * (a * A[p] + h * A[p + 1]);
        m.s2[p] = h * (a * a * A[p] + 2.0 * a * h * A[p + 1] + h * h * A[p + 2]);
        m.slog[p] = h * (a * L[p] + h * L[p + 1]);
    }
    return m;
}

RadialTransform::RadialTransform(std::vector<double> grid) : grid_(std::move(grid))
{
    if (grid_.size() < 2)
        throw std::invalid_argument("RadialTransform: need at least 2 nodes");
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
        if (!(grid_[i] < grid_[i + 1]))
            throw std::invalid_argument("RadialTransform: grid not strictly increasing");
    panels_.reserve(grid_.size() - 1);
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i)
        panels_.push_back(panel_moments(grid_[i], grid_[i + 1] - grid_[i]));
}

namespace {

// Hermite coefficients on one panel: g(tau) = c0 + c1 tau + c2 tau^2 + c3 tau^3
inline void hermite_coeffs(double g0, double g1, double d0, double d1, double h,
                           double c[4])
{
    const double delta = g1 - g0;
    c[0] = g0;
    c[1] = h * d0;
    c[2] = 3.0 * delta - h * (2.0 * d0 + d1);
    c[3] = -2.0 * delta + h * (d0 + d1);
}

inline double dot4(const double c[4], const double w[5])
{
    return c[0] * w[0] + c[1] * w[1] + c[2] * w[2] + c[3] * w[3];
}

} // namespace

RadialTransform::Cumulative RadialTransform::cumulative(const std::vector<double>& g) const
{
    if (g.size() != grid_.size())
        throw std::invalid_argument("RadialTransform: sample size mismatch");
    const std::vector<double> d = cubic_fit_slopes(grid_, g);
    Cumulative c;
    const std::size_t n = grid_.size();
    c.m0.assign(n, 0.0);
    c.m1.assign(n, 0.0);
    c.m2.assign(n, 0.0);
    c.mlog.assign(n, 0.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double h = grid_[j + 1] - grid_[j];
        double cf[4];
        hermite_coeffs(g[j], g[j + 1], d[j], d[j + 1], h, cf);
        const PanelMoments& pm = panels_[j];
        c.m0[j + 1] = c.m0[j] + dot4(cf, pm.one);
        c.m1[j + 1] = c.m1[j] + dot4(cf, pm.s);
        c.m2[j + 1] = c.m2[j] + dot4(cf, pm.s2);
        c.mlog[j + 1] = c.mlog[j] + dot4(cf, pm.slog);
    }
    return c;
}

std::vector<double> RadialTransform::log_kernel(const std::vector<double>& g) const
{
    const Cumulative c = cumulative(g);
    std::vector<double> out(grid_.size(), 0.0);
    for (std::size_t i = 1; i < grid_.size(); ++i)
        out[i] = std::log(grid_[i]) * c.m1[i] - c.mlog[i];
    return out;
}

std::vector<double> RadialTransform::disc_kernel(const std::vector<double>& g) const
{
    const Cumulative c = cumulative(g);
    std::vector<double> out(grid_.size(), 0.0);
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        const double r = grid_[i];
        out[i] = 0.5 * r * c.m0[i] - 0.5 * c.m2[i] / r;
    }
    return out;
}

double RadialTransform::moment_to(const std::vector<double>& g, int p, double R) const
{
    if (p != 0 && p != 1)
        throw std::invalid_argument("RadialTransform::moment_to: p must be 0 or 1");
    if (R < grid_.front() || R > grid_.back() * (1.0 + 1e-12))
        throw std::domain_error("RadialTransform::moment_to: R outside grid");
    const std::vector<double> d = cubic_fit_slopes(grid_, g);
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < grid_.size(); ++j) {
        const double h = grid_[j + 1] - grid_[j];
        double cf[4];
        hermite_coeffs(g[j], g[j + 1], d[j], d[j + 1], h, cf);
        if (grid_[j + 1] <= R) {
            const PanelMoments& pm = panels_[j];
            acc += (p == 0) ? dot4(cf, pm.one) : dot4(cf, pm.s);
            if (grid_[j + 1] == R)
                break;
        } else {
            // partial panel [grid_[j], R]
            const double hh = R - grid_[j];
            if (hh <= 0.0)
                break;
            // rescale the cubic to the shorter panel: tau' = tau * h/hh
            const double q = hh / h;
            double cs[4];
            double qq = 1.0;
            for (int k = 0; k < 4; ++k) {
                cs[k] = cf[k] * qq;
                qq *= q;
            }
            const PanelMoments pm = panel_moments(grid_[j], hh);
            acc += (p == 0) ? dot4(cs, pm.one) : dot4(cs, pm.s);
            break;
        }
    }
    return acc;
}

} // namespace vmcyl

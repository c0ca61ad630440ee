#include "vmcyl/densities.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "vmcyl/quadrature.hpp"

namespace vmcyl {

void QuadratureSpec::validate() const
{
    if (n_theta < 4 || n_energy < 4 || n_g < 4)
        throw std::invalid_argument("quadrature: all node counts must be >= 4");
    if (n_theta % 2 != 0)
        throw std::invalid_argument("quadrature: n_theta must be even");
    if (energy_panels < 1 || g_panels < 1)
        throw std::invalid_argument("quadrature: panel counts must be >= 1");
    if (!(guard > 0.0))
        throw std::invalid_argument("quadrature: truncation guard must be positive");
}

QuadratureSpec QuadratureSpec::doubled() const
{
    QuadratureSpec q = *this;
    q.n_theta *= 2;
    q.n_energy *= 2;
    q.n_g *= 2;
    return q;
}

namespace {

// sin(2 pi j / n) with exact antisymmetry: the table sums to zero bit-exactly,
// which makes the odd-in-theta cancellation of the azimuthal kernel exact for
// any integrand independent of theta.
std::vector<double> sin_table(int n)
{
    std::vector<double> s(std::size_t(n), 0.0);
    for (int j = 1; j < n / 2; ++j) {
        const double v = std::sin(2.0 * M_PI * double(j) / double(n));
        s[std::size_t(j)] = v;
        s[std::size_t(n - j)] = -v;
    }
    s[0] = 0.0;
    s[std::size_t(n / 2)] = 0.0;
    return s;
}

SourceTriple one_species(const Species& sp, const SourcePoint& p, const QuadratureSpec& quad)
{
    const double m = sp.mass, q = sp.charge;
    const AnsatzFamily& eta = sp.ansatz;
    SourceTriple out;

    const double e_top = eta.support_energy_max() - q * p.a;
    if (!(e_top > m))
        return out;
    const double g_rad = std::sqrt((e_top - m) * (e_top + m));
    const auto [gs_lo, gs_hi] = eta.g_support();
    const double lo = std::max(-g_rad, gs_lo - q * p.c);
    const double hi = std::min(g_rad, gs_hi - q * p.c);
    if (!(lo < hi))
        return out;

    const std::vector<double> sins = sin_table(quad.n_theta);
    const double theta_w = 2.0 * M_PI / double(quad.n_theta);
    const GaussRule& gle = gauss_legendre(quad.n_energy);
    const GaussRule& glg = gauss_legendre(quad.n_g);

    const bool product = (eta.kind == AnsatzKind::product_cutoff);
    const double e_floor = eta.support_energy_min() - q * p.a;

    // axial momentum: G - q c = g_rad sin(psi) removes the square-root
    // vanishing of the energy shell at the admissibility boundary
    const double psi_lo = std::asin(std::clamp(lo / g_rad, -1.0, 1.0));
    const double psi_hi = std::asin(std::clamp(hi / g_rad, -1.0, 1.0));
    const double psi_h = (psi_hi - psi_lo) / double(quad.g_panels);

    double acc1 = 0.0, acc2 = 0.0, acc3 = 0.0;
    for (int pg = 0; pg < quad.g_panels; ++pg) {
        const double pmid = psi_lo + psi_h * (double(pg) + 0.5), phalf = 0.5 * psi_h;
        for (std::size_t ig = 0; ig < glg.x.size(); ++ig) {
            const double psi = pmid + phalf * glg.x[std::size_t(ig)];
            const double gt = g_rad * std::sin(psi); // G - q c
            const double jac_g = g_rad * std::cos(psi) * glg.w[ig] * phalf;
            const double g_val = gt + q * p.c;
            const double e_min = std::sqrt(m * m + gt * gt);

            // energy: E - q a = e_min + t^2 removes the square root at the
            // lower limit
            const double t_lo = std::sqrt(std::max(0.0, e_floor - e_min));
            const double t_hi = std::sqrt(std::max(0.0, e_top - e_min));
            if (!(t_hi > t_lo))
                continue;
            const double t_h = (t_hi - t_lo) / double(quad.energy_panels);
            for (int pe = 0; pe < quad.energy_panels; ++pe) {
                const double tmid = t_lo + t_h * (double(pe) + 0.5), thalf = 0.5 * t_h;
                for (std::size_t ie = 0; ie < gle.x.size(); ++ie) {
                    const double t = tmid + thalf * gle.x[ie];
                    const double e = e_min + t * t; // E - q a
                    const double E = e + q * p.a;
                    const double k = t * std::sqrt(t * t + 2.0 * e_min);
                    const double jac = jac_g * 2.0 * t * gle.w[ie] * thalf * theta_w;

                    double s1, s2;
                    if (product) {
                        const double weg = eta.majorant(E, g_val); // amp * wE * wG
                        if (weg == 0.0)
                            continue;
                        const double kappa = p.r * k, f0 = p.r * q * p.b;
                        double a1 = 0.0, a2 = 0.0;
                        for (int j = 0; j < quad.n_theta; ++j) {
                            const double wf =
                                eta.f_window.value(kappa * sins[std::size_t(j)] + f0);
                            a1 += wf;
                            a2 += sins[std::size_t(j)] * wf;
                        }
                        s1 = weg * a1;
                        s2 = weg * a2;
                    } else {
                        const double kappa = p.r * k, f0 = p.r * q * p.b;
                        double a1 = 0.0, a2 = 0.0;
                        for (int j = 0; j < quad.n_theta; ++j) {
                            const double val =
                                eta.value(E, kappa * sins[std::size_t(j)] + f0, g_val);
                            a1 += val;
                            a2 += sins[std::size_t(j)] * val;
                        }
                        s1 = a1;
                        s2 = a2;
                    }
                    acc1 += jac * e * s1;
                    acc2 += jac * k * s2;
                    acc3 += jac * gt * s1;
                }
            }
        }
    }
    const double pref = 4.0 * M_PI * q;
    out.rho = pref * acc1;
    out.j_phi = pref * acc2;
    out.j_z = pref * acc3;
    if (!std::isfinite(out.rho) || !std::isfinite(out.j_phi) || !std::isfinite(out.j_z))
        throw std::runtime_error("source kernel evaluation produced a non-finite value at (r=" +
                                 std::to_string(p.r) + ", a=" + std::to_string(p.a) +
                                 ", b=" + std::to_string(p.b) + ", c=" + std::to_string(p.c) +
                                 ") for species " + sp.name);
    return out;
}

} // namespace

SourceTriple scaled_sources(const Species& sp, const SourcePoint& p, const QuadratureSpec& quad)
{
    quad.validate();
    return one_species(sp, p, quad);
}

SourceTriple scaled_sources(std::span<const Species> species, const SourcePoint& p,
                            const QuadratureSpec& quad)
{
    quad.validate();
    SourceTriple out;
    for (const Species& sp : species) {
        const SourceTriple t = one_species(sp, p, quad);
        out.rho += t.rho;
        out.j_phi += t.j_phi;
        out.j_z += t.j_z;
    }
    return out;
}

namespace {

// ∫ |E| w(E) dE and ∫ w(E) dE over [lo, hi] for a smooth window w;
// composite Gauss with a split at E = 0 keeps the kink at a panel edge.
std::pair<double, double> weighted_energy_integrals(const std::function<double(double)>& w,
                                                    double lo, double hi)
{
    auto wabs = [&](double E) { return std::abs(E) * w(E); };
    double mass = 0.0, mom = 0.0;
    if (lo < 0.0 && hi > 0.0) {
        mass = integrate_gl(w, lo, 0.0, 4, 16) + integrate_gl(w, 0.0, hi, 4, 16);
        mom = integrate_gl(wabs, lo, 0.0, 4, 16) + integrate_gl(wabs, 0.0, hi, 4, 16);
    } else {
        mass = integrate_gl(w, lo, hi, 8, 16);
        mom = integrate_gl(wabs, lo, hi, 8, 16);
    }
    return {mom, mass};
}

} // namespace

std::pair<double, double> source_bound_constants(std::span<const Species> species,
                                                 const QuadratureSpec& quad)
{
    quad.validate();
    double c1 = 0.0, c2 = 0.0;
    for (const Species& sp : species) {
        const AnsatzFamily& eta = sp.ansatz;
        double mom = 0.0, mass = 0.0;
        if (eta.kind == AnsatzKind::product_cutoff) {
            // separable majorant: amplitude * wE(E) * wG(G)
            const BumpWindow e_win{eta.energy_floor, eta.energy_cutoff, eta.exponent, true};
            auto we = [&](double E) { return e_win.value(E); };
            const auto [em, es] = weighted_energy_integrals(we, e_win.lo, e_win.hi);
            auto wg = [&](double G) { return eta.g_window.value(G); };
            const double gs = integrate_gl(wg, eta.g_window.lo, eta.g_window.hi, 8, 16);
            mom = eta.amplitude * em * gs;
            mass = eta.amplitude * es * gs;
        } else {
            const Table2& tab = eta.table_majorant;
            const double elo = tab.e.front(), ehi = tab.e.back();
            const double glo = tab.g.front(), ghi = tab.g.back();
            auto fm = [&](double E) {
                return integrate_gl([&](double G) { return tab.value(E, G); }, glo, ghi,
                                    std::max<int>(4, int(tab.g.size())), 12);
            };
            const auto [em, es] = weighted_energy_integrals(fm, elo, ehi);
            mom = em;
            mass = es;
        }
        if (!std::isfinite(mom) || !std::isfinite(mass))
            throw std::invalid_argument("source bound constants: majorant of species " +
                                        sp.name + " is not integrable");
        c1 += std::abs(sp.charge) * mom;
        c2 += sp.charge * sp.charge * mass;
    }
    const double pref = 8.0 * M_PI * M_PI;
    return {pref * c1, pref * c2};
}

double momentum_support(const Species& sp, double a)
{
    const double e_top = sp.ansatz.support_energy_max() - sp.charge * a;
    if (!(e_top > sp.mass))
        return 0.0;
    return std::sqrt((e_top - sp.mass) * (e_top + sp.mass));
}

} // namespace vmcyl

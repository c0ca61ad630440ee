#pragma once

#include <vector>

#include "vmcyl/radial.hpp"

namespace vmcyl {

// Modified Bessel function of the first kind, order 0, by its power series.
double bessel_i0(double x);
// I0(x) - 1 without cancellation at small x.
double bessel_i0_minus1(double x);

enum class EnvelopeRule { series, bessel };

// A priori envelopes for the potential triple, determined by the source
// bound constants (c1, c2): phi_bound dominates |phi| and |A_3| for every
// iterate and fixed point, a_phi_bound dominates |A_phi|.
class EnvelopeBounds {
public:
    EnvelopeBounds(double c1, double c2, EnvelopeRule rule = EnvelopeRule::bessel);

    double c1() const { return c1_; }
    double c2() const { return c2_; }
    EnvelopeRule rule() const { return rule_; }

    double phi_bound(double r) const;   // also bounds |A_3|
    double a_phi_bound(double r) const;

    // partial sums over the first k terms; per-iterate bounds
    double phi_bound_partial(double r, int k) const;
    double a_phi_bound_partial(double r, int k) const;

private:
    double series(double r, int k_max, bool relaxed) const;
    double c1_, c2_;
    EnvelopeRule rule_;
};

// Independent check of phi_bound: march the second-kind Volterra equation
//   y(r) = c1 r^2/4 + c2 ∫_0^r (ln r - ln s) s y(s) ds
// by product integration with exact log-kernel panel moments.
RadialProfile volterra_envelope(double c1, double c2, const std::vector<double>& grid);

} // namespace vmcyl

#include "vmcyl/model.hpp"

#include <cmath>
#include <stdexcept>

#include "vmcyl/quadrature.hpp"

namespace vmcyl {

namespace {

double ipow(double x, int k)
{
    double r = 1.0;
    for (int i = 0; i < k; ++i)
        r *= x;
    return r;
}

// B(k+1, k+1) = (k!)^2 / (2k+1)!
double beta_kk(int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i)
        r *= double(i) / double(k + i);
    return r / double(2 * k + 1);
}

} // namespace

double BumpWindow::value(double x) const
{
    if (!active)
        return 1.0;
    if (x <= lo || x >= hi)
        return 0.0;
    const double half = 0.5 * (hi - lo);
    const double u = (x - lo) * (hi - x) / (half * half);
    return ipow(u, exponent);
}

double BumpWindow::slope(double x) const
{
    if (!active)
        return 0.0;
    if (x <= lo || x >= hi)
        return 0.0;
    const double half = 0.5 * (hi - lo);
    const double u = (x - lo) * (hi - x) / (half * half);
    const double du = (lo + hi - 2.0 * x) / (half * half);
    return double(exponent) * ipow(u, exponent - 1) * du;
}

double BumpWindow::max_slope() const
{
    if (!active)
        return 0.0;
    // |w'| peaks at xi^2 = W^2/(2k-1) away from the midpoint
    const double W = 0.5 * (hi - lo);
    const int k = exponent;
    const double q = double(2 * k - 2) / double(2 * k - 1);
    return 2.0 * double(k) / (std::sqrt(double(2 * k - 1)) * W) * ipow(q, k - 1);
}

double BumpWindow::integral() const
{
    if (!active)
        throw std::logic_error("BumpWindow::integral on an inactive window");
    return (hi - lo) * ipow(4.0, exponent) * beta_kk(exponent);
}

double BumpWindow::abs_first_moment() const
{
    const double mass = integral();
    const double mid = 0.5 * (lo + hi);
    if (lo >= 0.0)
        return mid * mass;
    if (hi <= 0.0)
        return -mid * mass;
    // support straddles zero; split the integral there
    auto f = [&](double x) { return std::abs(x) * value(x); };
    return integrate_gl(f, lo, 0.0, 4, 16) + integrate_gl(f, 0.0, hi, 4, 16);
}

// ---------------------------------------------------------------------------
// Tensor Hermite tables

namespace {

struct Basis1 {
    std::size_t k;          // left node of the cell
    double b0, b1;          // value basis
    double s0, s1;          // slope basis (already scaled by h)
    double db0, db1;        // derivatives of the value basis
    double ds0, ds1;        // derivatives of the slope basis
    bool inside;
};

Basis1 axis_basis(const std::vector<double>& ax, double x)
{
    Basis1 b{};
    if (ax.size() < 2 || x < ax.front() || x > ax.back()) {
        b.inside = false;
        return b;
    }
    std::size_t k = 0;
    while (k + 2 < ax.size() && x >= ax[k + 1])
        ++k;
    const double h = ax[k + 1] - ax[k];
    const double t = (x - ax[k]) / h;
    const double t2 = t * t, t3 = t2 * t;
    b.k = k;
    b.b0 = 2 * t3 - 3 * t2 + 1;
    b.b1 = -2 * t3 + 3 * t2;
    b.s0 = h * (t3 - 2 * t2 + t);
    b.s1 = h * (t3 - t2);
    b.db0 = (6 * t2 - 6 * t) / h;
    b.db1 = (-6 * t2 + 6 * t) / h;
    b.ds0 = 3 * t2 - 4 * t + 1;
    b.ds1 = 3 * t2 - 2 * t;
    b.inside = true;
    return b;
}

void check_axis(const std::vector<double>& ax, const char* what)
{
    if (ax.size() < 2)
        throw std::invalid_argument(std::string("table axis too short: ") + what);
    for (std::size_t i = 0; i + 1 < ax.size(); ++i)
        if (!(ax[i] < ax[i + 1]))
            throw std::invalid_argument(std::string("table axis not increasing: ") + what);
}

std::vector<double> axis_slopes(const std::vector<double>& ax,
                                const std::vector<double>& v, std::size_t count,
                                std::size_t stride, std::size_t lines,
                                std::size_t line_stride)
{
    std::vector<double> out(v.size(), 0.0);
    std::vector<double> line(count), sl;
    for (std::size_t l = 0; l < lines; ++l) {
        for (std::size_t i = 0; i < count; ++i)
            line[i] = v[l * line_stride + i * stride];
        sl = cubic_fit_slopes(ax, line);
        for (std::size_t i = 0; i < count; ++i)
            out[l * line_stride + i * stride] = sl[i];
    }
    return out;
}

} // namespace

void Table3::finalize()
{
    check_axis(e, "E");
    check_axis(f, "F");
    check_axis(g, "G");
    const std::size_t ne = e.size(), nf = f.size(), ng = g.size();
    if (val.size() != ne * nf * ng)
        throw std::invalid_argument("Table3: value count does not match axes");
    // slopes along G (fast axis), F, E
    dg.assign(val.size(), 0.0);
    df.assign(val.size(), 0.0);
    de.assign(val.size(), 0.0);
    {
        std::vector<double> line(ng), sl;
        for (std::size_t ie = 0; ie < ne; ++ie)
            for (std::size_t jf = 0; jf < nf; ++jf) {
                const std::size_t base = (ie * nf + jf) * ng;
                for (std::size_t kg = 0; kg < ng; ++kg)
                    line[kg] = val[base + kg];
                sl = cubic_fit_slopes(g, line);
                for (std::size_t kg = 0; kg < ng; ++kg)
                    dg[base + kg] = sl[kg];
            }
    }
    {
        std::vector<double> line(nf), sl;
        for (std::size_t ie = 0; ie < ne; ++ie)
            for (std::size_t kg = 0; kg < ng; ++kg) {
                for (std::size_t jf = 0; jf < nf; ++jf)
                    line[jf] = val[(ie * nf + jf) * ng + kg];
                sl = cubic_fit_slopes(f, line);
                for (std::size_t jf = 0; jf < nf; ++jf)
                    df[(ie * nf + jf) * ng + kg] = sl[jf];
            }
    }
    {
        std::vector<double> line(ne), sl;
        for (std::size_t jf = 0; jf < nf; ++jf)
            for (std::size_t kg = 0; kg < ng; ++kg) {
                for (std::size_t ie = 0; ie < ne; ++ie)
                    line[ie] = val[(ie * nf + jf) * ng + kg];
                sl = cubic_fit_slopes(e, line);
                for (std::size_t ie = 0; ie < ne; ++ie)
                    de[(ie * nf + jf) * ng + kg] = sl[ie];
            }
    }
}

double Table3::value(double E, double F, double G) const
{
    const Basis1 be = axis_basis(e, E), bf = axis_basis(f, F), bg = axis_basis(g, G);
    if (!be.inside || !bf.inside || !bg.inside)
        return 0.0;
    const std::size_t nf = f.size(), ng = g.size();
    auto at = [&](const std::vector<double>& a, std::size_t ie, std::size_t jf,
                  std::size_t kg) { return a[(ie * nf + jf) * ng + kg]; };
    double acc = 0.0;
    const double eb[2] = {be.b0, be.b1}, es[2] = {be.s0, be.s1};
    const double fb[2] = {bf.b0, bf.b1}, fs[2] = {bf.s0, bf.s1};
    const double gb[2] = {bg.b0, bg.b1}, gs[2] = {bg.s0, bg.s1};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const std::size_t ie = be.k + std::size_t(a);
                const std::size_t jf = bf.k + std::size_t(b);
                const std::size_t kg = bg.k + std::size_t(c);
                const double w = eb[a] * fb[b] * gb[c];
                acc += at(val, ie, jf, kg) * w;
                acc += at(de, ie, jf, kg) * es[a] * fb[b] * gb[c];
                acc += at(df, ie, jf, kg) * eb[a] * fs[b] * gb[c];
                acc += at(dg, ie, jf, kg) * eb[a] * fb[b] * gs[c];
            }
    return acc;
}

std::array<double, 3> Table3::gradient(double E, double F, double G) const
{
    const Basis1 be = axis_basis(e, E), bf = axis_basis(f, F), bg = axis_basis(g, G);
    if (!be.inside || !bf.inside || !bg.inside)
        return {0.0, 0.0, 0.0};
    const std::size_t nf = f.size(), ng = g.size();
    auto at = [&](const std::vector<double>& a, std::size_t ie, std::size_t jf,
                  std::size_t kg) { return a[(ie * nf + jf) * ng + kg]; };
    std::array<double, 3> out{0.0, 0.0, 0.0};
    const double eb[2] = {be.b0, be.b1}, es[2] = {be.s0, be.s1};
    const double deb[2] = {be.db0, be.db1}, des[2] = {be.ds0, be.ds1};
    const double fb[2] = {bf.b0, bf.b1}, fs[2] = {bf.s0, bf.s1};
    const double dfb[2] = {bf.db0, bf.db1}, dfs[2] = {bf.ds0, bf.ds1};
    const double gb[2] = {bg.b0, bg.b1}, gs[2] = {bg.s0, bg.s1};
    const double dgb[2] = {bg.db0, bg.db1}, dgs[2] = {bg.ds0, bg.ds1};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                const std::size_t ie = be.k + std::size_t(a);
                const std::size_t jf = bf.k + std::size_t(b);
                const std::size_t kg = bg.k + std::size_t(c);
                const double V = at(val, ie, jf, kg);
                const double DE = at(de, ie, jf, kg);
                const double DF = at(df, ie, jf, kg);
                const double DG = at(dg, ie, jf, kg);
                out[0] += V * deb[a] * fb[b] * gb[c] + DE * des[a] * fb[b] * gb[c] +
                          DF * deb[a] * fs[b] * gb[c] + DG * deb[a] * fb[b] * gs[c];
                out[1] += V * eb[a] * dfb[b] * gb[c] + DE * es[a] * dfb[b] * gb[c] +
                          DF * eb[a] * dfs[b] * gb[c] + DG * eb[a] * dfb[b] * gs[c];
                out[2] += V * eb[a] * fb[b] * dgb[c] + DE * es[a] * fb[b] * dgb[c] +
                          DF * eb[a] * fs[b] * dgb[c] + DG * eb[a] * fb[b] * dgs[c];
            }
    return out;
}

void Table2::finalize()
{
    check_axis(e, "E");
    check_axis(g, "G");
    const std::size_t ne = e.size(), ng = g.size();
    if (val.size() != ne * ng)
        throw std::invalid_argument("Table2: value count does not match axes");
    de = axis_slopes(e, val, ne, ng, ng, 1);
    dg.assign(val.size(), 0.0);
    std::vector<double> line(ng), sl;
    for (std::size_t ie = 0; ie < ne; ++ie) {
        for (std::size_t kg = 0; kg < ng; ++kg)
            line[kg] = val[ie * ng + kg];
        sl = cubic_fit_slopes(g, line);
        for (std::size_t kg = 0; kg < ng; ++kg)
            dg[ie * ng + kg] = sl[kg];
    }
}

double Table2::value(double E, double G) const
{
    const Basis1 be = axis_basis(e, E), bg = axis_basis(g, G);
    if (!be.inside || !bg.inside)
        return 0.0;
    const std::size_t ng = g.size();
    auto at = [&](const std::vector<double>& a, std::size_t ie, std::size_t kg) {
        return a[ie * ng + kg];
    };
    double acc = 0.0;
    const double eb[2] = {be.b0, be.b1}, es[2] = {be.s0, be.s1};
    const double gb[2] = {bg.b0, bg.b1}, gs[2] = {bg.s0, bg.s1};
    for (int a = 0; a < 2; ++a)
        for (int c = 0; c < 2; ++c) {
            const std::size_t ie = be.k + std::size_t(a);
            const std::size_t kg = bg.k + std::size_t(c);
            acc += at(val, ie, kg) * eb[a] * gb[c];
            acc += at(de, ie, kg) * es[a] * gb[c];
            acc += at(dg, ie, kg) * eb[a] * gs[c];
        }
    return acc;
}

// ---------------------------------------------------------------------------
// AnsatzFamily

AnsatzFamily AnsatzFamily::product(double amplitude, int exponent, double energy_cutoff,
                                   double energy_floor,
                                   std::optional<std::pair<double, double>> f_win,
                                   std::pair<double, double> g_win, bool nontrivial)
{
    AnsatzFamily a;
    a.kind = AnsatzKind::product_cutoff;
    a.amplitude = amplitude;
    a.exponent = exponent;
    a.energy_cutoff = energy_cutoff;
    a.energy_floor = energy_floor;
    if (f_win)
        a.f_window = BumpWindow{f_win->first, f_win->second, exponent, true};
    a.g_window = BumpWindow{g_win.first, g_win.second, exponent, true};
    a.nontrivial = nontrivial;
    return a;
}

void AnsatzFamily::validate(double mass) const
{
    if (kind == AnsatzKind::product_cutoff) {
        if (amplitude < 0.0)
            throw std::invalid_argument("ansatz: amplitude must be nonnegative");
        if (exponent < 2)
            throw std::invalid_argument("ansatz: smoothness exponent must be >= 2");
        if (!(energy_cutoff > energy_floor))
            throw std::invalid_argument("ansatz: energy cutoff must exceed the energy floor");
        if (!g_window.active || !(g_window.lo < g_window.hi))
            throw std::invalid_argument(
                "ansatz: a bounded axial-momentum window is required (the source "
                "bound constants diverge otherwise)");
        if (f_window.active && !(f_window.lo < f_window.hi))
            throw std::invalid_argument("ansatz: empty angular-momentum window");
        if (nontrivial) {
            if (!(energy_cutoff > mass))
                throw std::invalid_argument("ansatz: energy cutoff below rest mass");
            if (!(energy_floor <= mass))
                throw std::invalid_argument("ansatz: energy floor above rest mass");
            if (!(g_window.lo < 0.0 && g_window.hi > 0.0))
                throw std::invalid_argument(
                    "ansatz: nontrivial family needs an axial window straddling 0");
            if (f_window.active && !(f_window.lo <= 0.0 && f_window.hi >= 0.0) )
                throw std::invalid_argument(
                    "ansatz: nontrivial family needs an angular window touching 0");
            if (f_window.active && f_window.lo == 0.0 && f_window.hi == 0.0)
                throw std::invalid_argument("ansatz: angular window is empty");
        }
        if (g_cutoff) {
            const double gc = *g_cutoff;
            if (!(gc <= g_window.lo || gc >= g_window.hi))
                throw std::invalid_argument(
                    "ansatz: explicit axial cutoff must lie outside the window support");
        }
    } else {
        if (table.empty())
            throw std::invalid_argument("ansatz: tabulated family without table");
        if (table_majorant.empty() || table_grad_majorant.empty())
            throw std::invalid_argument("ansatz: tabulated family needs both majorant tables");
        // cutoff condition: the top energy slice must vanish
        const std::size_t ne = table.e.size(), nf = table.f.size(), ng = table.g.size();
        for (std::size_t jf = 0; jf < nf; ++jf)
            for (std::size_t kg = 0; kg < ng; ++kg)
                if (std::abs(table.val[((ne - 1) * nf + jf) * ng + kg]) > 1e-14)
                    throw std::invalid_argument(
                        "ansatz: tabulated values must vanish at the top energy slice");
        for (double v : table.val)
            if (v < -1e-14)
                throw std::invalid_argument("ansatz: tabulated values must be nonnegative");
    }
}

double AnsatzFamily::value(double E, double F, double G) const
{
    if (kind == AnsatzKind::tabulated)
        return std::max(0.0, table.value(E, F, G));
    if (E >= energy_cutoff || E <= energy_floor)
        return 0.0;
    double v = amplitude;
    {
        const double half = 0.5 * (energy_cutoff - energy_floor);
        const double u = (E - energy_floor) * (energy_cutoff - E) / (half * half);
        v *= ipow(u, exponent);
    }
    if (f_window.active) {
        v *= f_window.value(F);
        if (v == 0.0)
            return 0.0;
    }
    v *= g_window.value(G);
    return v;
}

std::array<double, 3> AnsatzFamily::gradient(double E, double F, double G) const
{
    if (kind == AnsatzKind::tabulated)
        return table.gradient(E, F, G);
    const BumpWindow e_win{energy_floor, energy_cutoff, exponent, true};
    const double we = e_win.value(E), wf = f_window.value(F), wg = g_window.value(G);
    return {amplitude * e_win.slope(E) * wf * wg,
            amplitude * we * f_window.slope(F) * wg,
            amplitude * we * wf * g_window.slope(G)};
}

double AnsatzFamily::majorant(double E, double G) const
{
    if (kind == AnsatzKind::tabulated)
        return table_majorant.value(E, G);
    const BumpWindow e_win{energy_floor, energy_cutoff, exponent, true};
    return amplitude * e_win.value(E) * g_window.value(G);
}

double AnsatzFamily::gradient_majorant(double E, double G) const
{
    if (kind == AnsatzKind::tabulated)
        return table_grad_majorant.value(E, G);
    const BumpWindow e_win{energy_floor, energy_cutoff, exponent, true};
    const double we = e_win.value(E), dwe = std::abs(e_win.slope(E));
    const double wg = g_window.value(G), dwg = std::abs(g_window.slope(G));
    const double lf = f_window.active ? f_window.max_slope() : 0.0;
    const double t1 = dwe * wg, t2 = we * wg * lf, t3 = we * dwg;
    return amplitude * std::sqrt(t1 * t1 + t2 * t2 + t3 * t3);
}

bool AnsatzFamily::f_independent() const
{
    if (kind == AnsatzKind::tabulated)
        return false;
    return !f_window.active;
}

double AnsatzFamily::support_energy_max() const
{
    return (kind == AnsatzKind::tabulated) ? table.e.back() : energy_cutoff;
}

double AnsatzFamily::support_energy_min() const
{
    return (kind == AnsatzKind::tabulated) ? table.e.front() : energy_floor;
}

std::pair<double, double> AnsatzFamily::g_support() const
{
    if (kind == AnsatzKind::tabulated)
        return {table.g.front(), table.g.back()};
    return {g_window.lo, g_window.hi};
}

Species::Species(std::string name_, double mass_, double charge_, AnsatzFamily ansatz_)
    : name(std::move(name_)), mass(mass_), charge(charge_), ansatz(std::move(ansatz_))
{
    if (!(mass > 0.0))
        throw std::invalid_argument("species " + name + ": mass must be positive");
    if (charge == 0.0)
        throw std::invalid_argument("species " + name + ": charge must be nonzero");
    ansatz.validate(mass);
}

// ---------------------------------------------------------------------------
// External potential

double ExternalComponent::value(double r) const
{
    switch (kind) {
    case Kind::zero:
        return 0.0;
    case Kind::linear:
        return coeff * r;
    case Kind::ramp: {
        const double t = std::min(r / ramp_radius, 1.0);
        return coeff * t * t * (3.0 - 2.0 * t);
    }
    case Kind::constant:
        return coeff;
    case Kind::tabulated:
        return table(r);
    }
    return 0.0;
}

double ExternalComponent::derivative(double r) const
{
    switch (kind) {
    case Kind::zero:
        return 0.0;
    case Kind::linear:
        return coeff;
    case Kind::ramp: {
        if (r >= ramp_radius)
            return 0.0;
        const double t = r / ramp_radius;
        return coeff * 6.0 * t * (1.0 - t) / ramp_radius;
    }
    case Kind::constant:
        return 0.0;
    case Kind::tabulated:
        return table.derivative(r);
    }
    return 0.0;
}

ExternalComponent ExternalComponent::zero()
{
    return {};
}

ExternalComponent ExternalComponent::linear(double slope)
{
    ExternalComponent c;
    c.kind = Kind::linear;
    c.coeff = slope;
    return c;
}

ExternalComponent ExternalComponent::ramp(double amplitude, double radius)
{
    if (!(radius > 0.0))
        throw std::invalid_argument("external ramp: radius must be positive");
    ExternalComponent c;
    c.kind = Kind::ramp;
    c.coeff = amplitude;
    c.ramp_radius = radius;
    return c;
}

ExternalComponent ExternalComponent::constant(double amplitude)
{
    ExternalComponent c;
    c.kind = Kind::constant;
    c.coeff = amplitude;
    return c;
}

ExternalComponent ExternalComponent::tabulated(RadialProfile profile)
{
    ExternalComponent c;
    c.kind = Kind::tabulated;
    c.table = std::move(profile);
    return c;
}

std::vector<std::string> ExternalPotential::condition_violations(double R0,
                                                                 std::size_t check_n) const
{
    std::vector<std::string> out;
    if (std::abs(a_phi.value(0.0)) > 1e-12)
        out.push_back("A_phi_ext(0) != 0");
    if (std::abs(a_z.value(0.0)) > 1e-12)
        out.push_back("A_z_ext(0) != 0");
    if (std::abs(a_z.derivative(0.0)) > 1e-12)
        out.push_back("A_z_ext'(0) != 0");
    // C1 at grid resolution: divided differences of the derivative stay bounded
    const auto grid = uniform_grid(R0, check_n);
    auto check_c1 = [&](const ExternalComponent& c, const char* label) {
        double prev = c.derivative(grid[0]);
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const double d = c.derivative(grid[i]);
            if (!std::isfinite(d) ||
                std::abs(d - prev) > 1e6 * (1.0 + std::abs(prev)) * (grid[1] - grid[0]))
                out.push_back(std::string(label) + " derivative jump near r=" +
                              std::to_string(grid[i]));
            prev = d;
        }
    };
    check_c1(a_phi, "A_phi_ext");
    check_c1(a_z, "A_z_ext");
    return out;
}

// ---------------------------------------------------------------------------
// Phase-space state and invariants

double PhaseState::radius() const
{
    return std::hypot(x[0], x[1]);
}

double PhaseState::v_r() const
{
    const double r = radius();
    if (r == 0.0)
        return 0.0;
    return (v[0] * x[0] + v[1] * x[1]) / r;
}

double PhaseState::v_phi() const
{
    const double r = radius();
    if (r == 0.0)
        return 0.0;
    return (x[0] * v[1] - x[1] * v[0]) / r;
}

double PhaseState::speed() const
{
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

Invariants invariants(const Species& sp, const PotentialState& pot,
                      const ExternalPotential& ext, const PhaseState& st)
{
    const double r = st.radius();
    const double q = sp.charge;
    const double v0 = std::sqrt(sp.mass * sp.mass + st.v[0] * st.v[0] +
                                st.v[1] * st.v[1] + st.v[2] * st.v[2]);
    Invariants inv;
    inv.energy = v0 + q * pot.phi(r);
    // r v_phi = x1 v2 - x2 v1, well defined on the axis
    inv.p_phi = (st.x[0] * st.v[1] - st.x[1] * st.v[0]) +
                r * q * (pot.a_phi(r) + ext.a_phi.value(r));
    inv.p_z = st.v[2] + q * (pot.a_z(r) + ext.a_z.value(r));
    return inv;
}

double eval_ansatz(const Species& sp, double E, double F, double G)
{
    return sp.ansatz.value(E, F, G);
}

double eval_f(const Species& sp, const PotentialState& pot,
              const ExternalPotential& ext, const PhaseState& st)
{
    const Invariants inv = invariants(sp, pot, ext, st);
    return sp.ansatz.value(inv.energy, inv.p_phi, inv.p_z);
}

} // namespace vmcyl

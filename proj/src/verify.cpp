#include "vmcyl/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "vmcyl/solver.hpp"

namespace vmcyl {

namespace {

using Vec6 = std::array<double, 6>;

struct ForceField {
    const Species* sp;
    const PotentialState* pot;
    const ExternalPotential* ext;
    double R0;

    Vec6 rhs(const Vec6& y) const
    {
        const double m = sp->mass, q = sp->charge;
        const double r_raw = std::hypot(y[0], y[1]);
        // stages of a step ending exactly on the wall may poke past it by
        // rounding; evaluate the frozen wall fields there
        const double r = std::min(r_raw, R0);
        const double v0 = std::sqrt(m * m + y[3] * y[3] + y[4] * y[4] + y[5] * y[5]);
        const double vh0 = y[3] / v0, vh1 = y[4] / v0, vh2 = y[5] / v0;

        double er = 0.0, bphi = 0.0, bz = 0.0;
        double c = 1.0, s = 0.0;
        if (r > 1e-300) {
            c = y[0] / r_raw;
            s = y[1] / r_raw;
            er = -pot->phi.derivative(r);
            bphi = -(pot->a_z.derivative(r) + ext->a_z.derivative(r));
            bz = pot->a_phi.derivative(r) + pot->a_phi(r) / r + ext->a_phi.derivative(r);
            const double ae = ext->a_phi.value(r);
            if (ae != 0.0)
                bz += ae / r;
        } else {
            bz = 2.0 * (pot->a_phi.derivative(0.0) + ext->a_phi.derivative(0.0));
        }
        // Cartesian components of E = er e_r and B = bphi e_phi + bz e_3
        const double Ex = er * c, Ey = er * s;
        const double Bx = -bphi * s, By = bphi * c, Bz = bz;
        Vec6 dy;
        dy[0] = vh0;
        dy[1] = vh1;
        dy[2] = vh2;
        dy[3] = q * (Ex + vh1 * Bz - vh2 * By);
        dy[4] = q * (Ey + vh2 * Bx - vh0 * Bz);
        dy[5] = q * (vh0 * By - vh1 * Bx);
        return dy;
    }
};

struct DenseStep {
    Vec6 r1, r2, r3, r4, r5;
    double t0, h;

    Vec6 eval(double t) const
    {
        const double th = (t - t0) / h, th1 = 1.0 - th;
        Vec6 y;
        for (int i = 0; i < 6; ++i)
            y[std::size_t(i)] =
                r1[std::size_t(i)] +
                th * (r2[std::size_t(i)] +
                      th1 * (r3[std::size_t(i)] +
                             th * (r4[std::size_t(i)] + th1 * r5[std::size_t(i)])));
        return y;
    }
};

// Dormand-Prince 5(4) step with the standard dense output.
struct Stepper {
    const ForceField* f;

    Vec6 k1, k2, k3, k4, k5, k6, k7;

    // returns the error estimate scaled to unit tolerance
    double step(const Vec6& y, double h, const Vec6& k1_in, Vec6& y_out, DenseStep& dense,
                double rel_tol, double abs_tol)
    {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                                a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                                a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        static constexpr double d1 = -12715105075.0 / 11282082432.0,
                                d3 = 87487479700.0 / 32700410799.0,
                                d4 = -10690763975.0 / 1880347072.0,
                                d5 = 701980252875.0 / 199316789632.0,
                                d6 = -1453857185.0 / 822651844.0,
                                d7 = 69997945.0 / 29380423.0;
        k1 = k1_in;
        Vec6 tmp;
        auto mix = [&](auto&&... terms) {
            for (int i = 0; i < 6; ++i) {
                double acc = 0.0;
                ((acc += terms.first * terms.second[std::size_t(i)]), ...);
                tmp[std::size_t(i)] = y[std::size_t(i)] + h * acc;
            }
        };
        mix(std::pair{a21, k1});
        k2 = f->rhs(tmp);
        mix(std::pair{a31, k1}, std::pair{a32, k2});
        k3 = f->rhs(tmp);
        mix(std::pair{a41, k1}, std::pair{a42, k2}, std::pair{a43, k3});
        k4 = f->rhs(tmp);
        mix(std::pair{a51, k1}, std::pair{a52, k2}, std::pair{a53, k3}, std::pair{a54, k4});
        k5 = f->rhs(tmp);
        mix(std::pair{a61, k1}, std::pair{a62, k2}, std::pair{a63, k3}, std::pair{a64, k4},
            std::pair{a65, k5});
        k6 = f->rhs(tmp);
        for (int i = 0; i < 6; ++i)
            y_out[std::size_t(i)] =
                y[std::size_t(i)] + h * (b1 * k1[std::size_t(i)] + b3 * k3[std::size_t(i)] +
                                         b4 * k4[std::size_t(i)] + b5 * k5[std::size_t(i)] +
                                         b6 * k6[std::size_t(i)]);
        k7 = f->rhs(y_out);

        double err = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double e = h * (e1 * k1[std::size_t(i)] + e3 * k3[std::size_t(i)] +
                                  e4 * k4[std::size_t(i)] + e5 * k5[std::size_t(i)] +
                                  e6 * k6[std::size_t(i)] + e7 * k7[std::size_t(i)]);
            const double sc =
                abs_tol + rel_tol * std::max(std::abs(y[std::size_t(i)]),
                                             std::abs(y_out[std::size_t(i)]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / 6.0);

        for (int i = 0; i < 6; ++i) {
            const std::size_t s = std::size_t(i);
            const double ydiff = y_out[s] - y[s];
            const double bspl = h * k1[s] - ydiff;
            dense.r1[s] = y[s];
            dense.r2[s] = ydiff;
            dense.r3[s] = bspl;
            dense.r4[s] = ydiff - h * k7[s] - bspl;
            dense.r5[s] = h * (d1 * k1[s] + d3 * k3[s] + d4 * k4[s] + d5 * k5[s] +
                               d6 * k6[s] + d7 * k7[s]);
        }
        return err;
    }
};

double radius_of(const Vec6& y)
{
    return std::hypot(y[0], y[1]);
}

PhaseState to_state(const Vec6& y)
{
    PhaseState s;
    s.x = {y[0], y[1], y[2]};
    s.v = {y[3], y[4], y[5]};
    return s;
}

} // namespace

Trajectory integrate_characteristic(const Species& sp, const PhaseState& start,
                                    const PotentialState& force_state,
                                    const ExternalPotential& ext, double horizon,
                                    const OdeOptions& opt)
{
    const double R0 = force_state.r_max();
    if (start.radius() > R0 * (1.0 + 1e-12))
        throw std::domain_error("integrate_characteristic: start outside the cylinder");

    ForceField field{&sp, &force_state, &ext, R0};
    Stepper stepper{&field};

    Vec6 y{start.x[0], start.x[1], start.x[2], start.v[0], start.v[1], start.v[2]};
    double t = 0.0;
    double h = horizon * 1e-4;
    const double h_min = horizon * 1e-14;

    Trajectory traj;
    traj.samples.push_back({0.0, start});

    Vec6 k1 = field.rhs(y);
    std::size_t steps = 0;
    while (t < horizon) {
        if (++steps > opt.max_steps)
            throw IntegrationError("integrate_characteristic: step limit exceeded", t,
                                   to_state(y));
        h = std::min(h, horizon - t);
        Vec6 y_new;
        DenseStep dense;
        const double err = stepper.step(y, h, k1, y_new, dense, opt.rel_tol, opt.abs_tol);
        if (!(err <= 1.0)) {
            const double shrink =
                std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
            h *= shrink;
            if (h < h_min)
                throw IntegrationError("integrate_characteristic: step size collapsed", t,
                                       to_state(y));
            continue;
        }
        dense.t0 = t;
        dense.h = h;

        // wall crossing inside the accepted step
        double t_hit = -1.0;
        {
            double t_lo = t, t_hi = -1.0;
            double probe_prev = t;
            for (double frac : {0.25, 0.5, 0.75, 1.0}) {
                const double tp = t + frac * h;
                const Vec6 yp = (frac == 1.0) ? y_new : dense.eval(tp);
                if (radius_of(yp) > R0) {
                    t_lo = probe_prev;
                    t_hi = tp;
                    break;
                }
                probe_prev = tp;
            }
            if (t_hi > 0.0) {
                for (int it = 0; it < 200 && (t_hi - t_lo) > opt.event_tol * R0; ++it) {
                    const double tm = 0.5 * (t_lo + t_hi);
                    if (radius_of(dense.eval(tm)) > R0)
                        t_hi = tm;
                    else
                        t_lo = tm;
                }
                t_hit = t_lo;
            }
        }

        if (t_hit >= 0.0 && t_hit > t + h_min) {
            // redo the step with the exact hit length so the field stages
            // stay inside the wall, then reflect
            const double h_hit = t_hit - t;
            DenseStep d2;
            Vec6 y_wall;
            stepper.step(y, h_hit, k1, y_wall, d2, opt.rel_tol, opt.abs_tol);
            const double r = radius_of(y_wall);
            const double cx = y_wall[0] / r, sx = y_wall[1] / r;
            // put the event point exactly on the wall before reflecting
            if (r > R0) {
                y_wall[0] = R0 * cx;
                y_wall[1] = R0 * sx;
            }
            const double vr = y_wall[3] * cx + y_wall[4] * sx;
            if (vr > 0.0) {
                y_wall[3] -= 2.0 * vr * cx;
                y_wall[4] -= 2.0 * vr * sx;
            }
            t = t_hit;
            y = y_wall;
            traj.reflection_times.push_back(t);
            traj.samples.push_back({t, to_state(y)});
            k1 = field.rhs(y);
            continue;
        }

        t += h;
        y = y_new;
        k1 = stepper.k7; // first-same-as-last
        traj.samples.push_back({t, to_state(y)});
        const double grow = 0.9 * std::pow(std::max(err, 1e-12), -0.2);
        h *= std::clamp(grow, 0.2, 5.0);
    }
    traj.completed = true;
    return traj;
}

namespace {

PotentialState perturb_phi(const PotentialState& state, double eps)
{
    if (eps == 0.0)
        return state;
    std::vector<double> v = state.phi.values();
    for (double& x : v)
        x *= (1.0 + eps);
    PotentialState out = state;
    out.phi = RadialProfile(state.grid(), std::move(v));
    return out;
}

} // namespace

AuditReport audit_stationarity(std::span<const Species> species, const PotentialState& state,
                               const ExternalPotential& ext, const AuditPlan& plan)
{
    if (species.empty())
        throw std::invalid_argument("audit_stationarity: species list is empty");
    const double R0 = state.r_max();
    AuditReport report;
    report.seed = plan.seed;
    report.grid_n = state.grid().size();
    report.drift_tol = plan.drift_tol;

    const PotentialState force_state = perturb_phi(state, plan.phi_perturbation);

    // momentum support estimate per species from the realized potential
    double phi_max = 0.0;
    for (double v : state.phi.values())
        phi_max = std::max(phi_max, std::abs(v));
    std::vector<double> vmax(species.size(), 0.0);
    for (std::size_t a = 0; a < species.size(); ++a) {
        const Species& sp = species[a];
        const double top =
            sp.ansatz.support_energy_max() + std::abs(sp.charge) * phi_max;
        vmax[a] = (top > sp.mass) ? std::sqrt(top * top - sp.mass * sp.mass) : 0.0;
    }

    // sample starting states: stratified radii, momentum drawn inside the
    // support ball, accepted where f is clearly positive
    std::mt19937_64 rng(plan.seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    struct Start {
        PhaseState st;
        int species_index;
        double f0;
    };
    std::vector<Start> starts;

    // probe a reference scale for f
    std::vector<double> f_ref(species.size(), 0.0);
    for (std::size_t a = 0; a < species.size(); ++a) {
        const Species& sp = species[a];
        if (vmax[a] <= 0.0)
            continue;
        for (int probe = 0; probe < 800; ++probe) {
            PhaseState st;
            const double r = 0.98 * R0 * u01(rng);
            st.x = {r, 0.0, 0.0};
            const double u = vmax[a] * std::sqrt(u01(rng));
            const double thv = 2.0 * M_PI * u01(rng);
            st.v = {u * std::cos(thv), u * std::sin(thv), vmax[a] * (2.0 * u01(rng) - 1.0)};
            f_ref[a] = std::max(f_ref[a], eval_f(sp, state, ext, st));
        }
    }

    int strata = std::max(1, plan.samples);
    int made = 0, guard = 0;
    while (made < plan.samples && guard < 200000) {
        ++guard;
        const std::size_t a = std::size_t(made) % species.size();
        const Species& sp = species[a];
        if (vmax[a] <= 0.0 || f_ref[a] <= 0.0) {
            ++made; // species carries no particles; skip its slots
            continue;
        }
        PhaseState st;
        double r;
        const bool near_wall = plan.near_wall_radius > 0.0 &&
                               u01(rng) < plan.near_wall_fraction;
        if (near_wall)
            r = plan.near_wall_radius * (0.85 + 0.14 * u01(rng));
        else
            r = 0.97 * R0 * (double(made % strata) + u01(rng)) / double(strata);
        const double ang = 2.0 * M_PI * u01(rng);
        st.x = {r * std::cos(ang), r * std::sin(ang), 0.0};
        const double u = vmax[a] * std::sqrt(u01(rng));
        const double thv = 2.0 * M_PI * u01(rng);
        st.v = {u * std::cos(thv), u * std::sin(thv), vmax[a] * (2.0 * u01(rng) - 1.0)};
        const double f0 = eval_f(sp, state, ext, st);
        if (f0 < 1e-3 * f_ref[a])
            continue;
        starts.push_back({st, int(a), f0});
        ++made;
    }

    report.trajectories.assign(starts.size(), {});
    parallel_for(starts.size(), plan.threads, [&](std::size_t idx) {
        const Start& s = starts[idx];
        const Species& sp = species[std::size_t(s.species_index)];
        const Trajectory traj = integrate_characteristic(sp, s.st, force_state, ext,
                                                         plan.horizon, plan.ode);
        const Invariants inv0 = invariants(sp, state, ext, s.st);
        TrajectoryAudit audit;
        audit.start = s.st;
        audit.species_index = s.species_index;
        audit.reflections = int(traj.reflection_times.size());
        for (const TrajectorySample& sample : traj.samples) {
            const Invariants inv = invariants(sp, state, ext, sample.state);
            const double f = sp.ansatz.value(inv.energy, inv.p_phi, inv.p_z);
            audit.drift_energy =
                std::max(audit.drift_energy,
                         std::abs(inv.energy - inv0.energy) / (1.0 + std::abs(inv0.energy)));
            audit.drift_p_phi =
                std::max(audit.drift_p_phi,
                         std::abs(inv.p_phi - inv0.p_phi) / (1.0 + std::abs(inv0.p_phi)));
            audit.drift_p_z = std::max(audit.drift_p_z, std::abs(inv.p_z - inv0.p_z) /
                                                            (1.0 + std::abs(inv0.p_z)));
            audit.drift_f = std::max(audit.drift_f,
                                     std::abs(f - s.f0) / (1.0 + std::abs(s.f0)));
        }
        report.trajectories[idx] = audit;
    });

    for (const TrajectoryAudit& a : report.trajectories) {
        report.max_drift_energy = std::max(report.max_drift_energy, a.drift_energy);
        report.max_drift_p_phi = std::max(report.max_drift_p_phi, a.drift_p_phi);
        report.max_drift_p_z = std::max(report.max_drift_p_z, a.drift_p_z);
        report.max_drift_f = std::max(report.max_drift_f, a.drift_f);
    }
    report.max_drift = std::max({report.max_drift_energy, report.max_drift_p_phi,
                                 report.max_drift_p_z, report.max_drift_f});
    report.pass = report.max_drift <= plan.drift_tol;
    return report;
}

} // namespace vmcyl

#include "vmcyl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "vmcyl/quadrature.hpp"

namespace vmcyl {

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn)
{
    int workers = threads;
    if (workers <= 0)
        workers = int(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min<int>(workers, 16);
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    std::exception_ptr error;
    std::mutex err_mtx;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = std::size_t(w); i < n; i += std::size_t(workers))
                    fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!error)
                    error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

GridSources sources_on_grid(const PotentialState& state, std::span<const Species> species,
                            const ExternalPotential& ext, const QuadratureSpec& quad,
                            int threads)
{
    quad.validate();
    const std::vector<double>& grid = state.grid();
    const std::size_t n = grid.size();
    GridSources out;
    out.rho.assign(n, 0.0);
    out.j_phi.assign(n, 0.0);
    out.j_z.assign(n, 0.0);
    const std::vector<double>& phi = state.phi.values();
    const std::vector<double>& aphi = state.a_phi.values();
    const std::vector<double>& az = state.a_z.values();
    parallel_for(n, threads, [&](std::size_t i) {
        const double r = grid[i];
        SourcePoint p{r, phi[i], aphi[i] + ext.a_phi.value(r), az[i] + ext.a_z.value(r)};
        const SourceTriple t = scaled_sources(species, p, quad);
        out.rho[i] = t.rho;
        out.j_phi[i] = t.j_phi;
        out.j_z[i] = t.j_z;
    });
    return out;
}

PotentialState induced_potentials(const std::vector<double>& grid, const GridSources& src)
{
    RadialTransform tr(grid);
    std::vector<double> phi = tr.log_kernel(src.rho);
    std::vector<double> aphi = tr.disc_kernel(src.j_phi);
    std::vector<double> az = tr.log_kernel(src.j_z);
    for (auto* v : {&phi, &aphi, &az})
        for (double& x : *v)
            x = -x;
    PotentialState out;
    out.phi = RadialProfile(grid, std::move(phi));
    out.a_phi = RadialProfile(grid, std::move(aphi));
    out.a_z = RadialProfile(grid, std::move(az));
    return out;
}

PotentialState induced_potentials(const PotentialState& state, std::span<const Species> species,
                                  const ExternalPotential& ext, const QuadratureSpec& quad,
                                  int threads)
{
    return induced_potentials(state.grid(), sources_on_grid(state, species, ext, quad, threads));
}

namespace {

double iterate_excess(const PotentialState& p, const EnvelopeBounds& env, int k)
{
    const std::vector<double>& grid = p.grid();
    double worst = -1e300;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double xi = env.phi_bound_partial(grid[i], k);
        const double zeta = env.a_phi_bound_partial(grid[i], k);
        worst = std::max(worst, std::abs(p.phi.values()[i]) - xi);
        worst = std::max(worst, std::abs(p.a_z.values()[i]) - xi);
        worst = std::max(worst, std::abs(p.a_phi.values()[i]) - zeta);
    }
    return worst;
}

} // namespace

SolveResult picard_solve(const std::vector<double>& grid, std::span<const Species> species,
                         const ExternalPotential& ext, const QuadratureSpec& quad,
                         const SolveOptions& opt)
{
    if (species.empty())
        throw std::invalid_argument("picard_solve: species list is empty");
    if (!(opt.tol_fix > 0.0) || opt.max_iter < 1)
        throw std::invalid_argument("picard_solve: bad tolerances");
    if (!(opt.relax > 0.0 && opt.relax <= 1.0))
        throw std::invalid_argument("picard_solve: relaxation factor must be in (0, 1]");
    quad.validate();

    SolveResult res;
    const auto [c1, c2] = source_bound_constants(species, quad);
    res.c1 = c1;
    res.c2 = c2;
    const EnvelopeBounds env(c1, c2);

    PotentialState p = PotentialState::zeros(grid);
    res.log.envelope_excess.push_back(iterate_excess(p, env, 0));
    if (opt.keep_iterates)
        res.log.iterates.push_back(p);

    for (int it = 1; it <= opt.max_iter; ++it) {
        PotentialState next = induced_potentials(p, species, ext, quad, opt.threads);
        if (opt.relax != 1.0) {
            auto blend = [&](const RadialProfile& a, const RadialProfile& b) {
                std::vector<double> v(a.size());
                for (std::size_t i = 0; i < v.size(); ++i)
                    v[i] = (1.0 - opt.relax) * a.values()[i] + opt.relax * b.values()[i];
                return RadialProfile(grid, std::move(v));
            };
            next.phi = blend(p.phi, next.phi);
            next.a_phi = blend(p.a_phi, next.a_phi);
            next.a_z = blend(p.a_z, next.a_z);
        }
        const double delta = sup_distance(next, p);
        res.log.deltas.push_back(delta);
        res.log.envelope_excess.push_back(iterate_excess(next, env, it));
        if (opt.keep_iterates)
            res.log.iterates.push_back(next);
        p = std::move(next);
        if (delta <= opt.tol_fix) {
            res.state = std::move(p);
            res.iterations = it;
            return res;
        }
    }
    const std::string msg = "picard_solve: no convergence within " +
                            std::to_string(opt.max_iter) + " iterations (last delta " +
                            std::to_string(res.log.deltas.back()) + ")";
    throw IterationLimitError(msg, std::move(res.log));
}

namespace {

void check_one(const PotentialState& p, const EnvelopeBounds& env, int k, bool partial,
               double slack, EnvelopeVerdict& verdict)
{
    const std::vector<double>& grid = p.grid();
    auto record = [&](std::size_t node, char comp, double value, double bound) {
        const double excess = std::abs(value) - bound;
        verdict.worst_excess = std::max(verdict.worst_excess, excess);
        if (excess > slack) {
            verdict.pass = false;
            if (verdict.violations.size() < 100)
                verdict.violations.push_back({k, node, comp, value, bound});
        }
    };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        const double xi = partial ? env.phi_bound_partial(r, k) : env.phi_bound(r);
        const double zeta = partial ? env.a_phi_bound_partial(r, k) : env.a_phi_bound(r);
        record(i, 'p', p.phi.values()[i], xi);
        record(i, 'z', p.a_z.values()[i], xi);
        record(i, 'a', p.a_phi.values()[i], zeta);
    }
}

} // namespace

EnvelopeVerdict check_envelopes(std::span<const PotentialState> iterates,
                                const EnvelopeBounds& bounds, double slack)
{
    EnvelopeVerdict verdict;
    verdict.worst_excess = -1e300;
    for (std::size_t k = 0; k < iterates.size(); ++k)
        check_one(iterates[k], bounds, int(k), true, slack, verdict);
    return verdict;
}

EnvelopeVerdict check_state_envelopes(const PotentialState& state, const EnvelopeBounds& bounds,
                                      double slack)
{
    EnvelopeVerdict verdict;
    verdict.worst_excess = -1e300;
    check_one(state, bounds, 0, false, slack, verdict);
    return verdict;
}

} // namespace vmcyl

#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmcyl/bounds.hpp"
#include "vmcyl/densities.hpp"
#include "vmcyl/model.hpp"
#include "vmcyl/radial.hpp"

namespace vmcyl {

// Run fn(i) for i in [0, n); deterministic result for any worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Source kernels at the grid nodes (4*pi-scaled, summed over species).
struct GridSources {
    std::vector<double> rho, j_phi, j_z;
};

GridSources sources_on_grid(const PotentialState& state, std::span<const Species> species,
                            const ExternalPotential& ext, const QuadratureSpec& quad,
                            int threads = 1);

// The integral map sending sources to the potentials they generate; value and
// one-sided derivative vanish at the axis.
PotentialState induced_potentials(const std::vector<double>& grid, const GridSources& src);

// One application of the fixed-point operator.
PotentialState induced_potentials(const PotentialState& state, std::span<const Species> species,
                                  const ExternalPotential& ext, const QuadratureSpec& quad,
                                  int threads = 1);

struct SolveOptions {
    double tol_fix = 1e-10; // sup-norm stopping tolerance
    int max_iter = 200;
    double relax = 1.0; // under-relaxation factor; 1 = plain iteration
    int threads = 1;
    bool keep_iterates = true;
};

struct IterationLog {
    std::vector<double> deltas;           // sup-norm update sizes
    std::vector<double> envelope_excess;  // per iterate, vs partial-sum bounds
    std::vector<PotentialState> iterates; // P^0 ... P^K when kept
};

struct SolveResult {
    PotentialState state;
    IterationLog log;
    double c1 = 0.0, c2 = 0.0; // source bound constants of the configuration
    int iterations = 0;
};

struct IterationLimitError : std::runtime_error {
    IterationLog log;
    IterationLimitError(const std::string& msg, IterationLog l)
        : std::runtime_error(msg), log(std::move(l))
    {
    }
};

SolveResult picard_solve(const std::vector<double>& grid, std::span<const Species> species,
                         const ExternalPotential& ext, const QuadratureSpec& quad,
                         const SolveOptions& opt = {});

struct EnvelopeViolation {
    int iterate;
    std::size_t node;
    char component; // 'p' = phi, 'a' = A_phi, 'z' = A_3
    double value, bound;
};

struct EnvelopeVerdict {
    bool pass = true;
    double worst_excess = 0.0; // max over nodes of |value| - bound
    std::vector<EnvelopeViolation> violations;
};

// Per-iterate check against the partial-sum envelopes (iterate k against the
// k-term sums); index 0 is the zero starting iterate.
EnvelopeVerdict check_envelopes(std::span<const PotentialState> iterates,
                                const EnvelopeBounds& bounds, double slack = 1e-12);

// Converged-state check against the full envelopes.
EnvelopeVerdict check_state_envelopes(const PotentialState& state, const EnvelopeBounds& bounds,
                                      double slack = 1e-12);

} // namespace vmcyl

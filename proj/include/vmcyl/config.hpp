#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmcyl/confinement.hpp"
#include "vmcyl/densities.hpp"
#include "vmcyl/model.hpp"
#include "vmcyl/solver.hpp"
#include "vmcyl/verify.hpp"

namespace vmcyl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepConfig {
    int count = 21;
    double max_scale = 2.0;
};

struct ExtendConfig {
    double factor = 3.0; // tails are reported out to factor * R0
    double density_floor = 1e-12;
};

// A full run description: geometry, species, external potential, quadrature
// orders, tolerances, and the per-mode options.
struct RunConfig {
    double R0 = 1.0;
    double R = 0.7;
    std::size_t grid_n = 257;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = "out";

    std::vector<Species> species;
    ExternalPotential ext;
    QuadratureSpec quad;
    SolveOptions solve;

    std::optional<PinchMode> confine_mode;
    bool confine_with_solve = false;

    AuditPlan verify;
    bool verify_near_wall = false;

    SweepConfig sweep;
    ExtendConfig extend;

    void validate() const; // throws ConfigError

    // Stable key = value serialization; parsing it back reproduces the run.
    std::string canonical_text() const;

    static RunConfig parse_text(const std::string& text,
                                const std::string& origin = "<config>");
    static RunConfig parse_file(const std::string& path);
};

std::string sha256_hex(const std::string& data);

} // namespace vmcyl

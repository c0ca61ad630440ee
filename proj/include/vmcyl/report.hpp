#pragma once

#include <string>

#include "vmcyl/bounds.hpp"
#include "vmcyl/fields.hpp"

namespace vmcyl {

// Shortest exact decimal form used in all text outputs.
std::string format_g17(double v);

// Profiles CSV with the fixed header
//   r, phi, Aphi, A3, rho, jphi, j3, Er, Bphi, B3, xi, zeta
// preceded by a '# config_hash=...' provenance comment line.
void write_profiles_csv(const std::string& path, const PotentialState& state,
                        const FieldProfiles& fields, const EnvelopeBounds& env,
                        const std::string& config_hash);

} // namespace vmcyl

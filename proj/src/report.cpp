#include "vmcyl/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace vmcyl {

std::string format_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_profiles_csv(const std::string& path, const PotentialState& state,
                        const FieldProfiles& fields, const EnvelopeBounds& env,
                        const std::string& config_hash)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "# config_hash=" << config_hash << "\n";
    out << "r,phi,Aphi,A3,rho,jphi,j3,Er,Bphi,B3,xi,zeta\n";
    const std::vector<double>& grid = state.grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double r = grid[i];
        out << format_g17(r) << ',' << format_g17(state.phi.values()[i]) << ','
            << format_g17(state.a_phi.values()[i]) << ','
            << format_g17(state.a_z.values()[i]) << ','
            << format_g17(fields.rho.values()[i]) << ','
            << format_g17(fields.j_phi.values()[i]) << ','
            << format_g17(fields.j_z.values()[i]) << ','
            << format_g17(fields.e_r.values()[i]) << ','
            << format_g17(fields.b_phi.values()[i]) << ','
            << format_g17(fields.b_z.values()[i]) << ','
            << format_g17(env.phi_bound(r)) << ',' << format_g17(env.a_phi_bound(r))
            << "\n";
    }
}

} // namespace vmcyl

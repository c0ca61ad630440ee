#pragma once

#include <cstddef>
#include <vector>

namespace vmcyl {

// Uniform nodes r_0 = 0 < r_1 < ... < r_{n-1} = R0.
std::vector<double> uniform_grid(double R0, std::size_t n);

// Monotone (Fritsch-Carlson) Hermite slopes; C1, shape preserving.
std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y);

// Slope at each node of the local cubic through up to 4 neighboring nodes.
// Higher order than pchip, not shape preserving; used for integration.
std::vector<double> cubic_fit_slopes(const std::vector<double>& x,
                                     const std::vector<double>& y);

// Scalar function of r sampled on a strictly increasing grid, evaluated
// between nodes with the C1 monotone cubic rule.
class RadialProfile {
public:
    RadialProfile() = default;
    RadialProfile(std::vector<double> grid, std::vector<double> values);

    static RadialProfile zeros(const std::vector<double>& grid);

    double operator()(double r) const;
    double derivative(double r) const;

    bool empty() const { return grid_.empty(); }
    std::size_t size() const { return grid_.size(); }
    double r_max() const { return grid_.empty() ? 0.0 : grid_.back(); }

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& slopes() const { return slopes_; }

private:
    std::size_t locate(double r) const;

    std::vector<double> grid_, values_, slopes_;
    double h_ = 0.0; // uniform spacing, 0 when the grid is nonuniform
};

double sup_norm(const std::vector<double>& v);
double sup_diff(const std::vector<double>& a, const std::vector<double>& b);

// The triple of internal potentials (phi, A_phi, A_3) on a shared grid;
// the unknown of the fixed-point problem.
struct PotentialState {
    RadialProfile phi, a_phi, a_z;

    static PotentialState zeros(const std::vector<double>& grid);
    const std::vector<double>& grid() const { return phi.grid(); }
    double r_max() const { return phi.r_max(); }
};

// max over components and nodes of |p - q|
double sup_distance(const PotentialState& p, const PotentialState& q);

} // namespace vmcyl

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace vmcyl {

// Gauss-Legendre rule on [-1, 1]; cached per order.
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_legendre(int n);

// Composite Gauss-Legendre integration over [a, b].
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int panels, int nodes);

// Exact integrals over one panel [r, r+h] of tau^p * {1, s, s^2, s ln s},
// where s = r + h*tau and tau runs over [0, 1]; p = 0..4. These are the
// building blocks of product integration against the logarithmic kernel.
struct PanelMoments {
    double one[5];  // ∫ tau^p ds
    double s[5];    // ∫ tau^p s ds
    double s2[5];   // ∫ tau^p s^2 ds
    double slog[5]; // ∫ tau^p s ln s ds
};
PanelMoments panel_moments(double r_left, double h);

// Product-integration transforms on a fixed radial grid. Node samples g_i
// are interpolated panel-wise by a cubic Hermite (slopes from a local cubic
// fit) and the kernel integrals are taken exactly on each panel.
class RadialTransform {
public:
    explicit RadialTransform(std::vector<double> grid);

    // J_i = ∫_0^{r_i} (ln r_i - ln s) s g(s) ds       (J_0 = 0)
    std::vector<double> log_kernel(const std::vector<double>& g) const;

    // W_i = (1/(2 r_i)) ∫_0^{r_i} (r_i^2 - s^2) g(s) ds   (W_0 = 0)
    std::vector<double> disc_kernel(const std::vector<double>& g) const;

    struct Cumulative {
        std::vector<double> m0;   // ∫_0^{r_i} g ds
        std::vector<double> m1;   // ∫_0^{r_i} s g ds
        std::vector<double> m2;   // ∫_0^{r_i} s^2 g ds
        std::vector<double> mlog; // ∫_0^{r_i} s ln s g ds
    };
    Cumulative cumulative(const std::vector<double>& g) const;

    // ∫_0^R s^p g ds for p in {0, 1}, R inside the grid.
    double moment_to(const std::vector<double>& g, int p, double R) const;

    const std::vector<double>& grid() const { return grid_; }

private:
    std::vector<double> grid_;
    std::vector<PanelMoments> panels_;
};

} // namespace vmcyl

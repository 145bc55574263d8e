#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include "asymspec/eig.hpp"

namespace asymspec::rmt {

struct DensityParams {
    double q = 1.0;  // aspect ratio T/N
    double h = 1.0;  // erfc edge steepness
    std::optional<double> fit_residual;  // rms over bins, set by fit_density
    bool q_fixed = true;
    // Fit diagnostics (meaningful only on fit_density results).
    bool h_at_bound = false;
    bool q_at_bound = false;
    bool poor_fit = false;
    double integral_deviation = 0.0;  // integral of the fitted density minus 1
};

struct RadialHistogram {
    std::vector<double> bin_edges;   // bins+1 increasing edges, first is 0
    std::vector<double> densities;   // normalized: sum of density*width = 1
    std::size_t total_count = 0;     // moduli binned (after exclusion)
    std::size_t excluded_count = 0;  // moduli dropped above the exclusion threshold
};

enum class QMode { fixed, free };

// Support edge q^{-1/2} of the bulk density.
double support_radius(double q);

// Bulk density of the complex spectrum: q^2 / (pi*sqrt((1-q)^2 + 4q^2|lam|^2)),
// exactly 0 for |lam| > q^{-1/2}.
double density_complex(std::complex<double> lam, double q);

// Radial density 2*pi*x*density_complex; integrates to 1 on [0, q^{-1/2}]
// for q >= 1 (to q for q < 1, the remaining mass sitting in exact zeros).
double density_radial(double x, double q);

// Closed-form integral of density_radial from 0 to x:
// ((1-q)^2 + 4q^2 x^2)^{1/2}/2 - |1-q|/2, saturating at the support edge.
double radial_cdf(double x, double q);

// Soft-edge density: (1/2) * radial formula * erfc(h*(x - q^{-1/2})).
// The radial factor is evaluated from its formula for all x >= 0; the erfc
// supplies the cutoff. Does not integrate exactly to 1.
double density_effective(double x, const DensityParams& p);

// Integral of density_effective over [0, inf) by adaptive quadrature.
double model_integral(const DensityParams& p);

// ceil(sqrt(n)) clamped to [5, 100].
std::size_t default_bin_count(std::size_t total_count);

// Outlier threshold 3 * q_nominal^{-1/2}.
double default_exclusion(double q_nominal);

// Equal-width histogram of moduli on [0, max kept modulus], normalized to
// unit integral. Moduli above `exclude` are dropped and counted. Requires
// bins >= 2 and at least 10 moduli after exclusion.
RadialHistogram radial_histogram(const std::vector<double>& moduli, std::size_t bins,
                                 std::optional<double> exclude = std::nullopt);
RadialHistogram radial_histogram(const eig::ComplexSpectrum& s, std::size_t bins,
                                 std::optional<double> exclude = std::nullopt);
RadialHistogram radial_histogram(const std::vector<eig::ComplexSpectrum>& pooled,
                                 std::size_t bins,
                                 std::optional<double> exclude = std::nullopt);

// Least-squares fit of density_effective to bin centers/heights (unweighted,
// zero-count bins included). QMode::fixed fits h only at q = q_nominal;
// QMode::free fits (h, q) jointly by a global scan plus golden-section
// refinement (q_nominal is ignored). Bounds h in [1, 1e4], q in [0.1, 1e3];
// hitting a bound sets the at-bound flag rather than failing.
DensityParams fit_density(const RadialHistogram& hist, QMode mode, double q_nominal = 0.0);

}  // namespace asymspec::rmt

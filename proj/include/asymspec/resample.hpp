#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "asymspec/eig.hpp"
#include "asymspec/ingest.hpp"

namespace asymspec::resample {

struct BootstrapSpec {
    std::size_t iterations = 1;
    std::size_t subset_size = 2;
    std::uint64_t rng_seed = 0;
};

struct EnsembleResult {
    eig::ComplexSpectrum pooled;  // all iterations, canonically sorted
    std::vector<cplx> per_iteration_maxeig;
    BootstrapSpec spec;
};

enum class Space { returns, principal_components };

struct WindowRow {
    std::size_t start = 0;
    long tau = 0;
    cplx lambda_max;
};

struct WindowSummary {
    long tau = 0;
    double mean_abs = 0.0;  // mean of |lambda_max| over windows
    double sd_abs = 0.0;    // sample standard deviation over windows
};

struct SlidingResult {
    std::vector<WindowRow> rows;  // outer loop over starts, inner over taus
    std::vector<WindowSummary> summary;
};

// For each iteration, draws an independent uniform subset (without
// replacement) from each system, builds the subset's k(tau) — or k^(e)(tau)
// after per-subset PCA when space is principal_components — and pools the
// spectra. Deterministic given rng_seed: iteration i uses the derived stream
// (rng_seed, i), drawing system 1's subset first. Subset correlation entries
// reuse the full-panel matrices, which they equal exactly.
EnsembleResult bootstrap_spectra(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                                 long tau, const BootstrapSpec& spec, Space space);

// lambda_MAX of k(tau) over column windows [start, start + window_T), each
// window re-standardized, plus per-tau mean and sample standard deviation
// of the moduli.
SlidingResult sliding_windows(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                              const std::vector<long>& tau_set, std::size_t window_T,
                              const std::vector<std::size_t>& starts);

// Applies one uniform random column permutation to every row of r1 and an
// independent one to every row of r2, preserving each panel's equal-time
// correlation structure exactly while destroying cross-panel and serial
// structure.
std::pair<ingest::ReturnPanel, ingest::ReturnPanel> reshuffle_panels(
    const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2, std::uint64_t seed);

// Two independent standard-Gaussian N x T panels, standardized.
std::pair<ingest::ReturnPanel, ingest::ReturnPanel> generate_null(std::size_t n, std::size_t t,
                                                                  std::uint64_t seed);

// Two panels sharing one global factor F: system 1 rows load on F(t) with
// g_within; system 2 rows load with g_cross on the same factor arriving both
// instantly and `lag` steps later, (F(t) + F(t-lag))/sqrt(2), so the coupling
// shows up at tau = 0 and peaks at tau = lag (negative lag flips direction;
// lag 0 injects F(t) alone). Cross-correlations need g_within > 0. Panels
// standardized.
std::pair<ingest::ReturnPanel, ingest::ReturnPanel> generate_factor_model(
    std::size_t n, std::size_t t, double g_within, double g_cross, long lag,
    std::uint64_t seed);

// Two independent panels whose every series is AR(1) with coefficient phi
// and unit marginal variance, standardized. Serially correlated null for
// effective-sample-size experiments.
std::pair<ingest::ReturnPanel, ingest::ReturnPanel> generate_ar1_null(std::size_t n,
                                                                      std::size_t t,
                                                                      double phi,
                                                                      std::uint64_t seed);

}  // namespace asymspec::resample

#include "asymspec/resample.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "asymspec/corrmat.hpp"
#include "asymspec/matrix.hpp"
#include "asymspec/parallel.hpp"
#include "asymspec/rng.hpp"

namespace asymspec::resample {

namespace {

void require_standardized_pair(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                               const char* op) {
    if (!r1.standardized || !r2.standardized) {
        std::ostringstream msg;
        msg << op << ": panels must be standardized";
        throw std::invalid_argument(msg.str());
    }
}

void require_same_t(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                    const char* op) {
    if (r1.t() != r2.t()) {
        std::ostringstream msg;
        msg << op << ": series lengths differ (" << r1.t() << " vs " << r2.t() << ")";
        throw std::invalid_argument(msg.str());
    }
}

// retention rule shared with pca::decompose
std::size_t kept_count(const std::vector<double>& eigenvalues) {
    const double threshold = 1e-10 * eigenvalues.front();
    std::size_t kept = 0;
    while (kept < eigenvalues.size() && eigenvalues[kept] >= threshold) ++kept;
    return kept;
}

// k^(e)(tau) for one iteration: diag(l1^-1/2) V1^T K_sub V2 diag(l2^-1/2)
// over the retained leading eigenpairs, algebraically equal to the lagged
// cross-correlation of the subset panels' principal components.
Matrix pc_cross_from_blocks(const Matrix& k_sub, const eig::SymEigen& e1,
                            const eig::SymEigen& e2) {
    const std::size_t kept =
        std::min(kept_count(e1.eigenvalues), kept_count(e2.eigenvalues));
    const std::size_t n = k_sub.rows();
    Matrix v1(n, kept), v2(n, kept);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < kept; ++j) {
            v1(i, j) = e1.vectors(i, j);
            v2(i, j) = e2.vectors(i, j);
        }
    Matrix b = matmul(v1.transposed(), matmul(k_sub, v2));
    for (std::size_t i = 0; i < kept; ++i) {
        const double si = 1.0 / std::sqrt(e1.eigenvalues[i]);
        for (std::size_t j = 0; j < kept; ++j)
            b(i, j) *= si / std::sqrt(e2.eigenvalues[j]);
    }
    return b;
}

ingest::ReturnPanel window_slice(const ingest::ReturnPanel& r, std::size_t start,
                                 std::size_t len) {
    ingest::ReturnPanel w;
    w.tickers = r.tickers;
    w.system_label = r.system_label;
    w.values = Matrix(r.n(), len);
    for (std::size_t i = 0; i < r.n(); ++i)
        for (std::size_t k = 0; k < len; ++k) w.values(i, k) = r.values(i, start + k);
    w.dates.reserve(len);
    for (std::size_t k = 0; k < len; ++k) w.dates.push_back(r.dates[start + k]);
    return ingest::standardize(std::move(w));
}

ingest::ReturnPanel permute_columns(const ingest::ReturnPanel& r,
                                    const std::vector<std::size_t>& perm) {
    ingest::ReturnPanel out = r;
    for (std::size_t i = 0; i < r.n(); ++i)
        for (std::size_t k = 0; k < r.t(); ++k) out.values(i, k) = r.values(i, perm[k]);
    return out;
}

ingest::ReturnPanel assemble_panel(Matrix values, const std::string& label) {
    ingest::ReturnPanel p;
    p.values = std::move(values);
    p.system_label = label;
    p.tickers.reserve(p.values.rows());
    for (std::size_t i = 0; i < p.values.rows(); ++i)
        p.tickers.push_back(label + "-" + std::to_string(i));
    p.dates.reserve(p.values.cols());
    for (std::size_t k = 0; k < p.values.cols(); ++k)
        p.dates.push_back("t" + std::to_string(k));
    return ingest::standardize(std::move(p));
}

void check_panel_dims(std::size_t n, std::size_t t, const char* op) {
    if (n < 2 || t < 2) {
        std::ostringstream msg;
        msg << op << ": need n >= 2 and t >= 2, got n = " << n << ", t = " << t;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

EnsembleResult bootstrap_spectra(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                                 long tau, const BootstrapSpec& spec, Space space) {
    require_standardized_pair(r1, r2, "bootstrap_spectra");
    require_same_t(r1, r2, "bootstrap_spectra");
    if (spec.iterations < 1)
        throw std::invalid_argument("bootstrap_spectra: iterations must be at least 1");
    if (spec.subset_size < 2 || spec.subset_size > r1.n() || spec.subset_size > r2.n()) {
        std::ostringstream msg;
        msg << "bootstrap_spectra: subset_size " << spec.subset_size
            << " outside [2, min(N1, N2) = " << std::min(r1.n(), r2.n()) << "]";
        throw std::invalid_argument(msg.str());
    }
    const auto abs_tau = static_cast<std::size_t>(tau < 0 ? -tau : tau);
    if (abs_tau + 2 > r1.t()) {
        std::ostringstream msg;
        msg << "bootstrap_spectra: |tau| = " << abs_tau << " leaves no window for T = "
            << r1.t();
        throw std::invalid_argument(msg.str());
    }

    // subset correlation entries are exactly the full-panel entries
    const Matrix k_full = corrmat::lagged_cross_matrix(r1.values, r2.values, tau);
    Matrix p1_full, p2_full;
    if (space == Space::principal_components) {
        p1_full = corrmat::pearson(r1).entries;
        p2_full = corrmat::pearson(r2).entries;
    }

    std::vector<std::vector<cplx>> per_iter(spec.iterations);
    parallel_for(spec.iterations, [&](std::size_t i) {
        Rng rng = Rng::stream(spec.rng_seed, i);
        const auto s1 = rng.sample_without_replacement(r1.n(), spec.subset_size);
        const auto s2 = rng.sample_without_replacement(r2.n(), spec.subset_size);
        Matrix target = k_full.select(s1, s2);
        if (space == Space::principal_components) {
            const auto e1 = eig::eig_symmetric(p1_full.select_square(s1));
            const auto e2 = eig::eig_symmetric(p2_full.select_square(s2));
            target = pc_cross_from_blocks(target, e1, e2);
        }
        per_iter[i] = eig::eig_general(std::move(target)).eigenvalues;
    });

    EnsembleResult out;
    out.spec = spec;
    out.per_iteration_maxeig.reserve(spec.iterations);
    for (const auto& values : per_iter) {
        out.per_iteration_maxeig.push_back(values.front());
        out.pooled.eigenvalues.insert(out.pooled.eigenvalues.end(), values.begin(),
                                      values.end());
    }
    std::sort(out.pooled.eigenvalues.begin(), out.pooled.eigenvalues.end(),
              eig::modulus_order);
    out.pooled.source_dims = eig::SourceDims{spec.subset_size, r1.t(), tau};
    return out;
}

SlidingResult sliding_windows(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                              const std::vector<long>& tau_set, std::size_t window_T,
                              const std::vector<std::size_t>& starts) {
    require_same_t(r1, r2, "sliding_windows");
    if (tau_set.empty())
        throw std::invalid_argument("sliding_windows: empty tau set");
    if (starts.empty())
        throw std::invalid_argument("sliding_windows: empty start list");
    if (window_T < 2)
        throw std::invalid_argument("sliding_windows: window must cover at least 2 steps");
    for (std::size_t s : starts)
        if (s + window_T > r1.t()) {
            std::ostringstream msg;
            msg << "sliding_windows: window [" << s << ", " << s + window_T
                << ") out of range for T = " << r1.t();
            throw std::invalid_argument(msg.str());
        }

    SlidingResult out;
    out.rows.reserve(starts.size() * tau_set.size());
    for (std::size_t s : starts) {
        const auto w1 = window_slice(r1, s, window_T);
        const auto w2 = window_slice(r2, s, window_T);
        for (long tau : tau_set) {
            auto k = corrmat::lagged_cross(w1, w2, tau);
            auto spectrum = eig::eig_general(std::move(k.entries));
            out.rows.push_back({s, tau, spectrum.max_modulus()});
        }
    }

    out.summary.reserve(tau_set.size());
    for (long tau : tau_set) {
        std::vector<double> moduli;
        for (const auto& row : out.rows)
            if (row.tau == tau) moduli.push_back(std::abs(row.lambda_max));
        double mean = 0.0;
        for (double m : moduli) mean += m;
        mean /= static_cast<double>(moduli.size());
        double var = 0.0;
        for (double m : moduli) var += (m - mean) * (m - mean);
        const double sd =
            moduli.size() > 1 ? std::sqrt(var / static_cast<double>(moduli.size() - 1)) : 0.0;
        out.summary.push_back({tau, mean, sd});
    }
    return out;
}

std::pair<ingest::ReturnPanel, ingest::ReturnPanel> reshuffle_panels(
    const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2, std::uint64_t seed) {
    require_same_t(r1, r2, "reshuffle_panels");
    const auto perm1 = Rng::stream(seed, 0).permutation(r1.t());
    const auto perm2 = Rng::stream(seed, 1).permutation(r2.t());
    return {permute_columns(r1, perm1), permute_columns(r2, perm2)};
}

std::pair<ingest::ReturnPanel, ingest::ReturnPanel> generate_null(std::size_t n, std::size_t t,
                                                                  std::uint64_t seed) {
    check_panel_dims(n, t, "generate_null");
    Matrix v1(n, t), v2(n, t);
    Rng g1 = Rng::stream(seed, 0), g2 = Rng::stream(seed, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < t; ++k) {
            v1(i, k) = g1.normal();
            v2(i, k) = g2.normal();
        }
    return {assemble_panel(std::move(v1), "null-1"), assemble_panel(std::move(v2), "null-2")};
}

std::pair<ingest::ReturnPanel, ingest::ReturnPanel> generate_factor_model(
    std::size_t n, std::size_t t, double g_within, double g_cross, long lag,
    std::uint64_t seed) {
    check_panel_dims(n, t, "generate_factor_model");
    if (!(g_within >= 0.0 && g_within < 1.0) || !(g_cross >= 0.0 && g_cross < 1.0))
        throw std::invalid_argument(
            "generate_factor_model: loadings must lie in [0, 1)");

    const auto abs_lag = static_cast<std::size_t>(lag < 0 ? -lag : lag);
    std::vector<double> factor(t + 2 * abs_lag);
    Rng gf = Rng::stream(seed, 0), g1 = Rng::stream(seed, 1), g2 = Rng::stream(seed, 2);
    for (auto& f : factor) f = gf.normal();
    // factor at time index k (k in [-abs_lag, t-1+abs_lag]) is
    // factor[k + abs_lag]
    const auto f_at = [&](long k) { return factor[static_cast<std::size_t>(k + static_cast<long>(abs_lag))]; };

    const double e1 = std::sqrt(1.0 - g_within * g_within);
    const double e2 = std::sqrt(1.0 - g_cross * g_cross);
    const double root_half = 1.0 / std::sqrt(2.0);
    Matrix v1(n, t), v2(n, t);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < t; ++k) {
            const auto lk = static_cast<long>(k);
            v1(i, k) = g_within * f_at(lk) + e1 * g1.normal();
            const double fstar =
                lag == 0 ? f_at(lk) : root_half * (f_at(lk) + f_at(lk - lag));
            v2(i, k) = g_cross * fstar + e2 * g2.normal();
        }
    return {assemble_panel(std::move(v1), "factor-1"),
            assemble_panel(std::move(v2), "factor-2")};
}

std::pair<ingest::ReturnPanel, ingest::ReturnPanel> generate_ar1_null(std::size_t n,
                                                                      std::size_t t,
                                                                      double phi,
                                                                      std::uint64_t seed) {
    check_panel_dims(n, t, "generate_ar1_null");
    if (!(std::abs(phi) < 1.0))
        throw std::invalid_argument("generate_ar1_null: |phi| must be below 1");

    const double drive = std::sqrt(1.0 - phi * phi);
    Rng g1 = Rng::stream(seed, 0), g2 = Rng::stream(seed, 1);
    const auto fill = [&](Matrix& v, Rng& rng) {
        for (std::size_t i = 0; i < v.rows(); ++i) {
            v(i, 0) = rng.normal();
            for (std::size_t k = 1; k < v.cols(); ++k)
                v(i, k) = phi * v(i, k - 1) + drive * rng.normal();
        }
    };
    Matrix v1(n, t), v2(n, t);
    fill(v1, g1);
    fill(v2, g2);
    return {assemble_panel(std::move(v1), "ar1-1"), assemble_panel(std::move(v2), "ar1-2")};
}

}  // namespace asymspec::resample

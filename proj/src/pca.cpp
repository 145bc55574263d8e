#include "asymspec/pca.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace asymspec::pca {

namespace {

void require_full_retention(const PcaDecomposition& d, const char* op) {
    if (d.kept != d.eigen.eigenvalues.size()) {
        std::ostringstream msg;
        msg << op << ": truncated decomposition (kept " << d.kept << " of "
            << d.eigen.eigenvalues.size() << " components)";
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

PcaDecomposition decompose(const ingest::ReturnPanel& r, std::optional<std::size_t> max_keep) {
    if (max_keep && *max_keep == 0)
        throw std::invalid_argument("decompose: max_keep must be at least 1");

    PcaDecomposition d;
    d.tickers = r.tickers;
    d.dates = r.dates;
    d.system_label = r.system_label;
    d.eigen = eig::eig_symmetric(corrmat::pearson(r).entries);

    const std::size_t n = r.n(), t = r.t();
    const double threshold = 1e-10 * d.eigen.eigenvalues.front();
    std::size_t kept = 0;
    while (kept < n && d.eigen.eigenvalues[kept] >= threshold) ++kept;
    if (max_keep) kept = std::min(kept, *max_keep);
    d.kept = kept;

    d.components = Matrix(kept, t);
    for (std::size_t i = 0; i < kept; ++i) {
        const double inv_root = 1.0 / std::sqrt(d.eigen.eigenvalues[i]);
        for (std::size_t k = 0; k < t; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += d.eigen.vectors(j, i) * r.values(j, k);
            d.components(i, k) = inv_root * s;
        }
    }
    return d;
}

std::vector<double> variance_shares(const PcaDecomposition& d) {
    std::vector<double> shares(d.eigen.eigenvalues.size());
    const auto n = static_cast<double>(shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) shares[i] = d.eigen.eigenvalues[i] / n;
    return shares;
}

ReconstructionResult reconstruct(const PcaDecomposition& d) {
    const std::size_t n = d.eigen.eigenvalues.size(), t = d.components.cols();

    ReconstructionResult out;
    out.panel.tickers = d.tickers;
    out.panel.dates = d.dates;
    out.panel.system_label = d.system_label;
    out.panel.values = Matrix(n, t);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < t; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j < d.kept; ++j)
                s += std::sqrt(d.eigen.eigenvalues[j]) * d.eigen.vectors(i, j) *
                     d.components(j, k);
            out.panel.values(i, k) = s;
        }

    double total = 0.0, discarded = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        total += d.eigen.eigenvalues[j];
        if (j >= d.kept) discarded += d.eigen.eigenvalues[j];
    }
    out.discarded_ratio = total > 0.0 ? std::max(0.0, discarded / total) : 0.0;
    out.panel.standardized = out.discarded_ratio == 0.0;
    return out;
}

corrmat::AsymCorrMatrix pc_lagged_cross(const PcaDecomposition& d1,
                                        const PcaDecomposition& d2, long tau) {
    if (d1.components.cols() != d2.components.cols())
        throw std::invalid_argument("pc_lagged_cross: component series lengths differ");
    if (d1.kept != d2.kept)
        throw std::invalid_argument("pc_lagged_cross: retained counts differ");
    const std::size_t t = d1.components.cols();
    const auto abs_tau = static_cast<std::size_t>(tau < 0 ? -tau : tau);
    if (abs_tau + 2 > t) {
        std::ostringstream msg;
        msg << "pc_lagged_cross: |tau| = " << abs_tau << " leaves no window for T = " << t;
        throw std::invalid_argument(msg.str());
    }

    corrmat::AsymCorrMatrix k;
    k.lag = tau;
    k.effective_T = t - abs_tau;
    k.source_labels = {d1.system_label, d2.system_label};
    k.entries = corrmat::lagged_cross_matrix(d1.components, d2.components, tau);
    return k;
}

LoadingMatrix loading_matrix(const PcaDecomposition& d) {
    require_full_retention(d, "loading_matrix");
    const std::size_t n = d.eigen.eigenvalues.size();
    LoadingMatrix w;
    w.source_label = d.system_label;
    w.entries = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double root = std::sqrt(d.eigen.eigenvalues[j]);
        for (std::size_t i = 0; i < n; ++i) w.entries(i, j) = root * d.eigen.vectors(i, j);
    }
    return w;
}

std::vector<double> autocorr(const std::vector<double>& series, std::size_t max_lag) {
    const std::size_t t = series.size();
    if (t < 2) throw std::invalid_argument("autocorr: series needs at least 2 samples");
    if (2 * max_lag >= t) {
        std::ostringstream msg;
        msg << "autocorr: max_lag " << max_lag << " must be below T/2 = " << t / 2.0;
        throw std::invalid_argument(msg.str());
    }

    const double mean = kahan_sum(series.data(), t) / static_cast<double>(t);
    std::vector<double> centered(t);
    for (std::size_t i = 0; i < t; ++i) centered[i] = series[i] - mean;
    const double variance = kahan_dot(centered.data(), centered.data(), t) /
                            static_cast<double>(t);
    if (!(variance > 0.0)) throw std::runtime_error("autocorr: series has zero variance");

    std::vector<double> a(max_lag);
    for (std::size_t tau = 1; tau <= max_lag; ++tau)
        a[tau - 1] = kahan_dot(centered.data(), centered.data() + tau, t - tau) /
                     (static_cast<double>(t - tau) * variance);
    return a;
}

double confidence_band(std::size_t t, BandLevel) {
    if (t < 2) throw std::invalid_argument("confidence_band: T must be at least 2");
    return 3.0 / std::sqrt(static_cast<double>(t));
}

double effective_T(const std::vector<std::vector<double>>& series_set) {
    if (series_set.empty())
        throw std::invalid_argument("effective_T: empty series set");
    const std::size_t t = series_set.front().size();
    for (const auto& s : series_set)
        if (s.size() != t)
            throw std::invalid_argument("effective_T: series lengths differ");
    if (t < 2) throw std::invalid_argument("effective_T: series need at least 2 samples");

    const double band = confidence_band(t);
    const std::size_t max_lag = (t - 1) / 2;

    double acc = 0.0;
    for (const auto& s : series_set) {
        double sum = 0.0;
        if (max_lag > 0) {
            const auto a = autocorr(s, max_lag);
            for (double v : a) {
                sum += v;
                if (std::abs(v) < band) break;  // first lag inside the band, included
            }
        }
        const double denom = 1.0 + 2.0 * sum;
        const double te = denom > 0.0 ? static_cast<double>(t) / denom : 1.0;
        acc += std::max(te, 1.0);
    }
    return acc / static_cast<double>(series_set.size());
}

}  // namespace asymspec::pca

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "asymspec/corrmat.hpp"
#include "asymspec/eig.hpp"
#include "asymspec/ingest.hpp"
#include "asymspec/matrix.hpp"

namespace asymspec::pca {

struct PcaDecomposition {
    eig::SymEigen eigen;  // of the Pearson matrix, eigenvalues descending
    Matrix components;    // kept x T principal-component series e_{it}
    std::size_t kept = 0;
    std::vector<std::string> tickers;
    std::vector<std::string> dates;
    std::string system_label;
};

struct LoadingMatrix {
    Matrix entries;  // W_{ij} = sqrt(lambda_j) * V_i^{(j)}
    std::string source_label;
};

struct ReconstructionResult {
    ingest::ReturnPanel panel;
    double discarded_ratio = 0.0;  // discarded eigenvalue mass over total mass
};

enum class BandLevel { three_sigma };

// Principal components e_{it} = (1/sqrt(lambda_i)) sum_j V_j^{(i)} R_{jt} from
// the eigendecomposition of pearson(r). Components with
// lambda < 1e-10 * lambda_max are dropped; max_keep truncates further.
// Retained components satisfy (1/T) E E^T = identity within 1e-10.
PcaDecomposition decompose(const ingest::ReturnPanel& r,
                           std::optional<std::size_t> max_keep = std::nullopt);

// lambda_i / N for every eigenvalue (not just retained ones).
std::vector<double> variance_shares(const PcaDecomposition& d);

// R_{it} = sum_j sqrt(lambda_j) V_i^{(j)} e_{jt} over retained components.
// Exact for full retention; otherwise the squared relative error equals
// discarded_ratio.
ReconstructionResult reconstruct(const PcaDecomposition& d);

// Lagged cross-correlation matrix between two systems' principal components
// (the k^(e)(tau) diagnostics). Requires equal T and equal retained counts.
corrmat::AsymCorrMatrix pc_lagged_cross(const PcaDecomposition& d1,
                                        const PcaDecomposition& d2, long tau);

// W with W_{ij} = sqrt(lambda_j) V_i^{(j)}; W W^T reproduces the Pearson
// matrix. Requires full retention.
LoadingMatrix loading_matrix(const PcaDecomposition& d);

// a(tau) = (1/(T-tau)) sum_t x_t x_{t+tau} / variance for tau = 1..max_lag,
// after centering; variance uses divisor T. Requires 2*max_lag < T.
std::vector<double> autocorr(const std::vector<double>& series, std::size_t max_lag);

// Symmetric band half-width for the autocorrelation of pure noise: 3/sqrt(T).
double confidence_band(std::size_t t, BandLevel level = BandLevel::three_sigma);

// Effective sample count T / (1 + 2 sum_{tau=1}^{L} a(tau)) averaged over the
// series, where L is the first lag with |a| inside the confidence band. May
// exceed T for negatively autocorrelated series; floored at 1 when the
// correction denominator is not positive.
double effective_T(const std::vector<std::vector<double>>& series_set);

}  // namespace asymspec::pca

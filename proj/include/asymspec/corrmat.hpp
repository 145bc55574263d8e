#pragma once

#include <string>
#include <utility>
#include <vector>

#include "asymspec/eig.hpp"
#include "asymspec/ingest.hpp"
#include "asymspec/matrix.hpp"

namespace asymspec::corrmat {

// Lagged asymmetric correlation matrix k(tau) between two systems.
// Entries lie in [-T/(T-|tau|), T/(T-|tau|)] up to rounding (exactly
// [-1, 1] at tau = 0); effective_T = T - |tau|.
struct AsymCorrMatrix {
    Matrix entries;
    long lag = 0;
    std::size_t effective_T = 0;
    std::pair<std::string, std::string> source_labels;
};

// Symmetric Pearson correlation matrix (1/T) R R^T.
struct SymCorrMatrix {
    Matrix entries;
    std::string source_label;
};

// 2N x 2N joint matrix: Pearson blocks on the diagonal, k(0) and its
// transpose off the diagonal.
struct JointCorrMatrix {
    Matrix entries;
    std::size_t block_size = 0;
};

struct MaxeigScanRow {
    long tau = 0;
    cplx lambda_max;
    double kbar_times_n = 0.0;
};

// Core estimator shared with the PCA module: (1/(T-|tau|)) sum of
// a_{i,t} b_{j,t+tau}; for tau < 0 the lag window shifts onto the first
// argument. Rows are accumulated with compensated summation.
Matrix lagged_cross_matrix(const Matrix& a, const Matrix& b, long tau);

// Pearson estimator (1/T) R R^T of a standardized panel.
SymCorrMatrix pearson(const ingest::ReturnPanel& r);

// k(tau) per Eq.-(7) semantics; panels must be standardized with matching
// shapes and |tau| < T-1. lagged_cross(r1,r2,tau) equals the transpose of
// lagged_cross(r2,r1,-tau).
AsymCorrMatrix lagged_cross(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                            long tau);

// Mean entry (1/N^2) sum_ij k_ij.
double mean_corr(const AsymCorrMatrix& k);

// Spectrum of the mean-field matrix kbar*E_N: {kbar*n, 0 x (n-1)}.
eig::ComplexSpectrum mean_field_spectrum(double kbar, std::size_t n);

// Joint 2N x 2N correlation matrix of the stacked systems.
JointCorrMatrix joint_matrix(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2);

// For each tau in [tau_min, tau_max]: modulus-largest eigenvalue of k(tau)
// and the mean-field predictor kbar*N.
std::vector<MaxeigScanRow> maxeig_scan(const ingest::ReturnPanel& r1,
                                       const ingest::ReturnPanel& r2, long tau_min,
                                       long tau_max);

}  // namespace asymspec::corrmat

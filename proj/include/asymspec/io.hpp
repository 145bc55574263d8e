#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "asymspec/corrmat.hpp"
#include "asymspec/eig.hpp"
#include "asymspec/ingest.hpp"
#include "asymspec/pca.hpp"
#include "asymspec/resample.hpp"
#include "asymspec/rmt.hpp"

namespace asymspec::io {

// Shortest decimal text that round-trips the exact double value.
std::string format_double(double v);

// Write content to a temporary file in the target's directory, then rename
// over path, so readers never observe a partial artifact.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

// One row per ticker: header "ticker,<dates...>", values in full precision.
std::string panel_csv(const ingest::ReturnPanel& r);

// {"system_label", "N", "T", "standardized"} companion for panel_csv.
std::string panel_sidecar_json(const ingest::ReturnPanel& r);

// Inverse of panel_csv. A non-empty sidecar supplies system_label and the
// standardized flag and must agree with the CSV shape; without one the
// panel gets fallback_label and standardized = false. Errors carry the
// offending CSV line number.
ingest::ReturnPanel parse_panel_csv(const std::string& csv, const std::string& sidecar_json,
                                    const std::string& fallback_label);

// Dense comma-separated rows, no header.
std::string matrix_csv(const Matrix& m);

// {"N", "tau", "entries"} with entries flattened row-major.
std::string corr_matrix_json(const corrmat::AsymCorrMatrix& k);

// Header "re,im", one eigenvalue per row, in the spectrum's order.
std::string spectrum_csv(const eig::ComplexSpectrum& s);

// {"eigenvalues": [[re, im], ...], "source_dims": {"n","t","tau"} | null}.
std::string spectrum_json(const eig::ComplexSpectrum& s);

// Header "tau,abs_lambda_max,re_lambda_max,im_lambda_max,kbar_n".
std::string maxeig_scan_csv(const std::vector<corrmat::MaxeigScanRow>& rows);

// Header "bin_center,density,model_density"; the model column evaluates the
// fitted soft-edge density at each bin center.
std::string histogram_csv(const rmt::RadialHistogram& h, const rmt::DensityParams& fit);

// {"q_nominal","q_fitted","h_fitted","residual","n_bins","n_excluded",
//  "h_at_bound","q_at_bound","poor_fit","integral_deviation"}; residual is
// null when the params did not come from a fit.
std::string fit_report_json(const rmt::RadialHistogram& h, const rmt::DensityParams& fit,
                            double q_nominal);

// PC time series repackaged as a panel (tickers "PC1".."PCk") so the panel
// exporters apply unchanged.
ingest::ReturnPanel panel_from_components(const pca::PcaDecomposition& d);

struct PcCorrRow {
    long tau = 0;
    double k11 = 0.0;
    double k22 = 0.0;
    double k12 = 0.0;
    double k21 = 0.0;
};

// Header "tau,k11,k22,k12,k21".
std::string pc_corr_csv(const std::vector<PcCorrRow>& rows);

// Header "tau,autocorr,band", tau counting from 1; the band column repeats
// the confidence band so the CSV plots as three self-contained curves.
std::string autocorr_csv(const std::vector<double>& a, double band);

// {"iterations","subset_size","seed","maxeig":{"mean_abs","sd_abs","max_abs"}};
// sd is the sample standard deviation (0 for a single iteration).
std::string ensemble_summary_json(const resample::EnsembleResult& e);

// Components of eigenvector `index` of a 2-block symmetric matrix: header
// "position,system,component" with system 1 for positions below block.
std::string joint_vector_csv(const eig::SymEigen& se, std::size_t block, std::size_t index);

// Per-half sign counts and means of the top_k leading eigenvectors:
// [{"index","eigenvalue","half1":{"positive","negative","mean"},"half2":...}].
std::string joint_summary_json(const eig::SymEigen& se, std::size_t block,
                               std::size_t top_k);

}  // namespace asymspec::io

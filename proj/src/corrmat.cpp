#include "asymspec/corrmat.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "asymspec/parallel.hpp"

namespace asymspec::corrmat {

namespace {

void require_standardized(const ingest::ReturnPanel& r, const char* op) {
    if (!r.standardized)
        throw std::invalid_argument(std::string(op) + ": panel '" + r.system_label +
                                    "' is not standardized");
}

void require_same_shape(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                        const char* op) {
    if (r1.n() != r2.n() || r1.t() != r2.t()) {
        std::ostringstream msg;
        msg << op << ": dimension mismatch (" << r1.n() << "x" << r1.t() << " vs " << r2.n()
            << "x" << r2.t() << ")";
        throw std::invalid_argument(msg.str());
    }
}

// Cauchy-Schwarz bound for globally standardized rows summed over a
// window of T-|tau| steps but normalized by T-|tau|: |entry| can reach
// T/(T-|tau|), which is exactly 1 at tau = 0.
void check_correlation_range(const Matrix& m, double bound, const char* op) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > bound + 1e-9) {
                std::ostringstream msg;
                msg << op << ": entry (" << i << "," << j << ") = " << m(i, j)
                    << " outside the correlation bound " << bound
                    << "; inputs not standardized?";
                throw std::runtime_error(msg.str());
            }
}

}  // namespace

Matrix lagged_cross_matrix(const Matrix& a, const Matrix& b, long tau) {
    const std::size_t t = a.cols();
    const std::size_t abs_tau = static_cast<std::size_t>(tau < 0 ? -tau : tau);
    const std::size_t window = t - abs_tau;
    const double inv = 1.0 / static_cast<double>(window);
    // for tau >= 0 system 2 is read with offset tau; for tau < 0 the
    // offset moves onto system 1
    const std::size_t off_a = tau < 0 ? abs_tau : 0;
    const std::size_t off_b = tau >= 0 ? abs_tau : 0;

    Matrix k(a.rows(), b.rows());
    parallel_for(a.rows(), [&](std::size_t i) {
        const double* ra = a.row(i) + off_a;
        for (std::size_t j = 0; j < b.rows(); ++j)
            k(i, j) = inv * kahan_dot(ra, b.row(j) + off_b, window);
    });
    return k;
}

SymCorrMatrix pearson(const ingest::ReturnPanel& r) {
    require_standardized(r, "pearson");
    const std::size_t n = r.n(), t = r.t();
    const double inv = 1.0 / static_cast<double>(t);

    SymCorrMatrix c;
    c.source_label = r.system_label;
    c.entries = Matrix(n, n);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = i; j < n; ++j)
            c.entries(i, j) = inv * kahan_dot(r.values.row(i), r.values.row(j), t);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) c.entries(i, j) = c.entries(j, i);
    check_correlation_range(c.entries, 1.0, "pearson");
    return c;
}

AsymCorrMatrix lagged_cross(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2,
                            long tau) {
    require_standardized(r1, "lagged_cross");
    require_standardized(r2, "lagged_cross");
    require_same_shape(r1, r2, "lagged_cross");
    const long t = static_cast<long>(r1.t());
    const long abs_tau = tau < 0 ? -tau : tau;
    if (abs_tau >= t - 1) {
        std::ostringstream msg;
        msg << "lagged_cross: |tau| = " << abs_tau << " too large for T = " << t
            << " (need |tau| < T-1)";
        throw std::invalid_argument(msg.str());
    }

    AsymCorrMatrix k;
    k.lag = tau;
    k.effective_T = static_cast<std::size_t>(t - abs_tau);
    k.source_labels = {r1.system_label, r2.system_label};
    k.entries = lagged_cross_matrix(r1.values, r2.values, tau);
    check_correlation_range(k.entries, static_cast<double>(t) / static_cast<double>(t - abs_tau),
                            "lagged_cross");
    return k;
}

double mean_corr(const AsymCorrMatrix& k) {
    const std::size_t n1 = k.entries.rows(), n2 = k.entries.cols();
    double total = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        double row_sum = kahan_sum(k.entries.row(i), n2);
        double next = total + row_sum;
        comp += std::abs(total) >= std::abs(row_sum) ? (total - next) + row_sum
                                                     : (row_sum - next) + total;
        total = next;
    }
    return (total + comp) / static_cast<double>(n1 * n2);
}

eig::ComplexSpectrum mean_field_spectrum(double kbar, std::size_t n) {
    if (n < 1) throw std::invalid_argument("mean_field_spectrum: n must be >= 1");
    eig::ComplexSpectrum s;
    s.eigenvalues.assign(n, cplx(0.0, 0.0));
    s.eigenvalues[0] = cplx(kbar * static_cast<double>(n), 0.0);
    return s;
}

JointCorrMatrix joint_matrix(const ingest::ReturnPanel& r1, const ingest::ReturnPanel& r2) {
    require_same_shape(r1, r2, "joint_matrix");
    const std::size_t n = r1.n();
    SymCorrMatrix c1 = pearson(r1);
    SymCorrMatrix c2 = pearson(r2);
    AsymCorrMatrix k0 = lagged_cross(r1, r2, 0);

    JointCorrMatrix joint;
    joint.block_size = n;
    joint.entries = Matrix(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            joint.entries(i, j) = c1.entries(i, j);
            joint.entries(n + i, n + j) = c2.entries(i, j);
            joint.entries(i, n + j) = k0.entries(i, j);
            joint.entries(n + j, i) = k0.entries(i, j);
        }
    return joint;
}

std::vector<MaxeigScanRow> maxeig_scan(const ingest::ReturnPanel& r1,
                                       const ingest::ReturnPanel& r2, long tau_min,
                                       long tau_max) {
    if (tau_min > tau_max)
        throw std::invalid_argument("maxeig_scan: tau_min must not exceed tau_max");
    const double n = static_cast<double>(r1.n());
    std::vector<MaxeigScanRow> rows;
    for (long tau = tau_min; tau <= tau_max; ++tau) {
        AsymCorrMatrix k = lagged_cross(r1, r2, tau);
        eig::ComplexSpectrum s = eig::eig_general(k.entries);
        rows.push_back({tau, s.max_modulus(), mean_corr(k) * n});
    }
    return rows;
}

}  // namespace asymspec::corrmat

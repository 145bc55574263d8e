#pragma once

#include <optional>
#include <vector>

#include "asymspec/matrix.hpp"

namespace asymspec::eig {

struct SourceDims {
    std::size_t n = 0;
    std::size_t t = 0;
    long tau = 0;
};

// Complex eigenvalue set of a real matrix. Real inputs make the set closed
// under conjugation; the solver emits conjugate pairs exactly. Values are
// sorted by descending modulus (ties: descending real, then imaginary
// part), so eigenvalues.front() is the modulus-largest eigenvalue.
struct ComplexSpectrum {
    std::vector<cplx> eigenvalues;
    std::optional<SourceDims> source_dims;

    std::size_t size() const { return eigenvalues.size(); }
    cplx max_modulus() const;
    cplx sum() const;
    double spectral_radius() const;
};

// Canonical eigenvalue ordering: descending modulus, ties broken by
// descending real then imaginary part.
bool modulus_order(const cplx& a, const cplx& b);

// Eigendecomposition of a symmetric matrix: eigenvalues descending,
// vectors.column(i) is the unit eigenvector for eigenvalues[i], with the
// largest-magnitude entry of each vector oriented positive.
struct SymEigen {
    std::vector<double> eigenvalues;
    Matrix vectors;  // n x n, eigenvectors in columns
};

// Eigenvalues of a general real square matrix: balance, Householder
// reduction to Hessenberg form, then Francis double-shift QR. Eigenvalues
// only; no eigenvectors are produced. Throws std::runtime_error with size
// and norm diagnostics if QR exceeds 30*n sweeps.
ComplexSpectrum eig_general(Matrix a);

// Full eigendecomposition of a symmetric matrix via Householder
// tridiagonalization and implicit QL. Rejects input whose asymmetry
// exceeds 1e-10 with std::invalid_argument.
SymEigen eig_symmetric(const Matrix& a);

// Number of eigenvalues with |Im| <= eps.
std::size_t real_axis_count(const ComplexSpectrum& s, double eps);

// Default eps for real_axis_count: 1e-8 * spectral radius.
double default_real_axis_eps(const ComplexSpectrum& s);

}  // namespace asymspec::eig

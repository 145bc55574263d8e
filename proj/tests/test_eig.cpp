#include <doctest.h>

#include <cmath>
#include <complex>

#include "asymspec/eig.hpp"
#include "oracles.hpp"

using asymspec::cplx;
using asymspec::Matrix;
using namespace asymspec::eig;

TEST_SUITE_BEGIN("eig");

TEST_CASE("rotation matrix has eigenvalues +-i") {
    auto s = eig_general(Matrix::from({{0, 1}, {-1, 0}}));
    REQUIRE(s.size() == 2);
    CHECK(oracles::multiset_distance(s.eigenvalues, {cplx(0, 1), cplx(0, -1)}) < 1e-12);
    // conjugate pairs are emitted exactly
    CHECK(s.eigenvalues[0] == std::conj(s.eigenvalues[1]));
}

TEST_CASE("diagonal and triangular matrices") {
    auto s = eig_general(Matrix::from({{2, 0}, {0, 3}}));
    CHECK(oracles::multiset_distance(s.eigenvalues, {cplx(2, 0), cplx(3, 0)}) < 1e-12);

    auto t = eig_general(Matrix::from({{2, 1}, {0, 3}}));
    CHECK(oracles::multiset_distance(t.eigenvalues, {cplx(2, 0), cplx(3, 0)}) < 1e-12);
}

TEST_CASE("companion matrix of x^3-6x^2+11x-6 gives roots 1,2,3") {
    auto c = oracles::companion({-6.0, 11.0, -6.0});
    auto s = eig_general(c);
    CHECK(oracles::multiset_distance(s.eigenvalues, {cplx(1, 0), cplx(2, 0), cplx(3, 0)}) < 1e-8);
}

TEST_CASE("single-entry matrix") {
    Matrix a(1, 1);
    a(0, 0) = -4.5;
    auto s = eig_general(a);
    REQUIRE(s.size() == 1);
    CHECK(s.eigenvalues[0] == cplx(-4.5, 0.0));
}

TEST_CASE("trace and determinant identities on random matrices") {
    int case_id = 0;
    for (std::size_t n = 2; n <= 6; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            Matrix a = oracles::random_matrix(n, 1000 + static_cast<std::uint64_t>(case_id++));
            double det = oracles::det_cofactor(a);
            if (std::abs(det) < 1e-3) continue;  // skip near-singular draws
            auto s = eig_general(a);

            cplx sum = s.sum();
            double trace = a.trace();
            double scale = std::max(1.0, std::abs(trace));
            CHECK(std::abs(sum.real() - trace) / scale < 1e-8);
            CHECK(std::abs(sum.imag()) / scale < 1e-8);

            cplx prod(1.0, 0.0);
            for (const cplx& v : s.eigenvalues) prod *= v;
            CHECK(std::abs(prod - det) / std::abs(det) < 1e-8);
        }
    }
}

TEST_CASE("companion-matrix root oracles") {
    using VC = std::vector<cplx>;
    std::vector<VC> cases = {
        {cplx(1, 0), cplx(2, 0), cplx(3, 0)},
        {cplx(0, 1), cplx(0, -1)},
        {cplx(2, 1), cplx(2, -1)},
        {cplx(-1, 0), cplx(-2, 0), cplx(-3, 0), cplx(-4, 0)},
        {cplx(1, 2), cplx(1, -2), cplx(3, 0)},
        {cplx(0.5, 0), cplx(1.5, 0)},
        {cplx(-0.5, 0.5), cplx(-0.5, -0.5)},
        {cplx(1, 0), cplx(-1, 0), cplx(0, 2), cplx(0, -2)},
        {cplx(4, 0), cplx(0.25, 0)},
        {cplx(2, 3), cplx(2, -3), cplx(-1, 1), cplx(-1, -1)},
        {cplx(1, 0), cplx(2, 0), cplx(3, 0), cplx(4, 0), cplx(5, 0)},
        {cplx(0.1, 0), cplx(0.2, 0), cplx(0.3, 0)},
        {cplx(-2, 0), cplx(3, 1), cplx(3, -1)},
        {cplx(0, 0.5), cplx(0, -0.5), cplx(1, 0)},
        {cplx(6, 0), cplx(-6, 0)},
        {cplx(1.5, 2.5), cplx(1.5, -2.5)},
        {cplx(2, 0), cplx(2, 0)},  // double root
        {cplx(-1, 3), cplx(-1, -3), cplx(2, 2), cplx(2, -2), cplx(1, 0)},
        {cplx(0.9, 0.1), cplx(0.9, -0.1)},
        {cplx(-3, 0), cplx(5, 0), cplx(0, 1), cplx(0, -1)},
    };
    REQUIRE(cases.size() == 20);
    for (const auto& roots : cases) {
        auto s = eig_general(oracles::companion(oracles::poly_from_roots(roots)));
        CHECK(oracles::multiset_distance(s.eigenvalues, roots) < 1e-6);
    }
}

TEST_CASE("conjugation closure on random matrices") {
    for (int rep = 0; rep < 30; ++rep) {
        Matrix a = oracles::random_matrix(8, 7000 + static_cast<std::uint64_t>(rep));
        auto s = eig_general(a);
        std::vector<cplx> conj;
        for (const cplx& v : s.eigenvalues) conj.push_back(std::conj(v));
        CHECK(oracles::multiset_distance(s.eigenvalues, conj) < 1e-8);
    }
}

TEST_CASE("similarity invariance under orthogonal change of basis") {
    for (int rep = 0; rep < 10; ++rep) {
        std::size_t n = 6;
        Matrix a = oracles::random_matrix(n, 9100 + static_cast<std::uint64_t>(rep));
        Matrix p = oracles::random_orthogonal(n, 9200 + static_cast<std::uint64_t>(rep));
        Matrix pap = asymspec::matmul(asymspec::matmul(p.transposed(), a), p);
        auto s1 = eig_general(a);
        auto s2 = eig_general(pap);
        CHECK(oracles::multiset_distance(s1.eigenvalues, s2.eigenvalues) < 1e-6);
    }
}

TEST_CASE("eig_general agrees with eig_symmetric on symmetric input") {
    Matrix a = oracles::random_matrix(7, 333);
    Matrix sym(7, 7);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j) sym(i, j) = 0.5 * (a(i, j) + a(j, i));
    auto gen = eig_general(sym);
    auto symd = eig_symmetric(sym);
    std::vector<cplx> expected;
    for (double v : symd.eigenvalues) expected.emplace_back(v, 0.0);
    CHECK(oracles::multiset_distance(gen.eigenvalues, expected) < 1e-8);
}

TEST_CASE("symmetric 2x2 closed form") {
    auto d = eig_symmetric(Matrix::from({{1, 0.5}, {0.5, 1}}));
    REQUIRE(d.eigenvalues.size() == 2);
    CHECK(d.eigenvalues[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(d.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-12));
    double inv = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(d.vectors(0, 0) - inv) < 1e-12);
    CHECK(std::abs(d.vectors(1, 0) - inv) < 1e-12);
    // second vector is (1,-1)/sqrt(2) up to the sign convention
    CHECK(std::abs(std::abs(d.vectors(0, 1)) - inv) < 1e-12);
    CHECK(std::abs(std::abs(d.vectors(1, 1)) - inv) < 1e-12);
    CHECK(d.vectors(0, 1) * d.vectors(1, 1) < 0.0);
}

TEST_CASE("symmetric identity and rank-one all-ones") {
    auto id = eig_symmetric(Matrix::identity(5));
    for (double v : id.eigenvalues) CHECK(v == doctest::Approx(1.0).epsilon(1e-13));

    Matrix ones(4, 4, 1.0);
    auto d = eig_symmetric(ones);
    CHECK(d.eigenvalues[0] == doctest::Approx(4.0).epsilon(1e-12));
    for (std::size_t i = 1; i < 4; ++i) CHECK(std::abs(d.eigenvalues[i]) < 1e-12);
}

TEST_CASE("symmetric solver invariants: orthonormality, residual, ordering, sign") {
    Matrix a = oracles::random_matrix(12, 555);
    Matrix sym(12, 12);
    for (std::size_t i = 0; i < 12; ++i)
        for (std::size_t j = 0; j < 12; ++j) sym(i, j) = 0.5 * (a(i, j) + a(j, i));
    auto d = eig_symmetric(sym);

    Matrix vtv = asymspec::matmul(d.vectors.transposed(), d.vectors);
    CHECK(vtv.max_abs_diff(Matrix::identity(12)) < 1e-10);

    double anorm = sym.max_abs();
    for (std::size_t c = 0; c < 12; ++c) {
        for (std::size_t r = 0; r < 12; ++r) {
            double av = 0.0;
            for (std::size_t k = 0; k < 12; ++k) av += sym(r, k) * d.vectors(k, c);
            CHECK(std::abs(av - d.eigenvalues[c] * d.vectors(r, c)) < 1e-8 * anorm);
        }
        if (c > 0) CHECK(d.eigenvalues[c - 1] >= d.eigenvalues[c]);
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t r = 0; r < 12; ++r)
            if (std::abs(d.vectors(r, c)) > best) {
                best = std::abs(d.vectors(r, c));
                arg = r;
            }
        CHECK(d.vectors(arg, c) > 0.0);
    }
}

TEST_CASE("eig_symmetric rejects asymmetric input") {
    CHECK_THROWS_AS(eig_symmetric(Matrix::from({{1, 0.2}, {0.1, 1}})), std::invalid_argument);
}

TEST_CASE("real_axis_count") {
    ComplexSpectrum s;
    s.eigenvalues = {cplx(1, 0), cplx(0, 1), cplx(0, -1)};
    CHECK(real_axis_count(s, 1e-9) == 1);

    ComplexSpectrum all_real;
    all_real.eigenvalues = {cplx(1, 0), cplx(2, 0), cplx(-3, 0)};
    CHECK(real_axis_count(all_real, 1e-9) == 3);

    // default eps is 1e-8 * spectral radius
    ComplexSpectrum t;
    t.eigenvalues = {cplx(10, 0), cplx(0, 5e-8), cplx(0, -5e-8)};
    std::sort(t.eigenvalues.begin(), t.eigenvalues.end(),
              [](const cplx& a, const cplx& b) { return std::abs(a) > std::abs(b); });
    CHECK(default_real_axis_eps(t) == doctest::Approx(1e-7));
    CHECK(real_axis_count(t, default_real_axis_eps(t)) == 3);
    CHECK(real_axis_count(t, 1e-9) == 1);
}

TEST_CASE("spectrum ordering puts the modulus-largest first") {
    Matrix a = oracles::random_matrix(9, 777);
    auto s = eig_general(a);
    for (std::size_t i = 1; i < s.size(); ++i)
        CHECK(std::abs(s.eigenvalues[i - 1]) >= std::abs(s.eigenvalues[i]) - 1e-15);
    CHECK(std::abs(s.max_modulus()) == std::abs(s.eigenvalues[0]));
}

TEST_SUITE_END();

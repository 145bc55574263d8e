#include <algorithm>
#include <cmath>
#include <vector>

#include "asymspec/corrmat.hpp"
#include "asymspec/eig.hpp"
#include "asymspec/ingest.hpp"
#include "asymspec/pca.hpp"
#include "asymspec/resample.hpp"
#include "asymspec/rmt.hpp"
#include "asymspec/rng.hpp"
#include "doctest.h"
#include "oracles.hpp"

using asymspec::Matrix;
using asymspec::Rng;
using asymspec::cplx;
namespace ingest = asymspec::ingest;
namespace corrmat = asymspec::corrmat;
namespace eig = asymspec::eig;
namespace pca = asymspec::pca;
namespace resample = asymspec::resample;
namespace rmt = asymspec::rmt;

namespace {

ingest::ReturnPanel subset_panel(const ingest::ReturnPanel& r,
                                 const std::vector<std::size_t>& idx) {
    ingest::ReturnPanel s;
    s.values = r.values.select_rows(idx);
    for (std::size_t i : idx) s.tickers.push_back(r.tickers[i]);
    s.dates = r.dates;
    s.system_label = r.system_label;
    s.standardized = r.standardized;
    return s;
}

}  // namespace

TEST_SUITE("resample") {
    TEST_CASE("generate_null is deterministic and seed-sensitive") {
        const auto [a1, a2] = resample::generate_null(10, 50, 7);
        const auto [b1, b2] = resample::generate_null(10, 50, 7);
        CHECK(a1.values.max_abs_diff(b1.values) == 0.0);
        CHECK(a2.values.max_abs_diff(b2.values) == 0.0);
        const auto [c1, c2] = resample::generate_null(10, 50, 8);
        CHECK(a1.values.max_abs_diff(c1.values) > 0.0);
        // the two systems are distinct draws
        CHECK(a1.values.max_abs_diff(a2.values) > 0.0);
        CHECK(a1.standardized);
        CHECK(a2.standardized);
        CHECK_THROWS_AS(resample::generate_null(1, 50, 7), std::invalid_argument);
    }

    TEST_CASE("null eigenvalue cloud stays inside the rescaled support") {
        // Pooled spectra of independent-panel k(0) fill a disk of radius 1/sqrt(q).
        std::size_t total = 0, inside = 0;
        for (std::uint64_t rep = 0; rep < 5; ++rep) {
            const auto [r1, r2] = resample::generate_null(100, 500, 100 + rep);
            auto k = corrmat::lagged_cross(r1, r2, 0);
            const auto s = eig::eig_general(std::move(k.entries));
            const double limit = 1.1 / std::sqrt(500.0 / 100.0);
            for (const auto& lam : s.eigenvalues) {
                ++total;
                if (std::abs(lam) <= limit) ++inside;
            }
        }
        CHECK(static_cast<double>(inside) / static_cast<double>(total) >= 0.95);
    }

    TEST_CASE("null lambda_MAX sits far below a factor-driven value") {
        const std::size_t n = 120, t = 956;
        const double bound = 3.0 / std::sqrt(static_cast<double>(t) / static_cast<double>(n));
        for (std::uint64_t rep = 0; rep < 10; ++rep) {
            const auto [r1, r2] = resample::generate_null(n, t, 300 + rep);
            auto k = corrmat::lagged_cross(r1, r2, 0);
            const auto s = eig::eig_general(std::move(k.entries));
            CHECK(std::abs(s.max_modulus()) < bound);
        }
    }

    TEST_CASE("degenerate bootstrap reproduces the full-matrix spectrum") {
        const auto [r1, r2] = resample::generate_null(12, 80, 11);
        resample::BootstrapSpec spec{1, 12, 99};
        const auto ens = resample::bootstrap_spectra(r1, r2, 1, spec, resample::Space::returns);
        REQUIRE(ens.pooled.size() == 12);
        auto k = corrmat::lagged_cross(r1, r2, 1);
        const auto direct = eig::eig_general(std::move(k.entries));
        for (std::size_t i = 0; i < 12; ++i)
            CHECK(ens.pooled.eigenvalues[i] == direct.eigenvalues[i]);
        CHECK(ens.per_iteration_maxeig[0] == direct.eigenvalues[0]);
    }

    TEST_CASE("bootstrap is deterministic in the seed") {
        const auto [r1, r2] = resample::generate_null(15, 100, 13);
        resample::BootstrapSpec spec{5, 10, 1234};
        const auto a = resample::bootstrap_spectra(r1, r2, 0, spec, resample::Space::returns);
        const auto b = resample::bootstrap_spectra(r1, r2, 0, spec, resample::Space::returns);
        REQUIRE(a.pooled.size() == b.pooled.size());
        REQUIRE(a.pooled.size() == 50);  // iterations x subset_size
        for (std::size_t i = 0; i < a.pooled.size(); ++i)
            CHECK(a.pooled.eigenvalues[i] == b.pooled.eigenvalues[i]);
        for (std::size_t i = 0; i < 5; ++i)
            CHECK(a.per_iteration_maxeig[i] == b.per_iteration_maxeig[i]);

        spec.rng_seed = 1235;
        const auto c = resample::bootstrap_spectra(r1, r2, 0, spec, resample::Space::returns);
        double shift = 0.0;
        for (std::size_t i = 0; i < c.pooled.size(); ++i)
            shift = std::max(shift, std::abs(c.pooled.eigenvalues[i] - a.pooled.eigenvalues[i]));
        CHECK(shift > 0.0);
        CHECK(a.pooled.source_dims.has_value());
        CHECK(a.pooled.source_dims->n == 10);
        CHECK(a.pooled.source_dims->tau == 0);
    }

    TEST_CASE("bootstrap validates its spec") {
        const auto [r1, r2] = resample::generate_null(8, 60, 17);
        CHECK_THROWS_AS(resample::bootstrap_spectra(r1, r2, 0, {0, 5, 1},
                                                    resample::Space::returns),
                        std::invalid_argument);
        CHECK_THROWS_AS(resample::bootstrap_spectra(r1, r2, 0, {2, 1, 1},
                                                    resample::Space::returns),
                        std::invalid_argument);
        CHECK_THROWS_AS(resample::bootstrap_spectra(r1, r2, 0, {2, 9, 1},
                                                    resample::Space::returns),
                        std::invalid_argument);
        CHECK_THROWS_AS(resample::bootstrap_spectra(r1, r2, 70, {2, 5, 1},
                                                    resample::Space::returns),
                        std::invalid_argument);
    }

    TEST_CASE("PC-space bootstrap matches the explicit PCA pipeline") {
        const auto [r1, r2] = resample::generate_factor_model(10, 300, 0.5, 0.4, 1, 23);
        resample::BootstrapSpec spec{4, 7, 555};
        const auto ens =
            resample::bootstrap_spectra(r1, r2, 1, spec, resample::Space::principal_components);
        REQUIRE(ens.pooled.size() == 28);

        std::vector<cplx> naive;
        for (std::uint64_t i = 0; i < 4; ++i) {
            Rng rng = Rng::stream(555, i);
            const auto s1 = rng.sample_without_replacement(10, 7);
            const auto s2 = rng.sample_without_replacement(10, 7);
            const auto d1 = pca::decompose(subset_panel(r1, s1));
            const auto d2 = pca::decompose(subset_panel(r2, s2));
            auto ke = pca::pc_lagged_cross(d1, d2, 1);
            const auto s = eig::eig_general(std::move(ke.entries));
            naive.insert(naive.end(), s.eigenvalues.begin(), s.eigenvalues.end());
            CHECK(std::abs(ens.per_iteration_maxeig[i] - s.eigenvalues.front()) < 1e-8);
        }
        CHECK(oracles::multiset_distance(ens.pooled.eigenvalues, naive) < 1e-8);
    }

    TEST_CASE("null bootstrap recovers the nominal aspect ratio") {
        const auto [r1, r2] = resample::generate_null(200, 1595, 31);
        resample::BootstrapSpec spec{200, 190, 777};
        const auto ens = resample::bootstrap_spectra(r1, r2, 0, spec, resample::Space::returns);
        REQUIRE(ens.pooled.size() == 200 * 190);

        const double q_nominal = 1595.0 / 190.0;
        std::vector<double> moduli;
        moduli.reserve(ens.pooled.size());
        for (const auto& lam : ens.pooled.eigenvalues) moduli.push_back(std::abs(lam));
        const auto hist = rmt::radial_histogram(moduli, rmt::default_bin_count(moduli.size()),
                                                rmt::default_exclusion(q_nominal));
        const auto fit = rmt::fit_density(hist, rmt::QMode::free);
        CHECK(std::abs(fit.q - q_nominal) / q_nominal < 0.10);
        CHECK_FALSE(fit.poor_fit);
    }

    TEST_CASE("single sliding window agrees with maxeig_scan") {
        const auto [r1, r2] = resample::generate_factor_model(8, 240, 0.6, 0.5, 1, 37);
        const auto scan = corrmat::maxeig_scan(r1, r2, -2, 2);
        const auto slid = resample::sliding_windows(r1, r2, {-2, -1, 0, 1, 2}, 240, {0});
        REQUIRE(slid.rows.size() == 5);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(slid.rows[i].tau == scan[i].tau);
            CHECK(std::abs(slid.rows[i].lambda_max - scan[i].lambda_max) < 1e-9);
        }
        for (const auto& s : slid.summary) CHECK(s.sd_abs == 0.0);
    }

    TEST_CASE("factor-model windows give stable lambda_MAX at the coupled lag") {
        const auto [r1, r2] = resample::generate_factor_model(20, 1200, 0.6, 0.5, 0, 41);
        const std::vector<std::size_t> starts{0, 100, 200, 300};
        const auto slid = resample::sliding_windows(r1, r2, {0}, 800, starts);
        REQUIRE(slid.summary.size() == 1);
        const auto& s0 = slid.summary.front();
        // coupled systems: large mean, small relative scatter across windows
        CHECK(s0.mean_abs > 3.0 * std::sqrt(20.0 / 800.0));
        CHECK(s0.sd_abs / s0.mean_abs < 0.3);
    }

    TEST_CASE("windows on independent noise hover near the null radius") {
        const auto [r1, r2] = resample::generate_null(20, 1200, 43);
        const auto slid = resample::sliding_windows(r1, r2, {0, 1}, 800, {0, 200, 400});
        const double radius = std::sqrt(20.0 / 800.0);
        for (const auto& s : slid.summary) {
            CHECK(s.mean_abs > 0.8 * radius);
            CHECK(s.mean_abs < 1.5 * radius);
        }
    }

    TEST_CASE("sliding_windows validates ranges") {
        const auto [r1, r2] = resample::generate_null(5, 100, 47);
        CHECK_THROWS_AS(resample::sliding_windows(r1, r2, {0}, 80, {0, 30}),
                        std::invalid_argument);
        CHECK_THROWS_AS(resample::sliding_windows(r1, r2, {}, 80, {0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(resample::sliding_windows(r1, r2, {0}, 80, std::vector<std::size_t>{}),
                        std::invalid_argument);
    }

    TEST_CASE("reshuffle preserves within-panel structure exactly") {
        const auto [r1, r2] = resample::generate_factor_model(10, 400, 0.6, 0.4, 1, 53);
        const auto [s1, s2] = resample::reshuffle_panels(r1, r2, 61);

        const auto before = corrmat::pearson(r1);
        const auto after = corrmat::pearson(s1);
        CHECK(before.entries.max_abs_diff(after.entries) < 1e-12);

        // each row is a permutation of the original samples
        for (std::size_t i = 0; i < r1.n(); ++i) {
            std::vector<double> a(r1.values.row(i), r1.values.row(i) + r1.t());
            std::vector<double> b(s1.values.row(i), s1.values.row(i) + s1.t());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
        }
        CHECK(s1.standardized);
        // the two panels draw different permutations
        CHECK(s1.values.max_abs_diff(r1.values) > 0.0);
        CHECK(s2.values.max_abs_diff(r2.values) > 0.0);
    }

    TEST_CASE("reshuffle destroys cross-panel and serial correlation") {
        const auto [r1, r2] = resample::generate_factor_model(20, 1500, 0.7, 0.6, 0, 59);
        const double before = corrmat::mean_corr(corrmat::lagged_cross(r1, r2, 0));
        REQUIRE(before > 0.1);

        const auto [s1, s2] = resample::reshuffle_panels(r1, r2, 67);
        const double after = corrmat::mean_corr(corrmat::lagged_cross(s1, s2, 0));
        // Reshuffling keeps within-panel correlation, so the row averages
        // x_t, y_t keep variance v_i = g_i^2 + (1-g_i^2)/N and mean_corr =
        // (1/T) sum x_t y_t has null sd sqrt(v1*v2/T).
        const double v1 = 0.49 + 0.51 / 20.0;
        const double v2 = 0.36 + 0.64 / 20.0;
        CHECK(std::abs(after) < 4.0 * std::sqrt(v1 * v2 / 1500.0));

        const auto [a1, a2] = resample::generate_ar1_null(5, 1500, 0.6, 71);
        const auto [b1, b2] = resample::reshuffle_panels(a1, a2, 73);
        std::vector<double> row(b1.values.row(0), b1.values.row(0) + b1.t());
        const auto ac = pca::autocorr(row, 300);
        const double band = pca::confidence_band(b1.t());
        std::size_t inside = 0;
        for (double v : ac)
            if (std::abs(v) < band) ++inside;
        CHECK(static_cast<double>(inside) / 300.0 >= 0.99);
    }

    TEST_CASE("decoupled factor model shows no tau-localized peak") {
        const auto [r1, r2] = resample::generate_factor_model(15, 1000, 0.5, 0.0, 1, 79);
        const auto scan = corrmat::maxeig_scan(r1, r2, -2, 2);
        const double null_scale = 1.5 * std::sqrt(15.0 / 1000.0);
        for (const auto& row : scan) CHECK(std::abs(row.lambda_max) < null_scale);
    }

    TEST_CASE("lagged factor injection reproduces the asymmetry pattern") {
        const auto [r1, r2] = resample::generate_factor_model(30, 2000, 0.5, 0.3, 1, 83);
        const auto scan = corrmat::maxeig_scan(r1, r2, -1, 1);
        const double backward = std::abs(scan[0].lambda_max);   // tau = -1
        const double equal_time = std::abs(scan[1].lambda_max); // tau = 0
        const double forward = std::abs(scan[2].lambda_max);    // tau = +1
        CHECK(forward > 5.0 * backward);
        // dual injection couples tau = 0 as strongly as tau = lag
        CHECK(equal_time > 0.5 * forward);
        const double expected = 30.0 * 0.5 * 0.3 / std::sqrt(2.0);
        CHECK(std::abs(forward - expected) / expected < 0.35);
    }

    TEST_CASE("factor model within-share matches the loading") {
        const auto [r1, r2] = resample::generate_factor_model(20, 3000, 0.5, 0.2, 1, 89);
        const auto d = pca::decompose(r1);
        const double expected = 0.25 + 0.75 / 20.0;
        CHECK(std::abs(pca::variance_shares(d)[0] - expected) < 0.05);
    }

    TEST_CASE("generate_ar1_null produces the requested serial correlation") {
        const auto [r1, r2] = resample::generate_ar1_null(5, 3000, 0.5, 97);
        CHECK(r1.standardized);
        std::vector<double> row(r1.values.row(0), r1.values.row(0) + r1.t());
        const auto ac = pca::autocorr(row, 2);
        CHECK(std::abs(ac[0] - 0.5) < 0.06);
        // systems stay uncoupled
        const double mc = corrmat::mean_corr(corrmat::lagged_cross(r1, r2, 0));
        CHECK(std::abs(mc) < 4.0 / (5.0 * std::sqrt(3000.0)));
        CHECK_THROWS_AS(resample::generate_ar1_null(5, 100, 1.0, 1), std::invalid_argument);
    }

    TEST_CASE("pooled null edge tightens as N grows at fixed q") {
        const double radius = 1.0 / std::sqrt(5.0);
        std::vector<double> gaps;
        const std::size_t sizes[3] = {50, 100, 200};
        const std::size_t reps[3] = {20, 10, 5};
        for (int c = 0; c < 3; ++c) {
            std::vector<double> moduli;
            for (std::uint64_t rep = 0; rep < reps[c]; ++rep) {
                const auto [r1, r2] =
                    resample::generate_null(sizes[c], 5 * sizes[c], 1000 + rep);
                auto k = corrmat::lagged_cross(r1, r2, 0);
                const auto s = eig::eig_general(std::move(k.entries));
                for (const auto& lam : s.eigenvalues) moduli.push_back(std::abs(lam));
            }
            std::sort(moduli.begin(), moduli.end());
            const double q99 = moduli[static_cast<std::size_t>(0.99 * moduli.size())];
            gaps.push_back(std::abs(q99 - radius));
        }
        CHECK(gaps[1] < gaps[0]);
        CHECK(gaps[2] < gaps[1]);
        CHECK(gaps[2] < 0.05);
    }
}

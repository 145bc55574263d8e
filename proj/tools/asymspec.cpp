#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "asymspec/corrmat.hpp"
#include "asymspec/eig.hpp"
#include "asymspec/ingest.hpp"
#include "asymspec/io.hpp"
#include "asymspec/matrix.hpp"
#include "asymspec/pca.hpp"
#include "asymspec/resample.hpp"
#include "asymspec/rmt.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using asymspec::Matrix;
using asymspec::cplx;
using nlohmann::json;
using ordered_json = nlohmann::ordered_json;
namespace corrmat = asymspec::corrmat;
namespace eig = asymspec::eig;
namespace ingest = asymspec::ingest;
namespace io = asymspec::io;
namespace pca = asymspec::pca;
namespace resample = asymspec::resample;
namespace rmt = asymspec::rmt;

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const std::exception& e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("config " + path + ": expected a JSON object");
    return j;
}

// Flags override config-file values, which override built-in defaults.
template <class T>
void fill(const json& cfg, const CLI::Option* opt, const char* key, T& var) {
    if (opt->count() > 0 || !cfg.contains(key)) return;
    try {
        var = cfg.at(key).get<T>();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("config key '") + key + "': " + e.what());
    }
}

std::string prepare_out_dir(const std::string& out) {
    if (out.empty()) throw std::runtime_error("output directory required (--out or config)");
    fs::create_directories(out);
    return out;
}

void emit(const std::string& out_dir, const std::string& name, const std::string& content) {
    io::write_text_atomic((fs::path(out_dir) / name).string(), content);
}

enum class InputKind { long_prices, wide_prices, panel };

InputKind detect_input(const std::string& path) {
    const std::string text = io::read_text(path);
    std::string head = text.substr(0, text.find('\n'));
    if (!head.empty() && head.back() == '\r') head.pop_back();
    if (head == "date,ticker,price") return InputKind::long_prices;
    if (head.rfind("ticker,", 0) == 0) return InputKind::panel;
    if (head.rfind("date,", 0) == 0) return InputKind::wide_prices;
    throw std::runtime_error(path + ": unrecognized header '" + head +
                             "' (expected a price CSV or an exported panel)");
}

ingest::ReturnPanel load_panel_file(const std::string& path) {
    fs::path sidecar = fs::path(path);
    sidecar.replace_extension(".json");
    const std::string sidecar_json = fs::exists(sidecar) ? io::read_text(sidecar.string()) : "";
    return io::parse_panel_csv(io::read_text(path), sidecar_json,
                               fs::path(path).stem().string());
}

// Inputs are either two price CSVs (aligned, differenced, standardized here)
// or two previously exported return panels covering identical dates.
std::pair<ingest::ReturnPanel, ingest::ReturnPanel> load_pair(const std::string& a,
                                                              const std::string& b) {
    for (const std::string& p : {a, b}) {
        if (p.empty()) throw std::runtime_error("both --a and --b inputs are required");
        if (!fs::exists(p)) throw std::runtime_error("missing input file: " + p);
    }
    const InputKind ka = detect_input(a);
    const InputKind kb = detect_input(b);
    if ((ka == InputKind::panel) != (kb == InputKind::panel))
        throw std::runtime_error("inputs must both be price CSVs or both return panels");
    if (ka == InputKind::panel) {
        auto r1 = load_panel_file(a);
        auto r2 = load_panel_file(b);
        if (r1.dates != r2.dates)
            throw std::runtime_error("panels cover different dates: " + a + " vs " + b);
        if (!r1.standardized) r1 = ingest::standardize(std::move(r1));
        if (!r2.standardized) r2 = ingest::standardize(std::move(r2));
        return {std::move(r1), std::move(r2)};
    }
    auto pick = [](InputKind k) {
        return k == InputKind::long_prices ? ingest::PriceFormat::long_csv
                                           : ingest::PriceFormat::wide_csv;
    };
    const auto [t1, t2] =
        ingest::align_calendars(ingest::load_prices(a, pick(ka)), ingest::load_prices(b, pick(kb)));
    return {ingest::standardize(ingest::log_returns(t1)),
            ingest::standardize(ingest::log_returns(t2))};
}

rmt::QMode parse_fit_mode(const std::string& fit) {
    if (fit == "fixed") return rmt::QMode::fixed;
    if (fit == "free") return rmt::QMode::free;
    throw std::runtime_error("fit mode must be 'fixed' or 'free', got '" + fit + "'");
}

int run_spectrum(const std::string& a, const std::string& b, long tau, std::size_t boot,
                 std::size_t subset, std::uint64_t seed, const std::string& fit,
                 const std::string& out) {
    const rmt::QMode mode = parse_fit_mode(fit);
    const std::string dir = prepare_out_dir(out);
    const auto [r1, r2] = load_pair(a, b);

    eig::ComplexSpectrum cloud;
    double q_nominal = 0.0;
    std::optional<resample::EnsembleResult> ens;
    if (boot > 0) {
        resample::BootstrapSpec bs;
        bs.iterations = boot;
        bs.subset_size = subset > 0 ? subset : std::min(r1.n(), r2.n());
        bs.rng_seed = seed;
        ens = resample::bootstrap_spectra(r1, r2, tau, bs, resample::Space::returns);
        cloud = ens->pooled;
        q_nominal = static_cast<double>(r1.t()) / static_cast<double>(bs.subset_size);
    } else {
        auto k = corrmat::lagged_cross(r1, r2, tau);
        cloud = eig::eig_general(std::move(k.entries));
        q_nominal = static_cast<double>(r1.t()) / static_cast<double>(r1.n());
    }

    const auto hist = rmt::radial_histogram(cloud, rmt::default_bin_count(cloud.size()),
                                            rmt::default_exclusion(q_nominal));
    const auto fitp = rmt::fit_density(hist, mode, q_nominal);

    emit(dir, "spectrum.csv", io::spectrum_csv(cloud));
    emit(dir, "histogram.csv", io::histogram_csv(hist, fitp));
    emit(dir, "fit_report.json", io::fit_report_json(hist, fitp, q_nominal));
    if (ens) emit(dir, "ensemble_summary.json", io::ensemble_summary_json(*ens));
    return 0;
}

int run_maxeig(const std::string& a, const std::string& b, long tau_min, long tau_max,
               const std::string& out) {
    const std::string dir = prepare_out_dir(out);
    const auto [r1, r2] = load_pair(a, b);
    emit(dir, "maxeig.csv", io::maxeig_scan_csv(corrmat::maxeig_scan(r1, r2, tau_min, tau_max)));
    return 0;
}

int run_pca(const std::string& a, const std::string& b, long tau_max, bool reshuffle,
            std::uint64_t seed, const std::string& out) {
    if (tau_max < 0) throw std::runtime_error("--tau-max must be >= 0");
    const std::string dir = prepare_out_dir(out);
    auto [r1, r2] = load_pair(a, b);
    if (reshuffle) std::tie(r1, r2) = resample::reshuffle_panels(r1, r2, seed);

    auto d1 = pca::decompose(r1);
    auto d2 = pca::decompose(r2);
    if (d1.kept != d2.kept) {
        const std::size_t keep = std::min(d1.kept, d2.kept);
        d1 = pca::decompose(r1, keep);
        d2 = pca::decompose(r2, keep);
    }
    if (d1.kept < 2)
        throw std::runtime_error("PC diagnostics need at least 2 retained components");
    const bool full = d1.kept == r1.n() && d2.kept == r2.n();
    const std::size_t t = r1.t();

    const auto p1 = io::panel_from_components(d1);
    const auto p2 = io::panel_from_components(d2);
    emit(dir, "pc_panel_1.csv", io::panel_csv(p1));
    emit(dir, "pc_panel_1.json", io::panel_sidecar_json(p1));
    emit(dir, "pc_panel_2.csv", io::panel_csv(p2));
    emit(dir, "pc_panel_2.json", io::panel_sidecar_json(p2));

    // The (k11, k22, k12, k21) table only needs the two leading PCs, so the
    // tau sweep runs on 2 x T slices instead of full kept x kept matrices.
    const Matrix lead1 = d1.components.select_rows({0, 1});
    const Matrix lead2 = d2.components.select_rows({0, 1});
    std::vector<io::PcCorrRow> rows;
    const long lag_limit = static_cast<long>(t) - 2;
    for (long tau = -std::min(tau_max, lag_limit); tau <= std::min(tau_max, lag_limit); ++tau) {
        const Matrix ke = corrmat::lagged_cross_matrix(lead1, lead2, tau);
        rows.push_back({tau, ke(0, 0), ke(1, 1), ke(0, 1), ke(1, 0)});
    }
    emit(dir, "pc_corr.csv", io::pc_corr_csv(rows));

    const double band = pca::confidence_band(t);
    const std::size_t max_lag =
        std::min<std::size_t>(static_cast<std::size_t>(tau_max), (t - 1) / 2);
    for (int sys = 0; sys < 2; ++sys) {
        const auto& d = sys == 0 ? d1 : d2;
        std::vector<double> pc1(d.components.row(0), d.components.row(0) + t);
        emit(dir, "autocorr_pc1_" + std::to_string(sys + 1) + ".csv",
             io::autocorr_csv(pca::autocorr(pc1, max_lag), band));
    }

    auto ke0 = pca::pc_lagged_cross(d1, d2, 0);
    const Matrix ke0_entries = ke0.entries;
    const auto pc_spectrum = eig::eig_general(std::move(ke0.entries));
    emit(dir, "pc_spectrum.csv", io::spectrum_csv(pc_spectrum));

    const double q_nominal = static_cast<double>(t) / static_cast<double>(d1.kept);
    std::optional<rmt::DensityParams> fitp;
    try {
        const auto hist =
            rmt::radial_histogram(pc_spectrum, rmt::default_bin_count(pc_spectrum.size()),
                                  rmt::default_exclusion(q_nominal));
        fitp = rmt::fit_density(hist, rmt::QMode::free, q_nominal);
        emit(dir, "histogram.csv", io::histogram_csv(hist, *fitp));
        emit(dir, "fit_report.json", io::fit_report_json(hist, *fitp, q_nominal));
    } catch (const std::invalid_argument&) {
        // too few eigenvalues for a histogram; the report records the fit as null
    }

    std::optional<double> factorization_residual;
    if (full) {
        const Matrix w1 = pca::loading_matrix(d1).entries;
        const Matrix w2 = pca::loading_matrix(d2).entries;
        const Matrix recon = matmul(matmul(w1, ke0_entries), w2.transposed());
        factorization_residual =
            recon.max_abs_diff(corrmat::lagged_cross(r1, r2, 0).entries);
    }

    auto rows_of = [](const Matrix& m) {
        std::vector<std::vector<double>> out;
        for (std::size_t i = 0; i < m.rows(); ++i)
            out.emplace_back(m.row(i), m.row(i) + m.cols());
        return out;
    };

    ordered_json report;
    report["kept"] = d1.kept;
    report["full_retention"] = full;
    report["factorization_residual"] =
        factorization_residual ? ordered_json(*factorization_residual) : ordered_json(nullptr);
    report["q_nominal"] = q_nominal;
    report["q_fitted"] = fitp ? ordered_json(fitp->q) : ordered_json(nullptr);
    report["q_below_nominal"] = fitp ? ordered_json(fitp->q < 0.9 * q_nominal) : ordered_json(nullptr);
    report["t"] = t;
    report["t_eff_1"] = pca::effective_T(rows_of(d1.components));
    report["t_eff_2"] = pca::effective_T(rows_of(d2.components));
    report["reshuffled"] = reshuffle;
    emit(dir, "pca_report.json", report.dump(2) + "\n");
    return 0;
}

int run_joint(const std::string& a, const std::string& b, std::size_t top,
              const std::string& out) {
    const std::string dir = prepare_out_dir(out);
    const auto [r1, r2] = load_pair(a, b);
    const auto jm = corrmat::joint_matrix(r1, r2);
    const auto se = eig::eig_symmetric(jm.entries);
    if (top == 0 || top > se.eigenvalues.size())
        throw std::runtime_error("--top must be between 1 and " +
                                 std::to_string(se.eigenvalues.size()));

    eig::ComplexSpectrum js;
    for (double lam : se.eigenvalues) js.eigenvalues.emplace_back(lam, 0.0);
    js.source_dims = eig::SourceDims{2 * jm.block_size, r1.t(), 0};
    emit(dir, "joint_spectrum.csv", io::spectrum_csv(js));

    for (std::size_t i = 0; i < top; ++i)
        emit(dir, "joint_vector_" + std::to_string(i) + ".csv",
             io::joint_vector_csv(se, jm.block_size, i));
    emit(dir, "joint_summary.json", io::joint_summary_json(se, jm.block_size, top));
    return 0;
}

int run_mc_validate(std::size_t n, std::size_t t, std::size_t reps, std::uint64_t seed,
                    double q_overlay, const std::string& out) {
    if (n < 2 || t < 2 || reps < 1)
        throw std::runtime_error("mc-validate requires --n >= 2, --t >= 2, --reps >= 1");
    const std::string dir = prepare_out_dir(out);

    std::vector<eig::ComplexSpectrum> pool(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        const auto [r1, r2] = resample::generate_null(n, t, seed + rep);
        auto k = corrmat::lagged_cross(r1, r2, 0);
        pool[rep] = eig::eig_general(std::move(k.entries));
    }

    const double q_nominal = static_cast<double>(t) / static_cast<double>(n);
    const double q_used = q_overlay > 0.0 ? q_overlay : q_nominal;

    eig::ComplexSpectrum cloud;
    cloud.source_dims = eig::SourceDims{n, t, 0};
    for (const auto& s : pool)
        cloud.eigenvalues.insert(cloud.eigenvalues.end(), s.eigenvalues.begin(),
                                 s.eigenvalues.end());
    emit(dir, "spectrum.csv", io::spectrum_csv(cloud));

    const auto hist = rmt::radial_histogram(pool, rmt::default_bin_count(cloud.size()),
                                            rmt::default_exclusion(q_used));
    const auto fitp = rmt::fit_density(hist, rmt::QMode::fixed, q_used);
    emit(dir, "histogram.csv", io::histogram_csv(hist, fitp));
    emit(dir, "fit_report.json", io::fit_report_json(hist, fitp, q_used));

    // A bin of width w receives M*w*rho moduli in expectation, so its density
    // estimate carries sd sqrt(rho/(M*w)); 4x the worst bin's sd, floored at
    // 0.15, separates sampling noise from genuine model mismatch.
    const double w = hist.bin_edges[1] - hist.bin_edges[0];
    const double m_count = static_cast<double>(hist.total_count);
    double gap = 0.0, peak_model = 0.0;
    for (std::size_t bin = 0; bin < hist.densities.size(); ++bin) {
        const double center = 0.5 * (hist.bin_edges[bin] + hist.bin_edges[bin + 1]);
        const double model = rmt::density_effective(center, fitp);
        peak_model = std::max(peak_model, model);
        gap = std::max(gap, std::abs(hist.densities[bin] - model));
    }
    const double threshold = std::max(0.15, 4.0 * std::sqrt(peak_model / (m_count * w)));
    const bool passed = gap <= threshold;

    ordered_json report;
    report["n"] = n;
    report["t"] = t;
    report["reps"] = reps;
    report["seed"] = seed;
    report["q_nominal"] = q_nominal;
    report["q_used"] = q_used;
    report["h_fitted"] = fitp.h;
    report["gap"] = gap;
    report["threshold"] = threshold;
    report["passed"] = passed;
    emit(dir, "validation.json", report.dump(2) + "\n");

    if (!passed) {
        std::cerr << "validation failed: histogram/model gap " << gap << " exceeds "
                  << threshold << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lagged asymmetric correlation spectra between two systems"};
    app.require_subcommand(1);
    int rc = 0;

    struct SpectrumArgs {
        std::string config, a, b, fit = "fixed", out;
        long tau = 0;
        std::size_t boot = 0, subset = 0;
        std::uint64_t seed = 0;
    } sp;
    auto* sp_cmd = app.add_subcommand(
        "spectrum", "Eigenvalue cloud, radial histogram, and density fit of k(tau)");
    auto* sp_config = sp_cmd->add_option("--config", sp.config, "JSON config file");
    auto* sp_a = sp_cmd->add_option("--a", sp.a, "system 1 input CSV");
    auto* sp_b = sp_cmd->add_option("--b", sp.b, "system 2 input CSV");
    auto* sp_tau = sp_cmd->add_option("--tau", sp.tau, "lag of k(tau)");
    auto* sp_boot = sp_cmd->add_option("--boot", sp.boot, "bootstrap iterations (0 = none)");
    auto* sp_subset =
        sp_cmd->add_option("--subset", sp.subset, "bootstrap subset size (0 = full N)");
    auto* sp_seed = sp_cmd->add_option("--seed", sp.seed, "bootstrap RNG seed");
    auto* sp_fit = sp_cmd->add_option("--fit", sp.fit, "fit mode: fixed | free")
                       ->check(CLI::IsMember({"fixed", "free"}));
    auto* sp_out = sp_cmd->add_option("--out", sp.out, "output directory");
    sp_cmd->callback([&]() {
        const json cfg = load_config(sp.config);
        fill(cfg, sp_a, "a", sp.a);
        fill(cfg, sp_b, "b", sp.b);
        fill(cfg, sp_tau, "tau", sp.tau);
        fill(cfg, sp_boot, "boot", sp.boot);
        fill(cfg, sp_subset, "subset", sp.subset);
        fill(cfg, sp_seed, "seed", sp.seed);
        fill(cfg, sp_fit, "fit", sp.fit);
        fill(cfg, sp_out, "out", sp.out);
        rc = run_spectrum(sp.a, sp.b, sp.tau, sp.boot, sp.subset, sp.seed, sp.fit, sp.out);
    });

    struct MaxeigArgs {
        std::string config, a, b, out;
        long tau_min = 0, tau_max = 0;
    } mx;
    auto* mx_cmd =
        app.add_subcommand("maxeig", "lambda_MAX of k(tau) over a lag range");
    auto* mx_config = mx_cmd->add_option("--config", mx.config, "JSON config file");
    auto* mx_a = mx_cmd->add_option("--a", mx.a, "system 1 input CSV");
    auto* mx_b = mx_cmd->add_option("--b", mx.b, "system 2 input CSV");
    auto* mx_min = mx_cmd->add_option("--tau-min", mx.tau_min, "smallest lag");
    auto* mx_max = mx_cmd->add_option("--tau-max", mx.tau_max, "largest lag");
    auto* mx_out = mx_cmd->add_option("--out", mx.out, "output directory");
    mx_cmd->callback([&]() {
        const json cfg = load_config(mx.config);
        fill(cfg, mx_a, "a", mx.a);
        fill(cfg, mx_b, "b", mx.b);
        fill(cfg, mx_min, "tau_min", mx.tau_min);
        fill(cfg, mx_max, "tau_max", mx.tau_max);
        fill(cfg, mx_out, "out", mx.out);
        rc = run_maxeig(mx.a, mx.b, mx.tau_min, mx.tau_max, mx.out);
    });

    struct PcaArgs {
        std::string config, a, b, out;
        long tau_max = 50;
        bool reshuffle = false;
        std::uint64_t seed = 0;
    } pc;
    auto* pc_cmd = app.add_subcommand(
        "pca", "PC panels, k^(e)(tau) diagnostics, autocorrelations, PC-space spectrum");
    auto* pc_config = pc_cmd->add_option("--config", pc.config, "JSON config file");
    auto* pc_a = pc_cmd->add_option("--a", pc.a, "system 1 input CSV");
    auto* pc_b = pc_cmd->add_option("--b", pc.b, "system 2 input CSV");
    auto* pc_max = pc_cmd->add_option("--tau-max", pc.tau_max, "lag range for diagnostics");
    auto* pc_resh =
        pc_cmd->add_flag("--reshuffle", pc.reshuffle, "permute time columns before analysis");
    auto* pc_seed = pc_cmd->add_option("--seed", pc.seed, "reshuffle RNG seed");
    auto* pc_out = pc_cmd->add_option("--out", pc.out, "output directory");
    pc_cmd->callback([&]() {
        const json cfg = load_config(pc.config);
        fill(cfg, pc_a, "a", pc.a);
        fill(cfg, pc_b, "b", pc.b);
        fill(cfg, pc_max, "tau_max", pc.tau_max);
        fill(cfg, pc_resh, "reshuffle", pc.reshuffle);
        fill(cfg, pc_seed, "seed", pc.seed);
        fill(cfg, pc_out, "out", pc.out);
        rc = run_pca(pc.a, pc.b, pc.tau_max, pc.reshuffle, pc.seed, pc.out);
    });

    struct JointArgs {
        std::string config, a, b, out;
        std::size_t top = 3;
    } jt;
    auto* jt_cmd = app.add_subcommand(
        "joint", "2N x 2N joint matrix spectrum and leading eigenvector splits");
    auto* jt_config = jt_cmd->add_option("--config", jt.config, "JSON config file");
    auto* jt_a = jt_cmd->add_option("--a", jt.a, "system 1 input CSV");
    auto* jt_b = jt_cmd->add_option("--b", jt.b, "system 2 input CSV");
    auto* jt_top = jt_cmd->add_option("--top", jt.top, "eigenvectors to export");
    auto* jt_out = jt_cmd->add_option("--out", jt.out, "output directory");
    jt_cmd->callback([&]() {
        const json cfg = load_config(jt.config);
        fill(cfg, jt_a, "a", jt.a);
        fill(cfg, jt_b, "b", jt.b);
        fill(cfg, jt_top, "top", jt.top);
        fill(cfg, jt_out, "out", jt.out);
        rc = run_joint(jt.a, jt.b, jt.top, jt.out);
    });

    struct McArgs {
        std::string config, out;
        std::size_t n = 0, t = 0, reps = 0;
        std::uint64_t seed = 0;
        double q = 0.0;
    } mc;
    auto* mc_cmd = app.add_subcommand(
        "mc-validate", "null-ensemble self-test of the spectral stack (exit 2 on mismatch)");
    auto* mc_config = mc_cmd->add_option("--config", mc.config, "JSON config file");
    auto* mc_n = mc_cmd->add_option("--n", mc.n, "panel size N");
    auto* mc_t = mc_cmd->add_option("--t", mc.t, "panel length T");
    auto* mc_reps = mc_cmd->add_option("--reps", mc.reps, "ensemble repetitions");
    auto* mc_seed = mc_cmd->add_option("--seed", mc.seed, "RNG seed");
    auto* mc_q = mc_cmd->add_option("--q", mc.q, "overlay q (default nominal T/N)");
    auto* mc_out = mc_cmd->add_option("--out", mc.out, "output directory");
    mc_cmd->callback([&]() {
        const json cfg = load_config(mc.config);
        fill(cfg, mc_n, "n", mc.n);
        fill(cfg, mc_t, "t", mc.t);
        fill(cfg, mc_reps, "reps", mc.reps);
        fill(cfg, mc_seed, "seed", mc.seed);
        fill(cfg, mc_q, "q", mc.q);
        fill(cfg, mc_out, "out", mc.out);
        rc = run_mc_validate(mc.n, mc.t, mc.reps, mc.seed, mc.q, mc.out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

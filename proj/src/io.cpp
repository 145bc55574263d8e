#include "asymspec/io.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <unordered_set>

#include "json.hpp"

namespace asymspec::io {

namespace {

using ordered_json = nlohmann::ordered_json;

// CSV cells are written verbatim, so separators inside labels are rejected
// rather than quoted.
void check_label(const std::string& s, const char* role) {
    if (s.empty())
        throw std::invalid_argument(std::string("empty ") + role + " label");
    if (s.find_first_of(",\"\n\r") != std::string::npos)
        throw std::invalid_argument(std::string(role) + " label '" + s +
                                    "' contains a CSV separator character");
}

void append_double(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

double parse_double(std::string_view cell, std::size_t line_no) {
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw std::runtime_error("panel csv line " + std::to_string(line_no) +
                                 ": bad numeric cell '" + std::string(cell) + "'");
    return v;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_double(double v) {
    std::string s;
    append_double(s, v);
    return s;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error("cannot write " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

std::string panel_csv(const ingest::ReturnPanel& r) {
    for (const auto& tk : r.tickers) check_label(tk, "ticker");
    for (const auto& d : r.dates) check_label(d, "date");
    std::string out = "ticker";
    for (const auto& d : r.dates) {
        out += ',';
        out += d;
    }
    out += '\n';
    for (std::size_t i = 0; i < r.n(); ++i) {
        out += r.tickers[i];
        for (std::size_t k = 0; k < r.t(); ++k) {
            out += ',';
            append_double(out, r.values(i, k));
        }
        out += '\n';
    }
    return out;
}

std::string panel_sidecar_json(const ingest::ReturnPanel& r) {
    ordered_json j;
    j["system_label"] = r.system_label;
    j["N"] = r.n();
    j["T"] = r.t();
    j["standardized"] = r.standardized;
    return dump(j);
}

ingest::ReturnPanel parse_panel_csv(const std::string& csv, const std::string& sidecar_json,
                                    const std::string& fallback_label) {
    ingest::ReturnPanel r;
    std::istringstream in(csv);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;
    std::unordered_set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_cells(line);
        if (line_no == 1) {
            if (cells[0] != "ticker" || cells.size() < 3)
                throw std::runtime_error(
                    "panel csv line 1: expected header 'ticker,<dates...>'");
            for (std::size_t k = 1; k < cells.size(); ++k)
                r.dates.emplace_back(cells[k]);
            continue;
        }
        if (cells.size() != r.dates.size() + 1)
            throw std::runtime_error("panel csv line " + std::to_string(line_no) + ": " +
                                     std::to_string(cells.size() - 1) + " values for " +
                                     std::to_string(r.dates.size()) + " dates");
        std::string ticker(cells[0]);
        if (ticker.empty() || !seen.insert(ticker).second)
            throw std::runtime_error("panel csv line " + std::to_string(line_no) +
                                     ": empty or duplicate ticker '" + ticker + "'");
        r.tickers.push_back(std::move(ticker));
        auto& row = rows.emplace_back();
        row.reserve(r.dates.size());
        for (std::size_t k = 1; k < cells.size(); ++k)
            row.push_back(parse_double(cells[k], line_no));
    }
    if (rows.empty())
        throw std::runtime_error("panel csv: no data rows");
    r.values = Matrix(rows.size(), r.dates.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < r.dates.size(); ++k) r.values(i, k) = rows[i][k];

    if (sidecar_json.empty()) {
        r.system_label = fallback_label;
        return r;
    }
    ordered_json j;
    try {
        j = ordered_json::parse(sidecar_json);
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("panel sidecar: ") + e.what());
    }
    for (const char* key : {"system_label", "N", "T", "standardized"})
        if (!j.contains(key))
            throw std::runtime_error(std::string("panel sidecar: missing key '") + key + "'");
    if (j["N"] != r.n() || j["T"] != r.t())
        throw std::runtime_error("panel sidecar: declares " + j["N"].dump() + "x" +
                                 j["T"].dump() + " but csv is " + std::to_string(r.n()) +
                                 "x" + std::to_string(r.t()));
    r.system_label = j["system_label"].get<std::string>();
    r.standardized = j["standardized"].get<bool>();
    return r;
}

std::string matrix_csv(const Matrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t k = 0; k < m.cols(); ++k) {
            if (k) out += ',';
            append_double(out, m(i, k));
        }
        out += '\n';
    }
    return out;
}

std::string corr_matrix_json(const corrmat::AsymCorrMatrix& k) {
    ordered_json j;
    j["N"] = k.entries.rows();
    j["tau"] = k.lag;
    auto& entries = j["entries"] = ordered_json::array();
    for (std::size_t i = 0; i < k.entries.rows(); ++i)
        for (std::size_t c = 0; c < k.entries.cols(); ++c) entries.push_back(k.entries(i, c));
    return dump(j);
}

std::string spectrum_csv(const eig::ComplexSpectrum& s) {
    std::string out = "re,im\n";
    for (const auto& lam : s.eigenvalues) {
        append_double(out, lam.real());
        out += ',';
        append_double(out, lam.imag());
        out += '\n';
    }
    return out;
}

std::string spectrum_json(const eig::ComplexSpectrum& s) {
    ordered_json j;
    auto& eigs = j["eigenvalues"] = ordered_json::array();
    for (const auto& lam : s.eigenvalues)
        eigs.push_back(ordered_json::array({lam.real(), lam.imag()}));
    if (s.source_dims) {
        j["source_dims"] = {{"n", s.source_dims->n},
                            {"t", s.source_dims->t},
                            {"tau", s.source_dims->tau}};
    } else {
        j["source_dims"] = nullptr;
    }
    return dump(j);
}

std::string maxeig_scan_csv(const std::vector<corrmat::MaxeigScanRow>& rows) {
    std::string out = "tau,abs_lambda_max,re_lambda_max,im_lambda_max,kbar_n\n";
    for (const auto& row : rows) {
        out += std::to_string(row.tau);
        out += ',';
        append_double(out, std::abs(row.lambda_max));
        out += ',';
        append_double(out, row.lambda_max.real());
        out += ',';
        append_double(out, row.lambda_max.imag());
        out += ',';
        append_double(out, row.kbar_times_n);
        out += '\n';
    }
    return out;
}

std::string histogram_csv(const rmt::RadialHistogram& h, const rmt::DensityParams& fit) {
    std::string out = "bin_center,density,model_density\n";
    for (std::size_t b = 0; b < h.densities.size(); ++b) {
        const double center = 0.5 * (h.bin_edges[b] + h.bin_edges[b + 1]);
        append_double(out, center);
        out += ',';
        append_double(out, h.densities[b]);
        out += ',';
        append_double(out, rmt::density_effective(center, fit));
        out += '\n';
    }
    return out;
}

std::string fit_report_json(const rmt::RadialHistogram& h, const rmt::DensityParams& fit,
                            double q_nominal) {
    ordered_json j;
    j["q_nominal"] = q_nominal;
    j["q_fitted"] = fit.q;
    j["h_fitted"] = fit.h;
    if (fit.fit_residual)
        j["residual"] = *fit.fit_residual;
    else
        j["residual"] = nullptr;
    j["n_bins"] = h.densities.size();
    j["n_excluded"] = h.excluded_count;
    j["h_at_bound"] = fit.h_at_bound;
    j["q_at_bound"] = fit.q_at_bound;
    j["poor_fit"] = fit.poor_fit;
    j["integral_deviation"] = fit.integral_deviation;
    return dump(j);
}

ingest::ReturnPanel panel_from_components(const pca::PcaDecomposition& d) {
    ingest::ReturnPanel r;
    r.values = d.components;
    for (std::size_t i = 0; i < d.kept; ++i) r.tickers.push_back("PC" + std::to_string(i + 1));
    r.dates = d.dates;
    r.system_label = d.system_label + "-pc";
    r.standardized = true;
    return r;
}

std::string pc_corr_csv(const std::vector<PcCorrRow>& rows) {
    std::string out = "tau,k11,k22,k12,k21\n";
    for (const auto& row : rows) {
        out += std::to_string(row.tau);
        for (double v : {row.k11, row.k22, row.k12, row.k21}) {
            out += ',';
            append_double(out, v);
        }
        out += '\n';
    }
    return out;
}

std::string autocorr_csv(const std::vector<double>& a, double band) {
    std::string out = "tau,autocorr,band\n";
    for (std::size_t i = 0; i < a.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        append_double(out, a[i]);
        out += ',';
        append_double(out, band);
        out += '\n';
    }
    return out;
}

std::string ensemble_summary_json(const resample::EnsembleResult& e) {
    if (e.per_iteration_maxeig.empty())
        throw std::invalid_argument("ensemble summary: no iterations");
    double mean = 0.0, max = 0.0;
    for (const auto& lam : e.per_iteration_maxeig) {
        const double m = std::abs(lam);
        mean += m;
        max = std::max(max, m);
    }
    const std::size_t n = e.per_iteration_maxeig.size();
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& lam : e.per_iteration_maxeig) {
        const double d = std::abs(lam) - mean;
        var += d * d;
    }
    const double sd = n > 1 ? std::sqrt(var / static_cast<double>(n - 1)) : 0.0;

    ordered_json j;
    j["iterations"] = e.spec.iterations;
    j["subset_size"] = e.spec.subset_size;
    j["seed"] = e.spec.rng_seed;
    j["maxeig"] = {{"mean_abs", mean}, {"sd_abs", sd}, {"max_abs", max}};
    return dump(j);
}

namespace {

void check_joint(const eig::SymEigen& se, std::size_t block) {
    if (block == 0 || se.vectors.rows() != 2 * block)
        throw std::invalid_argument("joint eigenvectors: dimension " +
                                    std::to_string(se.vectors.rows()) +
                                    " is not twice the block size " + std::to_string(block));
}

}  // namespace

std::string joint_vector_csv(const eig::SymEigen& se, std::size_t block, std::size_t index) {
    check_joint(se, block);
    if (index >= se.eigenvalues.size())
        throw std::invalid_argument("joint eigenvectors: index out of range");
    std::string out = "position,system,component\n";
    for (std::size_t p = 0; p < 2 * block; ++p) {
        out += std::to_string(p);
        out += ',';
        out += p < block ? '1' : '2';
        out += ',';
        append_double(out, se.vectors(p, index));
        out += '\n';
    }
    return out;
}

std::string joint_summary_json(const eig::SymEigen& se, std::size_t block,
                               std::size_t top_k) {
    check_joint(se, block);
    if (top_k == 0 || top_k > se.eigenvalues.size())
        throw std::invalid_argument("joint eigenvectors: top_k out of range");
    ordered_json arr = ordered_json::array();
    for (std::size_t i = 0; i < top_k; ++i) {
        ordered_json entry;
        entry["index"] = i;
        entry["eigenvalue"] = se.eigenvalues[i];
        for (int half = 0; half < 2; ++half) {
            std::size_t positive = 0, negative = 0;
            double mean = 0.0;
            const std::size_t lo = half * block;
            for (std::size_t p = lo; p < lo + block; ++p) {
                const double v = se.vectors(p, i);
                if (v > 0.0) ++positive;
                if (v < 0.0) ++negative;
                mean += v;
            }
            mean /= static_cast<double>(block);
            entry[half == 0 ? "half1" : "half2"] = {
                {"positive", positive}, {"negative", negative}, {"mean", mean}};
        }
        arr.push_back(std::move(entry));
    }
    return dump(arr);
}

}  // namespace asymspec::io

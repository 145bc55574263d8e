#include "asymspec/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace asymspec::ingest {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool iso_date_shaped(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    std::ostringstream msg;
    msg << path << ":" << line_no << ": " << what;
    throw std::runtime_error(msg.str());
}

double parse_price(const std::string& path, std::size_t line_no, const std::string& field) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &consumed);
    } catch (const std::exception&) {
        parse_fail(path, line_no, "unparsable price '" + field + "'");
    }
    if (consumed != field.size() || !std::isfinite(v))
        parse_fail(path, line_no, "unparsable price '" + field + "'");
    if (v <= 0.0) parse_fail(path, line_no, "non-positive price '" + field + "'");
    return v;
}

void check_duplicate(const std::string& path, std::size_t line_no,
                     std::set<std::pair<std::string, std::string>>& seen,
                     const std::string& date, const std::string& ticker) {
    if (!seen.emplace(date, ticker).second)
        parse_fail(path, line_no, "duplicate (date, ticker) pair (" + date + ", " + ticker + ")");
}

// dates on which every ticker of the table has a price, ascending
std::vector<std::string> complete_dates(const PriceTable& p) {
    std::set<std::string> tickers;
    for (const auto& obs : p.observations) tickers.insert(obs.ticker);
    std::map<std::string, std::size_t> per_date;
    for (const auto& obs : p.observations) ++per_date[obs.date];
    std::vector<std::string> out;
    for (const auto& [date, count] : per_date)
        if (count == tickers.size()) out.push_back(date);
    return out;
}

}  // namespace

PriceTable load_prices(const std::string& path, PriceFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open price file: " + path);

    PriceTable table;
    table.system_label = path;
    std::set<std::pair<std::string, std::string>> seen;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) parse_fail(path, 1, "empty file");
    ++line_no;
    auto header = split_csv_line(line);

    if (format == PriceFormat::long_csv) {
        if (header.size() != 3 || header[0] != "date" || header[1] != "ticker" ||
            header[2] != "price")
            parse_fail(path, line_no, "expected header 'date,ticker,price'");
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto f = split_csv_line(line);
            if (f.size() != 3) parse_fail(path, line_no, "expected 3 fields");
            if (!iso_date_shaped(f[0]))
                parse_fail(path, line_no, "date '" + f[0] + "' is not YYYY-MM-DD");
            if (f[1].empty()) parse_fail(path, line_no, "empty ticker");
            check_duplicate(path, line_no, seen, f[0], f[1]);
            table.observations.push_back({f[0], f[1], parse_price(path, line_no, f[2])});
        }
    } else {
        if (header.size() < 2 || header[0] != "date")
            parse_fail(path, line_no, "expected header 'date,<ticker>...'");
        std::vector<std::string> tickers(header.begin() + 1, header.end());
        for (const auto& tk : tickers)
            if (tk.empty()) parse_fail(path, line_no, "empty ticker in header");
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            auto f = split_csv_line(line);
            if (f.size() != header.size())
                parse_fail(path, line_no, "expected " + std::to_string(header.size()) + " fields");
            if (!iso_date_shaped(f[0]))
                parse_fail(path, line_no, "date '" + f[0] + "' is not YYYY-MM-DD");
            for (std::size_t j = 0; j < tickers.size(); ++j) {
                if (f[j + 1].empty()) continue;  // missing price: no observation
                check_duplicate(path, line_no, seen, f[0], tickers[j]);
                table.observations.push_back(
                    {f[0], tickers[j], parse_price(path, line_no, f[j + 1])});
            }
        }
    }
    return table;
}

std::pair<PriceTable, PriceTable> align_calendars(const PriceTable& a, const PriceTable& b) {
    if (a.observations.empty() || b.observations.empty())
        throw std::invalid_argument("align_calendars: empty price table");

    auto da = complete_dates(a);
    auto db = complete_dates(b);
    std::vector<std::string> shared;
    std::set_intersection(da.begin(), da.end(), db.begin(), db.end(), std::back_inserter(shared));
    if (shared.empty())
        throw std::runtime_error("align_calendars: empty calendar intersection between '" +
                                 a.system_label + "' and '" + b.system_label + "'");

    std::set<std::string> keep(shared.begin(), shared.end());
    auto filter = [&](const PriceTable& src) {
        PriceTable out;
        out.system_label = src.system_label;
        for (const auto& obs : src.observations)
            if (keep.count(obs.date)) out.observations.push_back(obs);
        std::stable_sort(out.observations.begin(), out.observations.end(),
                         [](const PriceObs& x, const PriceObs& y) {
                             return std::tie(x.date, x.ticker) < std::tie(y.date, y.ticker);
                         });
        return out;
    };
    return {filter(a), filter(b)};
}

ReturnPanel log_returns(const PriceTable& p) {
    if (p.observations.empty()) throw std::invalid_argument("log_returns: empty price table");

    // ticker order: first appearance in the table
    std::vector<std::string> tickers;
    std::set<std::string> seen_tickers;
    for (const auto& obs : p.observations)
        if (seen_tickers.insert(obs.ticker).second) tickers.push_back(obs.ticker);

    auto dates = complete_dates(p);
    std::map<std::pair<std::string, std::string>, double> price_at;
    for (const auto& obs : p.observations) price_at[{obs.ticker, obs.date}] = obs.price;

    for (const auto& tk : tickers) {
        std::size_t have = 0;
        for (const auto& d : dates)
            if (price_at.count({tk, d})) ++have;
        if (have < 2)
            throw std::runtime_error("log_returns: ticker '" + tk +
                                     "' has fewer than 2 prices on the aligned calendar");
    }

    ReturnPanel panel;
    panel.system_label = p.system_label;
    panel.tickers = tickers;
    panel.dates.assign(dates.begin() + 1, dates.end());
    panel.values = Matrix(tickers.size(), dates.size() - 1);
    for (std::size_t i = 0; i < tickers.size(); ++i)
        for (std::size_t t = 0; t + 1 < dates.size(); ++t) {
            double prev = price_at.at({tickers[i], dates[t]});
            double next = price_at.at({tickers[i], dates[t + 1]});
            panel.values(i, t) = std::log(next / prev);
        }
    panel.standardized = false;
    return panel;
}

ReturnPanel standardize(ReturnPanel r) {
    const std::size_t n = r.n(), t = r.t();
    if (n == 0 || t == 0) throw std::invalid_argument("standardize: empty panel");
    for (std::size_t i = 0; i < n; ++i) {
        double* row = r.values.row(i);
        double scale = 0.0;
        for (std::size_t k = 0; k < t; ++k) scale = std::max(scale, std::abs(row[k]));
        double mean = kahan_sum(row, t) / static_cast<double>(t);
        for (std::size_t k = 0; k < t; ++k) row[k] -= mean;
        double sd = std::sqrt(kahan_dot(row, row, t) / static_cast<double>(t));
        if (!(sd > 1e-13 * std::max(1.0, scale))) {
            std::string tk = i < r.tickers.size() ? r.tickers[i] : std::to_string(i);
            throw std::runtime_error("standardize: zero-variance row (ticker '" + tk + "')");
        }
        for (std::size_t k = 0; k < t; ++k) row[k] /= sd;
    }
    r.standardized = true;
    return r;
}

}  // namespace asymspec::ingest

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "asymspec/matrix.hpp"

namespace asymspec::ingest {

struct PriceObs {
    std::string date;
    std::string ticker;
    double price = 0.0;
};

// Raw price observations for one system. Prices are strictly positive and
// (date, ticker) pairs unique; both are enforced at load time.
struct PriceTable {
    std::vector<PriceObs> observations;
    std::string system_label;
};

// N x T return panel; row i belongs to tickers[i], column t to dates[t].
// When standardized, every row has mean 0 and standard deviation 1 under
// the divisor-T convention.
struct ReturnPanel {
    Matrix values;
    std::vector<std::string> tickers;
    std::vector<std::string> dates;
    std::string system_label;
    bool standardized = false;

    std::size_t n() const { return values.rows(); }
    std::size_t t() const { return values.cols(); }
};

enum class PriceFormat { long_csv, wide_csv };

// Parse a price CSV. long_csv: header "date,ticker,price", one observation
// per line. wide_csv: header "date,<ticker>...", one date per line, empty
// cells skipped. Dates must be ISO-8601 (YYYY-MM-DD). Errors carry the
// offending line number.
PriceTable load_prices(const std::string& path, PriceFormat format);

// Restrict both tables to the dates on which every ticker of both tables
// has a price (strict intersection; a missing single price drops the date
// everywhere). Errors if the intersection is empty.
std::pair<PriceTable, PriceTable> align_calendars(const PriceTable& a, const PriceTable& b);

// Log-returns ln(S_t / S_{t-1}) over the table's complete dates (dates on
// which all tickers have prices), one column fewer than dates. Every
// ticker needs at least 2 prices.
ReturnPanel log_returns(const PriceTable& p);

// Shift each row to mean 0 and scale to standard deviation 1 (divisor T).
// Idempotent. A zero-variance row raises, naming the ticker.
ReturnPanel standardize(ReturnPanel r);

}  // namespace asymspec::ingest

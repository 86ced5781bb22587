#pragma once

#include <Eigen/Core>
#include <string>
#include <string_view>
#include <vector>

#include "colmet/dates.hpp"

namespace colmet {

enum class TableFormat { Wide, Long };

// Aligned daily close prices, one row per instrument, one column per date.
// Missing entries are stored as NaN; all present prices are positive.
struct PricePanel {
  std::vector<std::string> tickers;
  std::vector<Date> dates;  // strictly increasing
  Eigen::MatrixXd prices;   // K x (T_tot + 1)
  std::vector<std::string> diagnostics;  // rejected observations, one note each

  Eigen::Index instrument_count() const { return prices.rows(); }
  bool has_price(Eigen::Index instrument, Eigen::Index day) const {
    return prices(instrument, day) == prices(instrument, day);  // not NaN
  }
};

// Daily log returns, K x T_tot. Any return whose source price pair had a
// missing value is exactly zero; dates[t] is the earlier price date of the
// pair forming return t.
struct ReturnMatrix {
  std::vector<std::string> tickers;
  std::vector<Date> dates;  // length T_tot
  Eigen::MatrixXd values;   // K x T_tot

  Eigen::Index instrument_count() const { return values.rows(); }
  Eigen::Index length() const { return values.cols(); }
};

// Read-only column slice of a ReturnMatrix. The window's center timestamp is
// the date at offset length/2 inside the window (the 22nd day of a 42-day
// window, counted from 1).
struct WindowView {
  const ReturnMatrix* source = nullptr;
  Eigen::Index start = 0;  // 0-based column offset
  Eigen::Index length = 0;

  Eigen::Ref<const Eigen::MatrixXd> block() const {
    return source->values.middleCols(start, length);
  }
  Date center_date() const { return source->dates[size_t(start + length / 2)]; }
  Eigen::Index instrument_count() const { return source->instrument_count(); }
};

// Parses a delimited price table (comma or tab, auto-detected).
// Wide format: header `date,TICK1,TICK2,...`, one row per date.
// Long format: header `date,ticker,close`, one row per observation.
// Blank/NA cells become missing entries. A non-positive price rejects that
// observation with a diagnostic; an unparsable date or number is a hard error.
PricePanel parse_price_table(std::string_view text, TableFormat format = TableFormat::Wide);

// Row subset of a panel, preserving row order.
PricePanel select_instruments(const PricePanel& panel, const std::vector<Eigen::Index>& rows);

ReturnMatrix log_returns(const PricePanel& panel);

// All windows of `window_length` return days at the given stride, in
// chronological order. Throws if the series is shorter than one window.
std::vector<WindowView> sliding_windows(const ReturnMatrix& returns, Eigen::Index window_length,
                                        Eigen::Index stride = 1);

}  // namespace colmet

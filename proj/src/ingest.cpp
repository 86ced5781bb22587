#include "colmet/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "colmet/errors.hpp"
#include "colmet/io.hpp"

namespace colmet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  size_t begin = 0;
  while (begin <= text.size()) {
    size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    if (end == text.size()) break;
    begin = end + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

struct WideRow {
  Date date;
  std::vector<double> prices;  // NaN = missing
};

PricePanel parse_wide(const std::vector<std::string>& lines) {
  if (lines.empty()) throw ParseError("empty price table");
  const char delim = detect_delimiter(lines[0]);
  const auto header = split_fields(lines[0], delim);
  if (header.size() < 2) throw ParseError("wide price table needs a date column and at least one ticker");

  PricePanel panel;
  panel.tickers.assign(header.begin() + 1, header.end());
  std::unordered_set<std::string> seen;
  for (const auto& ticker : panel.tickers) {
    if (ticker.empty()) throw ParseError("empty ticker name in header");
    if (!seen.insert(ticker).second) throw ParseError("duplicate ticker '" + ticker + "' in header");
  }

  std::vector<WideRow> rows;
  for (size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = split_fields(lines[li], delim);
    if (fields.size() != header.size()) {
      throw ParseError("line " + std::to_string(li + 1) + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    WideRow row;
    try {
      row.date = parse_date(fields[0]);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(li + 1) + ": " + e.what());
    }
    row.prices.resize(panel.tickers.size(), kNaN);
    for (size_t c = 1; c < fields.size(); ++c) {
      if (is_missing_cell(fields[c])) continue;
      double value;
      try {
        value = parse_double(fields[c], "line " + std::to_string(li + 1));
      } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (ticker " + panel.tickers[c - 1] + ")");
      }
      if (value <= 0.0) {
        panel.diagnostics.push_back("line " + std::to_string(li + 1) + ": non-positive price " +
                                    format_double(value) + " for " + panel.tickers[c - 1] +
                                    " rejected");
        continue;
      }
      row.prices[c - 1] = value;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("price table has no data rows");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const WideRow& a, const WideRow& b) { return a.date < b.date; });
  for (size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].date == rows[r - 1].date) {
      throw ParseError("duplicate date " + format_date(rows[r].date));
    }
  }

  const Eigen::Index k = Eigen::Index(panel.tickers.size());
  const Eigen::Index n = Eigen::Index(rows.size());
  panel.dates.reserve(rows.size());
  panel.prices.resize(k, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    panel.dates.push_back(rows[size_t(c)].date);
    for (Eigen::Index r = 0; r < k; ++r) {
      panel.prices(r, c) = rows[size_t(c)].prices[size_t(r)];
    }
  }
  return panel;
}

PricePanel parse_long(const std::vector<std::string>& lines) {
  if (lines.empty()) throw ParseError("empty price table");
  const char delim = detect_delimiter(lines[0]);
  const auto header = split_fields(lines[0], delim);
  if (header.size() != 3 || header[0] != "date" || header[1] != "ticker" || header[2] != "close") {
    throw ParseError("long price table header must be 'date,ticker,close'");
  }

  struct Observation {
    Date date;
    std::string ticker;
    double price;
  };
  std::vector<Observation> observations;
  std::vector<std::string> diagnostics;
  std::set<Date> dates;
  std::vector<std::string> tickers;  // order of first appearance
  std::unordered_map<std::string, Eigen::Index> ticker_index;

  for (size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = split_fields(lines[li], delim);
    if (fields.size() != 3) {
      throw ParseError("line " + std::to_string(li + 1) + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    }
    Date date;
    try {
      date = parse_date(fields[0]);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(li + 1) + ": " + e.what());
    }
    if (fields[1].empty()) throw ParseError("line " + std::to_string(li + 1) + ": empty ticker");
    if (ticker_index.emplace(fields[1], Eigen::Index(tickers.size())).second) {
      tickers.push_back(fields[1]);
    }
    dates.insert(date);
    if (is_missing_cell(fields[2])) continue;
    const double price = parse_double(fields[2], "line " + std::to_string(li + 1));
    if (price <= 0.0) {
      diagnostics.push_back("line " + std::to_string(li + 1) + ": non-positive price " +
                            format_double(price) + " for " + fields[1] + " rejected");
      continue;
    }
    observations.push_back({date, fields[1], price});
  }
  if (dates.empty() || tickers.empty()) throw ParseError("price table has no data rows");

  PricePanel panel;
  panel.tickers = tickers;
  panel.dates.assign(dates.begin(), dates.end());
  panel.diagnostics = std::move(diagnostics);
  std::map<Date, Eigen::Index> date_index;
  for (Eigen::Index c = 0; c < Eigen::Index(panel.dates.size()); ++c) {
    date_index[panel.dates[size_t(c)]] = c;
  }
  panel.prices.setConstant(Eigen::Index(tickers.size()), Eigen::Index(panel.dates.size()), kNaN);
  for (const auto& obs : observations) {
    const Eigen::Index r = ticker_index.at(obs.ticker);
    const Eigen::Index c = date_index.at(obs.date);
    if (!std::isnan(panel.prices(r, c))) {
      throw ParseError("duplicate observation for " + obs.ticker + " on " + format_date(obs.date));
    }
    panel.prices(r, c) = obs.price;
  }
  return panel;
}

}  // namespace

PricePanel parse_price_table(std::string_view text, TableFormat format) {
  const auto lines = split_lines(text);
  return format == TableFormat::Wide ? parse_wide(lines) : parse_long(lines);
}

PricePanel select_instruments(const PricePanel& panel, const std::vector<Eigen::Index>& rows) {
  PricePanel out;
  out.dates = panel.dates;
  out.prices.resize(Eigen::Index(rows.size()), panel.prices.cols());
  out.tickers.reserve(rows.size());
  for (Eigen::Index r = 0; r < Eigen::Index(rows.size()); ++r) {
    const Eigen::Index src = rows[size_t(r)];
    if (src < 0 || src >= panel.instrument_count()) {
      throw ConfigError("instrument index out of range");
    }
    out.tickers.push_back(panel.tickers[size_t(src)]);
    out.prices.row(r) = panel.prices.row(src);
  }
  return out;
}

ReturnMatrix log_returns(const PricePanel& panel) {
  if (panel.dates.size() < 2) {
    throw ConfigError("need at least 2 price dates to form returns");
  }
  ReturnMatrix returns;
  returns.tickers = panel.tickers;
  returns.dates.assign(panel.dates.begin(), panel.dates.end() - 1);
  const Eigen::Index k = panel.instrument_count();
  const Eigen::Index t_tot = Eigen::Index(panel.dates.size()) - 1;
  returns.values.setZero(k, t_tot);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index t = 0; t < t_tot; ++t) {
      if (panel.has_price(i, t) && panel.has_price(i, t + 1)) {
        returns.values(i, t) = std::log(panel.prices(i, t + 1) / panel.prices(i, t));
      }
    }
  }
  return returns;
}

std::vector<WindowView> sliding_windows(const ReturnMatrix& returns, Eigen::Index window_length,
                                        Eigen::Index stride) {
  if (window_length < 1) throw ConfigError("window length must be positive");
  if (stride < 1) throw ConfigError("stride must be positive");
  if (returns.length() < window_length) {
    throw ConfigError("return series length " + std::to_string(returns.length()) +
                      " is shorter than the window length " + std::to_string(window_length));
  }
  std::vector<WindowView> windows;
  for (Eigen::Index start = 0; start + window_length <= returns.length(); start += stride) {
    windows.push_back(WindowView{&returns, start, window_length});
  }
  return windows;
}

}  // namespace colmet

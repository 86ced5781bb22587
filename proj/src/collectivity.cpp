#include "colmet/collectivity.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "colmet/errors.hpp"
#include "colmet/io.hpp"

namespace colmet {

void Thresholds::validate() const {
  if (!(low_rel > 0.0 && low_rel < high_rel && high_rel < 1.0)) {
    throw ConfigError("thresholds must satisfy 0 < low < high < 1");
  }
  if (!(abs_ble_floor > 0.0)) {
    throw ConfigError("absolute threshold floor must be positive");
  }
}

std::string_view to_string(CriterionLabel label) {
  switch (label) {
    case CriterionLabel::HighCol: return "HighCol";
    case CriterionLabel::LCol: return "LCol";
    case CriterionLabel::HighVal: return "HighVal";
    case CriterionLabel::None: return "None";
  }
  return "None";
}

CriterionLabel criterion_label_from_string(std::string_view text) {
  if (text == "HighCol") return CriterionLabel::HighCol;
  if (text == "LCol") return CriterionLabel::LCol;
  if (text == "HighVal") return CriterionLabel::HighVal;
  if (text == "None" || text.empty()) return CriterionLabel::None;
  throw ParseError("unknown criterion label '" + std::string(text) + "'");
}

bool WindowFlags::any() const {
  return degenerate_rows > 0 || cov_tie || corr_tie || rel_cov_undefined || rel_corr_undefined ||
         neg_cov_offdiag || neg_corr_offdiag;
}

std::string WindowFlags::to_string() const {
  std::vector<std::string> tokens;
  if (degenerate_rows > 0) tokens.push_back("deg_rows:" + std::to_string(degenerate_rows));
  if (cov_tie) tokens.push_back("cov_tie");
  if (corr_tie) tokens.push_back("corr_tie");
  if (rel_cov_undefined) tokens.push_back("rel_cov_undef");
  if (rel_corr_undefined) tokens.push_back("rel_corr_undef");
  if (neg_cov_offdiag) tokens.push_back("neg_cov_offdiag");
  if (neg_corr_offdiag) tokens.push_back("neg_corr_offdiag");
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ';';
    out += tokens[i];
  }
  return out;
}

WindowFlags WindowFlags::from_string(std::string_view text) {
  WindowFlags flags;
  size_t begin = 0;
  while (begin < text.size()) {
    size_t end = text.find(';', begin);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(begin, end - begin);
    if (token.starts_with("deg_rows:")) {
      flags.degenerate_rows = std::stoi(std::string(token.substr(9)));
    } else if (token == "cov_tie") {
      flags.cov_tie = true;
    } else if (token == "corr_tie") {
      flags.corr_tie = true;
    } else if (token == "rel_cov_undef") {
      flags.rel_cov_undefined = true;
    } else if (token == "rel_corr_undef") {
      flags.rel_corr_undefined = true;
    } else if (token == "neg_cov_offdiag") {
      flags.neg_cov_offdiag = true;
    } else if (token == "neg_corr_offdiag") {
      flags.neg_corr_offdiag = true;
    }
    begin = end + 1;
  }
  return flags;
}

CollectivityRecord collectivity_measures(const ModeSplit& cov_split, const ModeSplit& corr_split,
                                         const SymmetricMatrix& cov, const SymmetricMatrix& corr,
                                         Date center_date) {
  const Eigen::Index k = cov.dim();
  if (corr.dim() != k || cov_split.residual.dim() != k || corr_split.residual.dim() != k) {
    throw ConfigError("collectivity measures: matrix dimensions do not match");
  }

  CollectivityRecord rec;
  rec.center_date = center_date;
  rec.cov_mean_offdiag = mean_offdiagonal(cov);
  rec.corr_mean_offdiag = mean_offdiagonal(corr);
  rec.cov_ble = mean_offdiagonal(cov_split.leading);
  rec.cov_b = mean_offdiagonal(cov_split.residual);
  rec.cov_lle = mean_offdiagonal(corr_split.leading);
  rec.cov_l = mean_offdiagonal(corr_split.residual);
  rec.cov_mean_withdiag = mean_with_diagonal(cov);
  rec.corr_mean_withdiag = mean_with_diagonal(corr);
  rec.flags.cov_tie = cov_split.tie_flagged;
  rec.flags.corr_tie = corr_split.tie_flagged;

  if (std::abs(rec.cov_mean_offdiag) >= kRelativeDenominatorFloor) {
    rec.rel_cov_ble = rec.cov_ble / rec.cov_mean_offdiag;
    if (rec.cov_mean_offdiag < 0.0) rec.flags.neg_cov_offdiag = true;
  } else {
    rec.flags.rel_cov_undefined = true;
  }
  if (std::abs(rec.corr_mean_offdiag) >= kRelativeDenominatorFloor) {
    rec.rel_corr_lle = rec.cov_lle / rec.corr_mean_offdiag;
    if (rec.corr_mean_offdiag < 0.0) rec.flags.neg_corr_offdiag = true;
  } else {
    rec.flags.rel_corr_undefined = true;
  }
  return rec;
}

LabelPair classify(const CollectivityRecord& record, const Thresholds& thresholds) {
  thresholds.validate();
  LabelPair labels{CriterionLabel::None, CriterionLabel::None};
  if (record.rel_cov_ble) {
    const double rel = *record.rel_cov_ble;
    if (rel > thresholds.high_rel) {
      labels.cov_label = CriterionLabel::HighCol;
    } else if (rel < thresholds.low_rel) {
      labels.cov_label = CriterionLabel::LCol;
    } else if (record.cov_ble > thresholds.abs_ble_floor) {
      labels.cov_label = CriterionLabel::HighVal;
    }
  }
  if (record.rel_corr_lle) {
    const double rel = *record.rel_corr_lle;
    if (rel > thresholds.high_rel) {
      labels.corr_label = CriterionLabel::HighCol;
    } else if (rel < thresholds.low_rel) {
      labels.corr_label = CriterionLabel::LCol;
    }
  }
  return labels;
}

std::string_view time_evolution_header() {
  return "center_date,cov_mean_offdiag,cov_BLE,cov_B,rel_cov_BLE,corr_mean_offdiag,cov_LLE,cov_L,"
         "rel_corr_LLE,cov_mean_withdiag,corr_mean_withdiag,cov_B2,cov_L2,ipr_market,cov_label,"
         "corr_label,flags";
}

std::vector<CollectivityRecord> parse_time_evolution(std::string_view text) {
  std::istringstream stream{std::string(text)};
  std::string line;
  if (!std::getline(stream, line) || split_fields(line, ',') != split_fields(time_evolution_header(), ',')) {
    throw ParseError("unrecognized time-evolution header");
  }
  const auto optional_field = [](const std::string& cell,
                                 std::string_view what) -> std::optional<double> {
    if (cell.empty()) return std::nullopt;
    return parse_double(cell, what);
  };

  std::vector<CollectivityRecord> records;
  std::size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> f = split_fields(line, ',');
    if (f.size() != 17) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected 17 fields, got " << f.size();
      throw ParseError(msg.str());
    }
    CollectivityRecord rec;
    rec.center_date = parse_date(f[0]);
    rec.cov_mean_offdiag = parse_double(f[1], "cov_mean_offdiag");
    rec.cov_ble = parse_double(f[2], "cov_BLE");
    rec.cov_b = parse_double(f[3], "cov_B");
    rec.rel_cov_ble = optional_field(f[4], "rel_cov_BLE");
    rec.corr_mean_offdiag = parse_double(f[5], "corr_mean_offdiag");
    rec.cov_lle = parse_double(f[6], "cov_LLE");
    rec.cov_l = parse_double(f[7], "cov_L");
    rec.rel_corr_lle = optional_field(f[8], "rel_corr_LLE");
    rec.cov_mean_withdiag = parse_double(f[9], "cov_mean_withdiag");
    rec.corr_mean_withdiag = parse_double(f[10], "corr_mean_withdiag");
    rec.cov_b2 = optional_field(f[11], "cov_B2");
    rec.cov_l2 = optional_field(f[12], "cov_L2");
    rec.ipr_market = optional_field(f[13], "ipr_market");
    rec.cov_label = criterion_label_from_string(f[14]);
    rec.corr_label = criterion_label_from_string(f[15]);
    rec.flags = WindowFlags::from_string(f[16]);
    records.push_back(std::move(rec));
  }
  return records;
}

void write_time_evolution(std::ostream& out, std::span<const CollectivityRecord> records) {
  out << time_evolution_header() << '\n';
  for (const auto& rec : records) {
    out << format_date(rec.center_date) << ',' << format_double(rec.cov_mean_offdiag) << ','
        << format_double(rec.cov_ble) << ',' << format_double(rec.cov_b) << ','
        << format_optional(rec.rel_cov_ble) << ',' << format_double(rec.corr_mean_offdiag) << ','
        << format_double(rec.cov_lle) << ',' << format_double(rec.cov_l) << ','
        << format_optional(rec.rel_corr_lle) << ',' << format_double(rec.cov_mean_withdiag) << ','
        << format_double(rec.corr_mean_withdiag) << ',' << format_optional(rec.cov_b2) << ','
        << format_optional(rec.cov_l2) << ',' << format_optional(rec.ipr_market) << ','
        << to_string(rec.cov_label) << ',' << to_string(rec.corr_label) << ','
        << rec.flags.to_string() << '\n';
  }
}

}  // namespace colmet

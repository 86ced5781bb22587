#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colmet/dates.hpp"
#include "colmet/spectral.hpp"

namespace colmet {

// Relative measures are undefined when the denominator is this small.
inline constexpr double kRelativeDenominatorFloor = 1e-15;

// Classification thresholds; the defaults reproduce the shipped criteria
// but the absolute floor in particular is data-set specific.
struct Thresholds {
  double high_rel = 0.997;
  double low_rel = 0.8;
  double abs_ble_floor = 4.1e-4;

  void validate() const;  // requires 0 < low_rel < high_rel < 1, floor > 0
};

enum class CriterionLabel { HighCol, LCol, HighVal, None };

std::string_view to_string(CriterionLabel label);
CriterionLabel criterion_label_from_string(std::string_view text);

struct WindowFlags {
  int degenerate_rows = 0;       // zero-variance instruments in the window
  bool cov_tie = false;          // degenerate top eigenvalue, covariance side
  bool corr_tie = false;
  bool rel_cov_undefined = false;
  bool rel_corr_undefined = false;
  bool neg_cov_offdiag = false;  // negative denominator of the relative measure
  bool neg_corr_offdiag = false;

  bool any() const;
  std::string to_string() const;  // semicolon-joined tokens, empty if none
  static WindowFlags from_string(std::string_view text);
};

// All per-window measures. cov_* come from the covariance split
// (leading = BLE, residual = B), cov_lle/cov_l from the correlation split;
// the residuals of both splits are covariance matrices, hence the naming.
struct CollectivityRecord {
  Date center_date{};
  double cov_mean_offdiag = 0.0;
  double corr_mean_offdiag = 0.0;
  double cov_ble = 0.0;
  double cov_b = 0.0;
  double cov_lle = 0.0;
  double cov_l = 0.0;
  std::optional<double> rel_cov_ble;   // cov_ble / cov_mean_offdiag
  std::optional<double> rel_corr_lle;  // cov_lle / corr_mean_offdiag
  double cov_mean_withdiag = 0.0;
  double corr_mean_withdiag = 0.0;
  std::optional<double> cov_b2;  // set when a second mode is removed
  std::optional<double> cov_l2;
  std::optional<double> ipr_market;
  WindowFlags flags;
  CriterionLabel cov_label = CriterionLabel::None;
  CriterionLabel corr_label = CriterionLabel::None;
};

// Off-diagonal means of both splits plus full-matrix means. The splits must
// come from the given matrices (dimensions are checked). Relative measures
// with a near-zero denominator are left unset and flagged.
CollectivityRecord collectivity_measures(const ModeSplit& cov_split, const ModeSplit& corr_split,
                                         const SymmetricMatrix& cov, const SymmetricMatrix& corr,
                                         Date center_date);

struct LabelPair {
  CriterionLabel cov_label;
  CriterionLabel corr_label;
};

// Covariance side: HighCol above high_rel, LCol below low_rel, HighVal in
// between when the absolute market measure clears the floor. Correlation
// side has no HighVal. Undefined relative measures classify as None.
LabelPair classify(const CollectivityRecord& record, const Thresholds& thresholds);

// CSV table, one row per record, fixed column order. Undefined values are
// empty fields.
void write_time_evolution(std::ostream& out, std::span<const CollectivityRecord> records);

// Header emitted by write_time_evolution.
std::string_view time_evolution_header();

// Inverse of write_time_evolution; the header must match exactly.
std::vector<CollectivityRecord> parse_time_evolution(std::string_view text);

}  // namespace colmet

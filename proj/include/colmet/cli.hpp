#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "colmet/collectivity.hpp"
#include "colmet/dates.hpp"
#include "colmet/pipeline.hpp"

namespace colmet {

// Shared knobs for the analyze / regress / phases subcommands. Paths stay
// empty unless set on the command line.
struct RunConfig {
  std::string input_path;
  std::string format = "auto";  // auto | wide | long
  std::string index_path;
  std::string periods_path;
  std::string events_path;
  std::string out_dir = ".";
  AnalysisOptions analysis{};
  MediatorKind mediator = MediatorKind::AverageReturn;
  std::optional<Eigen::Index> subsample;
  std::uint64_t seed = 0;
  std::optional<Eigen::Index> dump_matrix;
  bool periods_include_labeled = false;
  Date trajectory_from = make_date(2007, 11, 1);
  Date trajectory_to = make_date(2008, 12, 31);
};

// Parses "high=...,low=...,floor=..."; omitted keys keep their defaults.
Thresholds parse_thresholds_option(const std::string& text);

int cmd_analyze(const RunConfig& config);
int cmd_regress(const RunConfig& config);
int cmd_ensemble(const std::string& config_path, const std::string& out_dir);
int cmd_phases(const RunConfig& config, const std::optional<Thresholds>& reclassify);

// Argument parsing plus error-to-exit-code mapping: data and configuration
// errors exit with 2, anything unexpected with 1.
int run_cli(int argc, const char* const* argv);

}  // namespace colmet

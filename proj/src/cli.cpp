#include "colmet/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string_view>

#include "colmet/ensemble.hpp"
#include "colmet/errors.hpp"
#include "colmet/io.hpp"
#include "colmet/phases.hpp"

namespace colmet {

namespace {

namespace fs = std::filesystem;

void write_text_file(const fs::path& path, std::string_view contents) {
  write_file(path.string(), contents);
}

// Header `date,ticker,close` marks the long format; anything else is wide.
TableFormat detect_table_format(std::string_view text) {
  const std::size_t eol = text.find('\n');
  const std::string_view header = text.substr(0, eol == std::string_view::npos ? text.size() : eol);
  const std::vector<std::string> fields =
      split_fields(header, detect_delimiter(header));
  if (fields.size() == 3 && fields[0] == "date" && fields[1] == "ticker" && fields[2] == "close") {
    return TableFormat::Long;
  }
  return TableFormat::Wide;
}

PricePanel load_panel(const std::string& path, const std::string& format) {
  const std::string text = read_file(path);
  TableFormat table_format;
  if (format == "wide") {
    table_format = TableFormat::Wide;
  } else if (format == "long") {
    table_format = TableFormat::Long;
  } else {
    table_format = detect_table_format(text);
  }
  PricePanel panel = parse_price_table(text, table_format);
  for (const std::string& note : panel.diagnostics) {
    std::cerr << "note: " << path << ": " << note << '\n';
  }
  return panel;
}

ReturnMatrix load_returns(const RunConfig& config) {
  PricePanel panel = load_panel(config.input_path, config.format);
  if (config.subsample) {
    const std::vector<Eigen::Index> rows =
        subsample_rows(panel.instrument_count(), *config.subsample, config.seed);
    panel = select_instruments(panel, rows);
  }
  return log_returns(panel);
}

PeriodTable load_periods(const RunConfig& config) {
  if (config.periods_path.empty()) {
    return PeriodTable::defaults();
  }
  return parse_period_table(read_file(config.periods_path));
}

EventTable load_events(const RunConfig& config) {
  if (config.events_path.empty()) {
    return EventTable::defaults();
  }
  return parse_event_table(read_file(config.events_path));
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  return out.str();
}

// The four phase artifacts shared by `analyze` and `phases`.
void write_phase_outputs(const fs::path& out_dir, std::span<const CollectivityRecord> records,
                         const RunConfig& config, const PeriodTable& periods,
                         const EventTable& events) {
  const std::vector<PhasePoint> cov_points =
      phase_points(records, PhaseSide::Covariance, periods);
  const std::vector<PhasePoint> corr_points =
      phase_points(records, PhaseSide::Correlation, periods);
  {
    std::ostringstream out;
    write_phase_points(out, cov_points, corr_points);
    write_text_file(out_dir / "phase_points.csv", out.str());
  }
  {
    const GroupingResult cov_groups = group_means(records, PhaseSide::Covariance, periods,
                                                  config.periods_include_labeled);
    const GroupingResult corr_groups = group_means(records, PhaseSide::Correlation, periods,
                                                   config.periods_include_labeled);
    std::ostringstream out;
    write_group_means(out, cov_groups, corr_groups);
    write_text_file(out_dir / "phase_centers.csv", out.str());
  }
  {
    const std::vector<TrajectoryPoint> cov_path =
        trajectory(records, PhaseSide::Covariance, config.trajectory_from, config.trajectory_to);
    const std::vector<TrajectoryPoint> corr_path =
        trajectory(records, PhaseSide::Correlation, config.trajectory_from, config.trajectory_to);
    std::ostringstream out;
    write_trajectory(out, cov_path, corr_path);
    write_text_file(out_dir / "trajectory.csv", out.str());
  }
  {
    const EventAnnotations annotations = annotate_events(records, events);
    for (const std::string& warning : annotations.warnings) {
      std::cerr << "warning: " << warning << '\n';
    }
    std::ostringstream out;
    write_events(out, annotations);
    write_text_file(out_dir / "events.csv", out.str());
  }
}

struct EnsembleConfig {
  BlockSpec spec{{3, 3}, {0.4, 0.4}, 0.1, 1.0};
  Eigen::Index t = 42;
  Eigen::Index n_samples = 5000;
  std::uint64_t seed = 1;
  std::vector<Eigen::Index> self_averaging_dims;
};

std::vector<double> parse_double_list(const std::string& text, std::string_view what) {
  std::vector<double> out;
  for (const std::string& cell : split_fields(text, ',')) {
    out.push_back(parse_double(cell, what));
  }
  return out;
}

std::vector<Eigen::Index> parse_index_list(const std::string& text, std::string_view what) {
  std::vector<Eigen::Index> out;
  for (const double value : parse_double_list(text, what)) {
    out.push_back(Eigen::Index(value));
  }
  return out;
}

// key = value lines; '#' starts a comment.
EnsembleConfig parse_ensemble_config(std::string_view text) {
  EnsembleConfig config;
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected key = value";
      throw ParseError(msg.str());
    }
    const auto trim = [](std::string s) {
      const std::size_t first = s.find_first_not_of(" \t\r");
      const std::size_t last = s.find_last_not_of(" \t\r");
      return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "block_sizes") {
      config.spec.block_sizes = parse_index_list(value, key);
    } else if (key == "block_values") {
      config.spec.block_values = parse_double_list(value, key);
    } else if (key == "market_offset") {
      config.spec.market_offset = parse_double(value, key);
    } else if (key == "diagonal_value") {
      config.spec.diagonal_value = parse_double(value, key);
    } else if (key == "t") {
      config.t = Eigen::Index(parse_double(value, key));
    } else if (key == "n_samples") {
      config.n_samples = Eigen::Index(parse_double(value, key));
    } else if (key == "seed") {
      config.seed = std::uint64_t(parse_double(value, key));
    } else if (key == "self_averaging_dims") {
      config.self_averaging_dims = parse_index_list(value, key);
    } else {
      std::ostringstream msg;
      msg << "line " << line_no << ": unknown key '" << key << "'";
      throw ParseError(msg.str());
    }
  }
  return config;
}

// Tile the base block pattern up to dimension k, keeping block sizes fixed
// and growing the block count. Fixed-size blocks are what make the off-block
// mean contract with k; growing the blocks instead would keep the sector
// modes macroscopic and the statistic would not self-average.
BlockSpec rescale_spec(const BlockSpec& base, Eigen::Index k) {
  const Eigen::Index base_dim = base.dimension();
  if (k < base_dim) {
    std::ostringstream msg;
    msg << "self-averaging dimension " << k << " is smaller than the base spec dimension "
        << base_dim;
    throw ConfigError(msg.str());
  }
  BlockSpec spec = base;
  spec.block_sizes.clear();
  spec.block_values.clear();
  Eigen::Index filled = 0;
  for (std::size_t b = 0; filled < k; b = (b + 1) % base.block_sizes.size()) {
    const Eigen::Index size = std::min(base.block_sizes[b], k - filled);
    spec.block_sizes.push_back(size);
    spec.block_values.push_back(base.block_values[b]);
    filled += size;
  }
  return spec;
}

fs::path prepare_out_dir(const std::string& out_dir) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

Thresholds parse_thresholds_option(const std::string& text) {
  Thresholds thresholds;
  if (text.empty()) {
    return thresholds;
  }
  for (const std::string& token : split_fields(text, ',')) {
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("threshold token '" + token + "' is not key=value");
    }
    const std::string key = token.substr(0, eq);
    const double value = parse_double(token.substr(eq + 1), key);
    if (key == "high") {
      thresholds.high_rel = value;
    } else if (key == "low") {
      thresholds.low_rel = value;
    } else if (key == "floor") {
      thresholds.abs_ble_floor = value;
    } else {
      throw ConfigError("unknown threshold key '" + key + "'");
    }
  }
  thresholds.validate();
  return thresholds;
}

int cmd_analyze(const RunConfig& config) {
  const fs::path out_dir = prepare_out_dir(config.out_dir);
  const ReturnMatrix returns = load_returns(config);
  const std::vector<CollectivityRecord> records = analyze_all(returns, config.analysis);

  {
    std::ostringstream out;
    write_time_evolution(out, records);
    write_text_file(out_dir / "collectivity.csv", out.str());
  }
  write_phase_outputs(out_dir, records, config, load_periods(config), load_events(config));

  if (config.dump_matrix) {
    const WindowMatrices dumped = window_matrices(returns, *config.dump_matrix,
                                                  config.analysis.window_length,
                                                  config.analysis.stride);
    const std::string stem = "window_" + std::to_string(*config.dump_matrix);
    write_text_file(out_dir / (stem + "_cov.csv"), matrix_csv(dumped.cov.matrix()));
    write_text_file(out_dir / (stem + "_corr.csv"), matrix_csv(dumped.corr.matrix()));
  }
  return 0;
}

int cmd_regress(const RunConfig& config) {
  const fs::path out_dir = prepare_out_dir(config.out_dir);
  if (config.mediator == MediatorKind::IndexReturn && config.index_path.empty()) {
    throw ConfigError("--mediator index requires --index");
  }
  const ReturnMatrix returns = load_returns(config);

  std::optional<ReturnMatrix> index_returns;
  if (config.mediator == MediatorKind::IndexReturn) {
    const PricePanel index_panel = load_panel(config.index_path, "auto");
    if (index_panel.instrument_count() != 1) {
      std::ostringstream msg;
      msg << "index file must hold exactly one instrument, got "
          << index_panel.instrument_count();
      throw ConfigError(msg.str());
    }
    index_returns = log_returns(index_panel);
  }

  const std::vector<RegressionRecord> records = regress_all(
      returns, index_returns ? &*index_returns : nullptr, config.mediator, config.analysis);

  std::ostringstream out;
  write_regression_records(out, records, config.mediator);
  write_text_file(out_dir / "regression.csv", out.str());
  return 0;
}

int cmd_ensemble(const std::string& config_path, const std::string& out_dir) {
  const fs::path dir = prepare_out_dir(out_dir);
  EnsembleConfig config;
  if (!config_path.empty()) {
    config = parse_ensemble_config(read_file(config_path));
  }

  const EnsembleReport report =
      ensemble_mean_check(config.spec, config.t, config.n_samples, config.seed);
  double max_z = 0.0;
  const SymmetricMatrix sigma0 = build_population(config.spec);
  for (Eigen::Index i = 0; i < report.mean_estimate.rows(); ++i) {
    for (Eigen::Index j = 0; j < report.mean_estimate.cols(); ++j) {
      const double se = report.standard_errors(i, j);
      if (se > 0.0) {
        max_z = std::max(max_z, std::abs(report.mean_estimate(i, j) - sigma0(i, j)) / se);
      }
    }
  }

  {
    std::ostringstream out;
    out << "key,value\n";
    out << "sample_count," << report.sample_count << '\n';
    out << "t," << config.t << '\n';
    out << "max_abs_deviation," << format_double(report.max_abs_deviation) << '\n';
    out << "max_abs_z," << format_double(max_z) << '\n';
    out << "scalar_mean_estimate," << format_double(report.scalar_mean_estimate) << '\n';
    out << "scalar_mean_analytic," << format_double(report.scalar_mean_analytic) << '\n';
    out << "scalar_standard_error," << format_double(report.scalar_standard_error) << '\n';
    write_text_file(dir / "ensemble_report.csv", out.str());
  }
  write_text_file(dir / "ensemble_mean.csv", matrix_csv(report.mean_estimate));
  write_text_file(dir / "ensemble_se.csv", matrix_csv(report.standard_errors));

  if (!config.self_averaging_dims.empty()) {
    std::vector<BlockSpec> specs;
    specs.reserve(config.self_averaging_dims.size());
    for (const Eigen::Index k : config.self_averaging_dims) {
      specs.push_back(rescale_spec(config.spec, k));
    }
    const SelfAveragingReport self_avg = self_averaging_check(specs, config.t, config.seed);
    std::ostringstream out;
    out << "dimension,offblock_mean,applicable\n";
    for (const SelfAveragingPoint& point : self_avg.points) {
      out << point.dimension << ',' << format_double(point.offblock_mean) << ','
          << (point.applicable ? 1 : 0) << '\n';
    }
    write_text_file(dir / "self_averaging.csv", out.str());
  }
  return 0;
}

int cmd_phases(const RunConfig& config, const std::optional<Thresholds>& reclassify) {
  const fs::path out_dir = prepare_out_dir(config.out_dir);
  std::vector<CollectivityRecord> records = parse_time_evolution(read_file(config.input_path));
  if (reclassify) {
    for (CollectivityRecord& record : records) {
      const LabelPair labels = classify(record, *reclassify);
      record.cov_label = labels.cov_label;
      record.corr_label = labels.corr_label;
    }
  }
  write_phase_outputs(out_dir, records, config, load_periods(config), load_events(config));
  return 0;
}

namespace {

void add_common_options(CLI::App& cmd, RunConfig& config, std::string& thresholds_text) {
  cmd.add_option("--input", config.input_path, "price table (CSV/TSV, wide or long)")
      ->required();
  cmd.add_option("--format", config.format, "input layout; auto sniffs the header")
      ->check(CLI::IsMember({"auto", "wide", "long"}))
      ->capture_default_str();
  cmd.add_option("--window", config.analysis.window_length, "window length in return days")
      ->capture_default_str();
  cmd.add_option("--stride", config.analysis.stride, "window start step")
      ->capture_default_str();
  cmd.add_option("--thresholds", thresholds_text,
                 "criterion thresholds, e.g. high=0.997,low=0.8,floor=4.1e-4");
  cmd.add_option("--subsample", config.subsample, "analyze a random instrument subset");
  cmd.add_option("--seed", config.seed, "seed for all randomness")->capture_default_str();
  cmd.add_option("--out", config.out_dir, "output directory")->capture_default_str();
  cmd.add_option("--threads", config.analysis.threads, "worker threads")
      ->capture_default_str();
}

void add_phase_options(CLI::App& cmd, RunConfig& config, std::string& from_text,
                       std::string& to_text) {
  cmd.add_option("--periods", config.periods_path, "custom period table");
  cmd.add_option("--events", config.events_path, "custom event table");
  cmd.add_flag("--periods-include-labeled", config.periods_include_labeled,
               "count criterion-labeled windows toward period means too");
  cmd.add_option("--traj-from", from_text, "trajectory start date")
      ->capture_default_str();
  cmd.add_option("--traj-to", to_text, "trajectory end date")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"collectivity measures for rolling covariance/correlation matrices"};
  app.require_subcommand(1);

  RunConfig analyze_config;
  std::string analyze_thresholds;
  std::string analyze_from = format_date(analyze_config.trajectory_from);
  std::string analyze_to = format_date(analyze_config.trajectory_to);
  CLI::App* analyze = app.add_subcommand("analyze", "full collectivity pipeline");
  add_common_options(*analyze, analyze_config, analyze_thresholds);
  add_phase_options(*analyze, analyze_config, analyze_from, analyze_to);
  analyze->add_option("--modes", analyze_config.analysis.modes,
                      "removed-mode depth: 2 adds the *_B2/*_L2 columns")
      ->capture_default_str();
  analyze->add_option("--dump-matrix", analyze_config.dump_matrix,
                      "also write the covariance/correlation matrices of this window index");

  RunConfig regress_config;
  std::string regress_thresholds;
  std::string mediator_name = "avg";
  CLI::App* regress = app.add_subcommand("regress", "regression-baseline collectivity");
  add_common_options(*regress, regress_config, regress_thresholds);
  regress->add_option("--mediator", mediator_name, "common mediator: avg or index")
      ->check(CLI::IsMember({"avg", "index"}))
      ->capture_default_str();
  regress->add_option("--index", regress_config.index_path,
                      "index price series (needed for --mediator index)");

  std::string ensemble_config_path;
  std::string ensemble_out = ".";
  CLI::App* ensemble = app.add_subcommand("ensemble", "random-matrix validation");
  ensemble->add_option("--input", ensemble_config_path,
                       "block-spec config file (key = value); defaults used when absent");
  ensemble->add_option("--out", ensemble_out, "output directory")->capture_default_str();

  RunConfig phases_config;
  std::string phases_thresholds;
  std::string phases_from = format_date(phases_config.trajectory_from);
  std::string phases_to = format_date(phases_config.trajectory_to);
  CLI::App* phases = app.add_subcommand("phases", "re-aggregate an existing collectivity CSV");
  phases->add_option("--input", phases_config.input_path, "collectivity CSV from analyze")
      ->required();
  phases->add_option("--thresholds", phases_thresholds,
                     "reclassify records before grouping, e.g. high=0.997,low=0.8,floor=4.1e-4");
  phases->add_option("--out", phases_config.out_dir, "output directory")->capture_default_str();
  add_phase_options(*phases, phases_config, phases_from, phases_to);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (analyze->parsed()) {
      analyze_config.analysis.thresholds = parse_thresholds_option(analyze_thresholds);
      analyze_config.trajectory_from = parse_date(analyze_from);
      analyze_config.trajectory_to = parse_date(analyze_to);
      return cmd_analyze(analyze_config);
    }
    if (regress->parsed()) {
      regress_config.analysis.thresholds = parse_thresholds_option(regress_thresholds);
      regress_config.mediator =
          mediator_name == "index" ? MediatorKind::IndexReturn : MediatorKind::AverageReturn;
      return cmd_regress(regress_config);
    }
    if (ensemble->parsed()) {
      return cmd_ensemble(ensemble_config_path, ensemble_out);
    }
    phases_config.trajectory_from = parse_date(phases_from);
    phases_config.trajectory_to = parse_date(phases_to);
    std::optional<Thresholds> reclassify;
    if (!phases_thresholds.empty()) {
      reclassify = parse_thresholds_option(phases_thresholds);
    }
    return cmd_phases(phases_config, reclassify);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace colmet

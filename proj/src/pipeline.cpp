#include "colmet/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "colmet/errors.hpp"
#include "colmet/io.hpp"
#include "colmet/rng.hpp"
#include "colmet/spectral.hpp"

namespace colmet {

void AnalysisOptions::validate(Eigen::Index instrument_count) const {
  if (window_length < 2) {
    throw ConfigError("window length must be at least 2");
  }
  if (stride < 1) {
    throw ConfigError("stride must be at least 1");
  }
  if (threads < 1) {
    throw ConfigError("thread count must be at least 1");
  }
  if (modes != 1 && modes != 2) {
    throw ConfigError("modes must be 1 or 2");  // output schema stops at *_B2 / *_L2
  }
  thresholds.validate();
  if (instrument_count < 2) {
    throw ConfigError("analysis needs at least two instruments");
  }
  if (modes == 2 && instrument_count < 3) {
    throw ConfigError("second-mode removal needs at least three instruments");
  }
}

CollectivityRecord analyze_window(const WindowView& window, const Thresholds& thresholds,
                                  int modes) {
  const SymmetricMatrix cov = covariance(demean_rows(window));
  const StandardizeResult standardized = standardize_rows(window);
  const SymmetricMatrix corr = correlation(standardized.values);

  const SpectralDecomposition cov_modes = eigendecompose(cov, "window covariance");
  const SpectralDecomposition corr_modes = eigendecompose(corr, "window correlation");
  const ModeSplit cov_split = split_market_mode(cov_modes);
  const ModeSplit corr_split = split_market_mode(corr_modes);

  CollectivityRecord record =
      collectivity_measures(cov_split, corr_split, cov, corr, window.center_date());
  record.flags.degenerate_rows = int(standardized.degenerate_rows.size());
  record.ipr_market = ipr(cov_modes.market_mode());

  if (modes >= 2) {
    record.cov_b2 = mean_offdiagonal(remove_leading_modes(cov_modes, 2).residual);
    record.cov_l2 = mean_offdiagonal(remove_leading_modes(corr_modes, 2).residual);
  }

  const LabelPair labels = classify(record, thresholds);
  record.cov_label = labels.cov_label;
  record.corr_label = labels.corr_label;
  return record;
}

namespace {

// Runs `work(i)` for i in [0, count) on `threads` workers. Exceptions are
// captured and rethrown on the calling thread.
void parallel_for(Eigen::Index count, int threads, const std::function<void(Eigen::Index)>& work) {
  const int worker_count = int(std::min<Eigen::Index>(threads, std::max<Eigen::Index>(count, 1)));
  if (worker_count <= 1) {
    for (Eigen::Index i = 0; i < count; ++i) {
      work(i);
    }
    return;
  }

  std::atomic<Eigen::Index> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  const auto worker = [&]() {
    while (true) {
      const Eigen::Index i = next.fetch_add(1);
      if (i >= count) {
        return;
      }
      try {
        work(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(std::size_t(worker_count));
  for (int w = 0; w < worker_count; ++w) {
    pool.emplace_back(worker);
  }
  for (std::thread& thread : pool) {
    thread.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace

std::vector<CollectivityRecord> analyze_all(const ReturnMatrix& returns,
                                            const AnalysisOptions& options) {
  options.validate(returns.instrument_count());
  const std::vector<WindowView> windows =
      sliding_windows(returns, options.window_length, options.stride);

  std::vector<CollectivityRecord> records(windows.size());
  parallel_for(Eigen::Index(windows.size()), options.threads, [&](Eigen::Index i) {
    records[std::size_t(i)] = analyze_window(windows[std::size_t(i)], options.thresholds,
                                             options.modes);
  });
  return records;
}

std::vector<RegressionRecord> regress_all(const ReturnMatrix& returns,
                                          const ReturnMatrix* index_returns, MediatorKind kind,
                                          const AnalysisOptions& options) {
  options.validate(returns.instrument_count());
  if (kind == MediatorKind::IndexReturn && index_returns == nullptr) {
    throw ConfigError("index mediator requires an index return series");
  }
  const std::vector<WindowView> windows =
      sliding_windows(returns, options.window_length, options.stride);

  std::vector<RegressionRecord> records(windows.size());
  parallel_for(Eigen::Index(windows.size()), options.threads, [&](Eigen::Index i) {
    const WindowView& window = windows[std::size_t(i)];
    const MediatorSeries mediator = kind == MediatorKind::AverageReturn
                                        ? mediator_average(window)
                                        : mediator_index(*index_returns, window);
    const RegressionFit fit = regress_residuals(window, mediator);

    RegressionRecord record;
    record.center_date = window.center_date();
    record.residual_corr_mean = residual_collectivity(fit);
    record.mediator_degenerate = fit.mediator_degenerate;

    const StandardizeResult standardized = standardize_rows(window);
    const SymmetricMatrix corr = correlation(standardized.values);
    const SpectralDecomposition corr_modes = eigendecompose(corr, "window correlation");
    record.cov_lle = mean_offdiagonal(split_market_mode(corr_modes).leading);
    records[std::size_t(i)] = std::move(record);
  });
  return records;
}

std::vector<Eigen::Index> subsample_rows(Eigen::Index total, Eigen::Index count,
                                         std::uint64_t seed) {
  if (count < 1 || count > total) {
    std::ostringstream msg;
    msg << "subsample size " << count << " out of range for " << total << " instruments";
    throw ConfigError(msg.str());
  }
  std::vector<Eigen::Index> indices(static_cast<std::size_t>(total));
  std::iota(indices.begin(), indices.end(), Eigen::Index(0));

  // Partial Fisher-Yates: after i steps the first i entries are a uniform
  // draw without replacement.
  std::mt19937_64 gen(mix_seed(seed));
  for (Eigen::Index i = 0; i < count; ++i) {
    const std::uint64_t span = std::uint64_t(total - i);
    const Eigen::Index j = i + Eigen::Index(gen() % span);
    std::swap(indices[std::size_t(i)], indices[std::size_t(j)]);
  }
  indices.resize(std::size_t(count));
  std::sort(indices.begin(), indices.end());
  return indices;
}

WindowMatrices window_matrices(const ReturnMatrix& returns, Eigen::Index window_index,
                               Eigen::Index window_length, Eigen::Index stride) {
  const std::vector<WindowView> windows = sliding_windows(returns, window_length, stride);
  if (window_index < 0 || std::size_t(window_index) >= windows.size()) {
    std::ostringstream msg;
    msg << "window index " << window_index << " out of range (have " << windows.size()
        << " windows)";
    throw ConfigError(msg.str());
  }
  const WindowView& window = windows[std::size_t(window_index)];
  const StandardizeResult standardized = standardize_rows(window);
  return WindowMatrices{covariance(demean_rows(window)), correlation(standardized.values),
                        window.center_date()};
}

void write_regression_records(std::ostream& out, std::span<const RegressionRecord> records,
                              MediatorKind kind) {
  const std::string_view column =
      kind == MediatorKind::AverageReturn ? "corr_LinR1" : "corr_LinR2";
  out << "center_date," << column << ",cov_LLE,mediator_degenerate\n";
  for (const RegressionRecord& record : records) {
    out << format_date(record.center_date) << ',' << format_optional(record.residual_corr_mean)
        << ',' << format_double(record.cov_lle) << ',' << (record.mediator_degenerate ? 1 : 0)
        << '\n';
  }
}

}  // namespace colmet

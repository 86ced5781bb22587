#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colmet/collectivity.hpp"
#include "colmet/dates.hpp"

namespace colmet {

struct Period {
  std::string label;
  std::string description;
  Date start{};
  Date end{};  // inclusive
};

// Non-overlapping date intervals; the defaults carve 1990-2021 into seven
// contiguous regimes. Custom tables may leave gaps.
struct PeriodTable {
  std::vector<Period> periods;

  static PeriodTable defaults();
  void validate() const;
};

struct Event {
  std::string label;
  std::string description;
  Date date{};
};

struct EventTable {
  std::vector<Event> events;

  static EventTable defaults();
};

// Delimited text with headers `label,description,start_date,end_date` /
// `label,description,date`; the same delimiter detection as price tables.
PeriodTable parse_period_table(std::string_view text);
EventTable parse_event_table(std::string_view text);

// Label of the period containing the date, if any.
std::optional<std::string> assign_period(Date ts, const PeriodTable& table);

// Which pair of measures a diagram plots: the covariance split
// (x = cov_BLE, y = cov_B) or the correlation split (x = cov_LLE, y = cov_L).
enum class PhaseSide { Covariance, Correlation };

std::string_view to_string(PhaseSide side);
double phase_x(const CollectivityRecord& record, PhaseSide side);
double phase_y(const CollectivityRecord& record, PhaseSide side);
CriterionLabel phase_label(const CollectivityRecord& record, PhaseSide side);

struct PhasePoint {
  Date timestamp{};
  double x = 0.0;
  double y = 0.0;
  std::string group;  // criterion label, period label, or "unassigned"
};

// One point per record. Criterion-labeled windows get their criterion as
// group; the rest get their period, or "unassigned" outside all periods.
std::vector<PhasePoint> phase_points(std::span<const CollectivityRecord> records, PhaseSide side,
                                     const PeriodTable& periods);

struct GroupMean {
  std::string group;
  double mean_x = 0.0;
  double mean_y = 0.0;
  std::size_t count = 0;
};

struct GroupingResult {
  std::vector<GroupMean> groups;   // criterion groups, then periods in table order
  std::vector<std::string> notes;  // one per omitted empty group
};

// Arithmetic mean of (x, y) per group. By default criterion-labeled windows
// are kept out of the period groups; labeled_join_periods lets them count
// toward both.
GroupingResult group_means(std::span<const CollectivityRecord> records, PhaseSide side,
                           const PeriodTable& periods, bool labeled_join_periods = false);

struct TrajectoryPoint {
  Date timestamp{};
  double x = 0.0;
  double y = 0.0;
  double dx = 0.0;  // displacement to the next point; zero for the last
  double dy = 0.0;
};

// Chronological phase-space path of the windows centered in [from, to].
std::vector<TrajectoryPoint> trajectory(std::span<const CollectivityRecord> records,
                                        PhaseSide side, Date from, Date to);

struct EventMarker {
  std::string label;
  std::string description;
  Date event_date{};
  Date center_date{};  // nearest window center; ties resolve to the earlier
};

struct EventAnnotations {
  std::vector<EventMarker> markers;
  std::vector<std::string> warnings;  // events outside the covered range
};

EventAnnotations annotate_events(std::span<const CollectivityRecord> records,
                                 const EventTable& table);

// CSV writers for the four phase artifacts; each file carries both diagram
// sides behind a `side` column. Points and trajectories get a log10(x)
// convenience column, empty when x is not positive.
void write_phase_points(std::ostream& out, std::span<const PhasePoint> cov_points,
                        std::span<const PhasePoint> corr_points);
void write_group_means(std::ostream& out, const GroupingResult& cov_grouping,
                       const GroupingResult& corr_grouping);
void write_trajectory(std::ostream& out, std::span<const TrajectoryPoint> cov_path,
                      std::span<const TrajectoryPoint> corr_path);
void write_events(std::ostream& out, const EventAnnotations& annotations);

}  // namespace colmet

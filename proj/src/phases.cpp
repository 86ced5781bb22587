#include "colmet/phases.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "colmet/errors.hpp"
#include "colmet/io.hpp"

namespace colmet {

namespace {

constexpr std::string_view kUnassignedGroup = "unassigned";

Period make_period(std::string label, std::string description, std::string_view start,
                   std::string_view end) {
  Period p;
  p.label = std::move(label);
  p.description = std::move(description);
  p.start = parse_date(start);
  p.end = parse_date(end);
  return p;
}

std::string log10_or_empty(double x) {
  return x > 0.0 ? format_double(std::log10(x)) : std::string();
}

}  // namespace

PeriodTable PeriodTable::defaults() {
  PeriodTable table;
  table.periods = {
      make_period("P1", "Nineties", "1990-01-31", "2000-02-08"),
      make_period("P2", "Post Dot-com bubble burst", "2000-02-09", "2002-10-09"),
      make_period("P3", "Pre-Lehman crash", "2002-10-10", "2007-10-31"),
      make_period("PA", "Precursor period", "2007-11-01", "2008-08-14"),
      make_period("P4", "Post-Lehman crash", "2008-08-15", "2015-08-18"),
      make_period("P5", "Post-China crisis", "2015-08-19", "2020-01-22"),
      make_period("P6", "Post 2020 stock market crash", "2020-01-23", "2021-07-08"),
  };
  return table;
}

void PeriodTable::validate() const {
  for (const Period& p : periods) {
    if (p.label.empty()) {
      throw ConfigError("period with empty label");
    }
    if (p.end < p.start) {
      throw ConfigError("period " + p.label + " ends before it starts");
    }
  }
  // Intervals are inclusive on both ends, so any shared day is an overlap.
  std::vector<const Period*> sorted;
  sorted.reserve(periods.size());
  for (const Period& p : periods) {
    sorted.push_back(&p);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Period* a, const Period* b) { return a->start < b->start; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->start <= sorted[i - 1]->end) {
      throw ConfigError("periods " + sorted[i - 1]->label + " and " + sorted[i]->label +
                        " overlap");
    }
  }
}

EventTable EventTable::defaults() {
  EventTable table;
  const auto add = [&table](std::string label, std::string description, std::string_view date) {
    table.events.push_back(Event{std::move(label), std::move(description), parse_date(date)});
  };
  add("ER", "Early 1990s recession", "1990-07-15");
  add("AC", "Asian financial crisis", "1997-10-27");
  add("RC", "Russian financial crisis", "1998-08-17");
  add("DC", "Dot-com bubble (before burst)", "2000-03-10");
  add("MD", "Stock market downturn of 2002", "2002-10-09");
  add("A", "Precursor start", "2007-11-01");
  add("LB", "Lehman Brothers crash", "2008-09-16");
  add("ED", "European debt crisis", "2010-04-27");
  add("AF", "August 2011 stock markets fall", "2011-08-01");
  add("FC", "The Great Fall of China", "2015-08-18");
  add("CO", "2020 stock market crash", "2020-02-24");
  return table;
}

PeriodTable parse_period_table(std::string_view text) {
  std::istringstream stream{std::string(text)};
  std::string line;
  if (!std::getline(stream, line)) {
    throw ParseError("period table is empty");
  }
  const char delim = detect_delimiter(line);
  const std::vector<std::string> header = split_fields(line, delim);
  const std::vector<std::string> expected = {"label", "description", "start_date", "end_date"};
  if (header != expected) {
    throw ParseError("period table header must be label,description,start_date,end_date");
  }
  PeriodTable table;
  std::size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::vector<std::string> fields = split_fields(line, delim);
    if (fields.size() != 4) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected 4 fields, got " << fields.size();
      throw ParseError(msg.str());
    }
    try {
      table.periods.push_back(make_period(fields[0], fields[1], fields[2], fields[3]));
    } catch (const ParseError& err) {
      std::ostringstream msg;
      msg << "line " << line_no << ": " << err.what();
      throw ParseError(msg.str());
    }
  }
  table.validate();
  return table;
}

EventTable parse_event_table(std::string_view text) {
  std::istringstream stream{std::string(text)};
  std::string line;
  if (!std::getline(stream, line)) {
    throw ParseError("event table is empty");
  }
  const char delim = detect_delimiter(line);
  const std::vector<std::string> header = split_fields(line, delim);
  const std::vector<std::string> expected = {"label", "description", "date"};
  if (header != expected) {
    throw ParseError("event table header must be label,description,date");
  }
  EventTable table;
  std::size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const std::vector<std::string> fields = split_fields(line, delim);
    if (fields.size() != 3) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected 3 fields, got " << fields.size();
      throw ParseError(msg.str());
    }
    try {
      table.events.push_back(Event{fields[0], fields[1], parse_date(fields[2])});
    } catch (const ParseError& err) {
      std::ostringstream msg;
      msg << "line " << line_no << ": " << err.what();
      throw ParseError(msg.str());
    }
  }
  return table;
}

std::optional<std::string> assign_period(Date ts, const PeriodTable& table) {
  for (const Period& p : table.periods) {
    if (p.start <= ts && ts <= p.end) {
      return p.label;
    }
  }
  return std::nullopt;
}

std::string_view to_string(PhaseSide side) {
  return side == PhaseSide::Covariance ? "cov" : "corr";
}

double phase_x(const CollectivityRecord& record, PhaseSide side) {
  return side == PhaseSide::Covariance ? record.cov_ble : record.cov_lle;
}

double phase_y(const CollectivityRecord& record, PhaseSide side) {
  return side == PhaseSide::Covariance ? record.cov_b : record.cov_l;
}

CriterionLabel phase_label(const CollectivityRecord& record, PhaseSide side) {
  return side == PhaseSide::Covariance ? record.cov_label : record.corr_label;
}

std::vector<PhasePoint> phase_points(std::span<const CollectivityRecord> records, PhaseSide side,
                                     const PeriodTable& periods) {
  periods.validate();
  std::vector<PhasePoint> points;
  points.reserve(records.size());
  for (const CollectivityRecord& record : records) {
    PhasePoint point;
    point.timestamp = record.center_date;
    point.x = phase_x(record, side);
    point.y = phase_y(record, side);
    const CriterionLabel label = phase_label(record, side);
    if (label != CriterionLabel::None) {
      point.group = std::string(to_string(label));
    } else if (auto period = assign_period(record.center_date, periods)) {
      point.group = *period;
    } else {
      point.group = std::string(kUnassignedGroup);
    }
    points.push_back(std::move(point));
  }
  return points;
}

GroupingResult group_means(std::span<const CollectivityRecord> records, PhaseSide side,
                           const PeriodTable& periods, bool labeled_join_periods) {
  periods.validate();

  struct Accumulator {
    double sum_x = 0.0;
    double sum_y = 0.0;
    std::size_t count = 0;
  };
  std::map<std::string, Accumulator> accumulators;
  const auto add = [&accumulators](const std::string& group, double x, double y) {
    Accumulator& acc = accumulators[group];
    acc.sum_x += x;
    acc.sum_y += y;
    ++acc.count;
  };

  for (const CollectivityRecord& record : records) {
    const double x = phase_x(record, side);
    const double y = phase_y(record, side);
    const CriterionLabel label = phase_label(record, side);
    const bool labeled = label != CriterionLabel::None;
    if (labeled) {
      add(std::string(to_string(label)), x, y);
    }
    if (!labeled || labeled_join_periods) {
      if (auto period = assign_period(record.center_date, periods)) {
        add(*period, x, y);
      } else if (!labeled) {
        add(std::string(kUnassignedGroup), x, y);
      }
    }
  }

  // Criterion groups first, then periods in table order, then the leftovers.
  std::vector<std::string> order = {std::string(to_string(CriterionLabel::HighCol)),
                                    std::string(to_string(CriterionLabel::LCol)),
                                    std::string(to_string(CriterionLabel::HighVal))};
  for (const Period& p : periods.periods) {
    order.push_back(p.label);
  }
  order.emplace_back(kUnassignedGroup);

  GroupingResult result;
  for (const std::string& group : order) {
    const auto it = accumulators.find(group);
    if (it == accumulators.end() || it->second.count == 0) {
      result.notes.push_back("group " + group + " is empty");
      continue;
    }
    const Accumulator& acc = it->second;
    result.groups.push_back(GroupMean{group, acc.sum_x / double(acc.count),
                                      acc.sum_y / double(acc.count), acc.count});
  }
  return result;
}

std::vector<TrajectoryPoint> trajectory(std::span<const CollectivityRecord> records,
                                        PhaseSide side, Date from, Date to) {
  if (to < from) {
    throw ConfigError("trajectory range ends before it starts");
  }
  std::vector<TrajectoryPoint> path;
  for (const CollectivityRecord& record : records) {
    if (record.center_date < from || to < record.center_date) {
      continue;
    }
    TrajectoryPoint point;
    point.timestamp = record.center_date;
    point.x = phase_x(record, side);
    point.y = phase_y(record, side);
    path.push_back(point);
  }
  std::sort(path.begin(), path.end(),
            [](const TrajectoryPoint& a, const TrajectoryPoint& b) {
              return a.timestamp < b.timestamp;
            });
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    path[i].dx = path[i + 1].x - path[i].x;
    path[i].dy = path[i + 1].y - path[i].y;
  }
  return path;
}

EventAnnotations annotate_events(std::span<const CollectivityRecord> records,
                                 const EventTable& table) {
  EventAnnotations out;
  if (records.empty()) {
    for (const Event& event : table.events) {
      out.warnings.push_back("event " + event.label + " dropped: no windows");
    }
    return out;
  }
  std::vector<Date> centers;
  centers.reserve(records.size());
  for (const CollectivityRecord& record : records) {
    centers.push_back(record.center_date);
  }
  std::sort(centers.begin(), centers.end());

  for (const Event& event : table.events) {
    if (event.date < centers.front() || centers.back() < event.date) {
      out.warnings.push_back("event " + event.label + " at " + format_date(event.date) +
                             " is outside the covered range");
      continue;
    }
    const auto next = std::lower_bound(centers.begin(), centers.end(), event.date);
    Date best = *next;
    if (next != centers.begin()) {
      const Date prev = *(next - 1);
      // Ties go to the earlier window.
      if ((event.date - prev) <= (best - event.date)) {
        best = prev;
      }
    }
    out.markers.push_back(EventMarker{event.label, event.description, event.date, best});
  }
  return out;
}

namespace {

void write_point_rows(std::ostream& out, std::span<const PhasePoint> points, PhaseSide side) {
  for (const PhasePoint& point : points) {
    out << to_string(side) << ',' << format_date(point.timestamp) << ','
        << format_double(point.x) << ',' << format_double(point.y) << ','
        << log10_or_empty(point.x) << ',' << point.group << '\n';
  }
}

void write_trajectory_rows(std::ostream& out, std::span<const TrajectoryPoint> path,
                           PhaseSide side) {
  for (const TrajectoryPoint& point : path) {
    out << to_string(side) << ',' << format_date(point.timestamp) << ','
        << format_double(point.x) << ',' << format_double(point.y) << ','
        << log10_or_empty(point.x) << ',' << format_double(point.dx) << ','
        << format_double(point.dy) << '\n';
  }
}

}  // namespace

void write_phase_points(std::ostream& out, std::span<const PhasePoint> cov_points,
                        std::span<const PhasePoint> corr_points) {
  out << "side,center_date,x,y,x_log10,group\n";
  write_point_rows(out, cov_points, PhaseSide::Covariance);
  write_point_rows(out, corr_points, PhaseSide::Correlation);
}

void write_group_means(std::ostream& out, const GroupingResult& cov_grouping,
                       const GroupingResult& corr_grouping) {
  out << "side,group,mean_x,mean_y,count\n";
  for (const GroupMean& mean : cov_grouping.groups) {
    out << "cov," << mean.group << ',' << format_double(mean.mean_x) << ','
        << format_double(mean.mean_y) << ',' << mean.count << '\n';
  }
  for (const GroupMean& mean : corr_grouping.groups) {
    out << "corr," << mean.group << ',' << format_double(mean.mean_x) << ','
        << format_double(mean.mean_y) << ',' << mean.count << '\n';
  }
}

void write_trajectory(std::ostream& out, std::span<const TrajectoryPoint> cov_path,
                      std::span<const TrajectoryPoint> corr_path) {
  out << "side,center_date,x,y,x_log10,dx,dy\n";
  write_trajectory_rows(out, cov_path, PhaseSide::Covariance);
  write_trajectory_rows(out, corr_path, PhaseSide::Correlation);
}

void write_events(std::ostream& out, const EventAnnotations& annotations) {
  out << "label,description,event_date,center_date\n";
  for (const EventMarker& marker : annotations.markers) {
    out << marker.label << ",\"" << marker.description << "\"," << format_date(marker.event_date)
        << ',' << format_date(marker.center_date) << '\n';
  }
}

}  // namespace colmet

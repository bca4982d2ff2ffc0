#include "odomfuse/eval.hpp"

#include <algorithm>
#include <cmath>

namespace odomfuse
{

std::vector<double> ErrorSeries::position_errors() const
{
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.position_error());
  return out;
}

double ErrorSeries::max_position_error() const
{
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.position_error());
  return m;
}

double ErrorSeries::max_consecutive_jump() const
{
  double m = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double dx = samples[i].ex - samples[i - 1].ex;
    const double dy = samples[i].ey - samples[i - 1].ey;
    m = std::max(m, std::hypot(dx, dy));
  }
  return m;
}

std::vector<PosePair> associate(const Trajectory& truth, const Trajectory& estimate, double max_gap)
{
  if (truth.empty() || estimate.empty()) {
    throw std::invalid_argument("associate: empty trajectory");
  }
  if (!(max_gap > 0.0)) {
    throw std::invalid_argument("associate: max_gap must be > 0");
  }

  std::vector<PosePair> pairs;
  pairs.reserve(estimate.size());
  const auto& ts = truth.samples;

  for (const auto& es : estimate.samples) {
    auto it = std::lower_bound(ts.begin(), ts.end(), es.stamp,
                               [](const TimedPose& tp, double v) { return tp.stamp < v; });
    // Candidates: the first truth sample at or past the estimate stamp and
    // its predecessor; the nearer wins.
    const TimedPose* best = nullptr;
    if (it != ts.end()) best = &*it;
    if (it != ts.begin()) {
      const TimedPose* prev = &*(it - 1);
      if (best == nullptr || std::abs(prev->stamp - es.stamp) <= std::abs(best->stamp - es.stamp)) {
        best = prev;
      }
    }
    const double offset = es.stamp - best->stamp;
    if (std::abs(offset) <= max_gap) {
      pairs.push_back({es.stamp, best->pose, es.pose, offset});
    }
  }

  if (pairs.empty()) {
    throw NoOverlapError("associate: no estimate sample within max_gap of the truth span");
  }
  return pairs;
}

AteReport ate(const Trajectory& truth, const Trajectory& estimate, double max_gap)
{
  const auto pairs = associate(truth, estimate, max_gap);

  AteReport report;
  report.n_pairs = pairs.size();
  report.per_pair_errors.reserve(pairs.size());
  double sum = 0.0;
  for (const auto& p : pairs) {
    const double d = std::hypot(p.estimate.x - p.truth.x, p.estimate.y - p.truth.y);
    report.per_pair_errors.push_back(d);
    report.max_error = std::max(report.max_error, d);
    sum += d;
  }
  report.ate = sum / static_cast<double>(pairs.size());
  return report;
}

ErrorSeries pose_error_series(const Trajectory& truth, const Trajectory& estimate, double max_gap)
{
  const auto pairs = associate(truth, estimate, max_gap);

  ErrorSeries series;
  series.samples.reserve(pairs.size());
  for (const auto& p : pairs) {
    ErrorSeries::Sample s;
    s.stamp = p.stamp;
    s.ex = p.estimate.x - p.truth.x;
    s.ey = p.estimate.y - p.truth.y;
    s.eyaw = wrap_angle(p.estimate.yaw - p.truth.yaw);
    if (!series.samples.empty() && series.samples.back().stamp == s.stamp) {
      series.samples.back() = s;  // coincident sensor stamps: keep the latest belief
    } else {
      series.samples.push_back(s);
    }
  }
  return series;
}

double default_max_gap(const Trajectory& estimate)
{
  const auto& s = estimate.samples;
  if (s.size() < 2) {
    return 0.5;
  }
  std::vector<double> intervals;
  intervals.reserve(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) {
    intervals.push_back(s[i].stamp - s[i - 1].stamp);
  }
  auto mid = intervals.begin() + static_cast<std::ptrdiff_t>(intervals.size() / 2);
  std::nth_element(intervals.begin(), mid, intervals.end());
  return std::max(0.5 * *mid, 1e-6);
}

ComparisonReport compare_report(const Tagged<Trajectory>& truth, const Tagged<Trajectory>& fused,
                                const Tagged<Trajectory>& vo, const Tagged<MapStatsPair>& map_stats,
                                const Tagged<BuildTimePair>& build_times)
{
  const RunTag& tag = truth.tag;
  if (fused.tag != tag || vo.tag != tag || map_stats.tag != tag || build_times.tag != tag) {
    throw std::invalid_argument("compare_report: inputs come from different scenario runs");
  }

  ComparisonReport report;
  report.tag = tag;

  const AteReport fused_ate = ate(truth.value, fused.value, default_max_gap(fused.value));
  const AteReport vo_ate = ate(truth.value, vo.value, default_max_gap(vo.value));
  report.ate_fused = fused_ate.ate;
  report.ate_vo = vo_ate.ate;
  report.ratio = (vo_ate.ate == 0.0 && fused_ate.ate == 0.0) ? 1.0 : vo_ate.ate / fused_ate.ate;
  report.n_pairs_fused = fused_ate.n_pairs;
  report.n_pairs_vo = vo_ate.n_pairs;

  const ErrorSeries fused_series = pose_error_series(truth.value, fused.value, default_max_gap(fused.value));
  const ErrorSeries vo_series = pose_error_series(truth.value, vo.value, default_max_gap(vo.value));
  report.fused_max_position_error = fused_series.max_position_error();
  report.vo_max_position_error = vo_series.max_position_error();
  report.fused_max_jump = fused_series.max_consecutive_jump();
  report.vo_max_jump = vo_series.max_consecutive_jump();

  report.point_count_low = map_stats.value.low.point_count;
  report.point_count_high = map_stats.value.high.point_count;
  report.point_ratio = static_cast<double>(map_stats.value.high.point_count) /
                       static_cast<double>(map_stats.value.low.point_count);
  report.build_time_fused = build_times.value.fused;
  report.build_time_vo = build_times.value.vo;
  return report;
}

}  // namespace odomfuse

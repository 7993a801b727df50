#include "qps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qps {

FitResult fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                          double t_lo, double t_hi) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit_exponential: times/values length mismatch");
  std::vector<double> t, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= t_lo && times[i] <= t_hi && values[i] > 0.0) {
      t.push_back(times[i]);
      y.push_back(std::log(values[i]));
    }
  }
  const int n = static_cast<int>(t.size());
  if (n < 4)
    throw std::invalid_argument("fit_exponential: need >= 4 positive samples in the window, got " +
                                std::to_string(n));

  const double tbar = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    stt += (t[i] - tbar) * (t[i] - tbar);
    sty += (t[i] - tbar) * (y[i] - ybar);
    syy += (y[i] - ybar) * (y[i] - ybar);
  }
  if (stt <= 0.0) throw std::invalid_argument("fit_exponential: degenerate (zero-variance) times");

  FitResult fit;
  fit.exponent = sty / stt;
  fit.intercept = ybar - fit.exponent * tbar;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.n_used = n;
  const double ss_res = std::max(syy - fit.exponent * sty, 0.0);
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.std_error = n > 2 ? std::sqrt(ss_res / ((n - 2) * stt)) : 0.0;
  return fit;
}

FitResult fit_exponential(const std::vector<double>& times, const RVector& values, double t_lo,
                          double t_hi) {
  return fit_exponential(times, std::vector<double>(values.begin(), values.end()), t_lo, t_hi);
}

std::pair<double, double> saturation_stats(const std::vector<double>& values,
                                           double tail_fraction) {
  if (tail_fraction <= 0.0 || tail_fraction > 1.0)
    throw std::invalid_argument("saturation_stats: tail_fraction must be in (0, 1]");
  const int n = static_cast<int>(values.size());
  const int k = std::max(1, static_cast<int>(std::lround(tail_fraction * n)));
  if (n == 0) throw std::invalid_argument("saturation_stats: empty series");
  double mean = 0.0;
  for (int i = n - k; i < n; ++i) mean += values[i];
  mean /= k;
  double var = 0.0;
  for (int i = n - k; i < n; ++i) var += (values[i] - mean) * (values[i] - mean);
  return {mean, std::sqrt(var / k)};
}

std::pair<double, double> saturation_stats(const RVector& values, double tail_fraction) {
  return saturation_stats(std::vector<double>(values.begin(), values.end()), tail_fraction);
}

int CellMask::count(CellLabel label) const {
  return static_cast<int>(std::count(labels.begin(), labels.end(), label));
}

std::vector<int> CellMask::cells(CellLabel label) const {
  std::vector<int> out;
  for (std::size_t j = 0; j < labels.size(); ++j)
    if (labels[j] == label) out.push_back(static_cast<int>(j));
  return out;
}

CellMask classify_cells(const SectionCloud& cloud, const PhaseSpaceGrid& grid, int min_hits) {
  if (min_hits < 1) throw std::invalid_argument("classify_cells: min_hits must be >= 1");
  std::vector<int> hits(grid.cell_count(), 0);
  for (const PhasePoint& x : cloud.points) ++hits[grid.locate(x.q, x.p)];

  CellMask mask;
  mask.grid = grid;
  mask.min_hits = min_hits;
  mask.labels.resize(grid.cell_count());
  for (int j = 0; j < grid.cell_count(); ++j) {
    mask.labels[j] = hits[j] == 0 ? CellLabel::island
                                  : (hits[j] >= min_hits ? CellLabel::sea : CellLabel::boundary);
  }
  return mask;
}

double island_valley_overlap(const CellMask& mask, const RVector& values, double margin) {
  if (static_cast<int>(mask.labels.size()) != values.size())
    throw std::invalid_argument("island_valley_overlap: mask/values size mismatch");
  if (margin < 1.0) throw std::invalid_argument("island_valley_overlap: margin must be >= 1");
  const std::vector<int> islands = mask.cells(CellLabel::island);
  if (islands.empty()) return 0.0;

  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values(a) < values(b); });
  const std::size_t valley =
      std::min(static_cast<std::size_t>(values.size()),
               static_cast<std::size_t>(std::lround(margin * static_cast<double>(islands.size()))));
  std::vector<char> in_valley(values.size(), 0);
  for (std::size_t i = 0; i < valley; ++i) in_valley[order[i]] = 1;

  int hit = 0;
  for (int j : islands) hit += in_valley[j];
  return static_cast<double>(hit) / static_cast<double>(islands.size());
}

}  // namespace qps

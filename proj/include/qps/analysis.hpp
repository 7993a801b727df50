#pragma once

// Exponent fitting, saturation statistics, and island/sea classification.

#include "qps/classical.hpp"

#include <utility>
#include <vector>

namespace qps {

struct FitResult {
  double exponent = 0.0;   // slope of the log-linear fit
  double intercept = 0.0;  // ln(value) at t = 0
  double r_squared = 0.0;
  double std_error = 0.0;  // standard error of the slope
  double t_lo = 0.0;
  double t_hi = 0.0;
  int n_used = 0;
};

// Least-squares line on (t, ln value) over the strictly positive samples in
// [t_lo, t_hi]; needs at least 4 of them.
FitResult fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                          double t_lo, double t_hi);
FitResult fit_exponential(const std::vector<double>& times, const RVector& values, double t_lo,
                          double t_hi);

// Mean and standard deviation over the trailing fraction of the series.
std::pair<double, double> saturation_stats(const std::vector<double>& values,
                                           double tail_fraction);
std::pair<double, double> saturation_stats(const RVector& values, double tail_fraction);

enum class CellLabel { island, sea, boundary };

struct CellMask {
  PhaseSpaceGrid grid;
  std::vector<CellLabel> labels;
  int min_hits = 1;

  int count(CellLabel label) const;
  std::vector<int> cells(CellLabel label) const;
};

// island = cells never visited by the cloud, sea = visited >= min_hits,
// boundary = visited but fewer times.
CellMask classify_cells(const SectionCloud& cloud, const PhaseSpaceGrid& grid, int min_hits);

// Fraction of island cells found among the lowest-valued
// round(margin * n_island) cells of a section image; 1 means every island
// sits inside the low-value valley region. The margin absorbs cells adjacent
// to an island whose value is dragged down by the island without penalizing
// the score.
double island_valley_overlap(const CellMask& mask, const RVector& values, double margin = 2.0);

}  // namespace qps

#include "qps/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_set>

namespace qps {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_2pi(double x) {
  double y = std::fmod(x, two_pi);
  if (y < 0.0) y += two_pi;
  return y;
}

struct Deriv {
  double dq, dp;
};

Deriv hamilton_rhs(const ClassicalSystem& sys, double q, double p) {
  switch (sys.kind) {
    case SystemKind::lmg_mean_field: {
      const double r2 = 0.25 - p * p;
      if (r2 <= 1e-12)
        throw std::runtime_error("flow: LMG trajectory reached the |p| = 1/2 singularity");
      const double r = std::sqrt(r2);
      return {-p * std::cos(q) / r + 4.0 * sys.xi * p, r * std::sin(q)};
    }
    case SystemKind::inverted_oscillator:
      return {p, q};
    case SystemKind::standard_map:
      break;
  }
  throw std::invalid_argument("hamilton_rhs: standard map has no continuous flow");
}
}  // namespace

ClassicalSystem ClassicalSystem::standard_map(double kick_strength) {
  ClassicalSystem s;
  s.kind = SystemKind::standard_map;
  s.kick_strength = kick_strength;
  return s;
}

ClassicalSystem ClassicalSystem::lmg_mean_field(double xi) {
  ClassicalSystem s;
  s.kind = SystemKind::lmg_mean_field;
  s.xi = xi;
  return s;
}

ClassicalSystem ClassicalSystem::inverted_oscillator() {
  ClassicalSystem s;
  s.kind = SystemKind::inverted_oscillator;
  return s;
}

double ClassicalSystem::hamiltonian(double q, double p) const {
  switch (kind) {
    case SystemKind::lmg_mean_field:
      return std::sqrt(std::max(0.25 - p * p, 0.0)) * std::cos(q) + 2.0 * xi * p * p;
    case SystemKind::inverted_oscillator:
      return 0.5 * (p * p - q * q);
    case SystemKind::standard_map:
      break;
  }
  throw std::invalid_argument("hamiltonian: not defined for the standard map");
}

PhasePoint standard_map_step(PhasePoint x, double kick_strength) {
  const double p = wrap_2pi(x.p + kick_strength * std::sin(x.q));
  const double q = wrap_2pi(x.q + p);
  return {q, p};
}

PhasePoint flow(const ClassicalSystem& system, PhasePoint start, double t) {
  if (system.is_map()) {
    const long kicks = std::lround(t);
    if (std::abs(t - kicks) > 1e-9 || kicks < 0)
      throw std::invalid_argument("flow: standard map time must be a whole kick count");
    PhasePoint x = start;
    for (long k = 0; k < kicks; ++k) x = standard_map_step(x, system.kick_strength);
    return x;
  }
  if (t == 0.0) return start;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(t) / system.flow_dt)));
  const double h = t / n;
  double q = start.q, p = start.p;
  for (int i = 0; i < n; ++i) {
    const Deriv k1 = hamilton_rhs(system, q, p);
    const Deriv k2 = hamilton_rhs(system, q + 0.5 * h * k1.dq, p + 0.5 * h * k1.dp);
    const Deriv k3 = hamilton_rhs(system, q + 0.5 * h * k2.dq, p + 0.5 * h * k2.dp);
    const Deriv k4 = hamilton_rhs(system, q + h * k3.dq, p + h * k3.dp);
    q += h / 6.0 * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    p += h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp);
  }
  return {q, p};
}

SectionCloud poincare_section(const ClassicalSystem& system, const PhaseSpaceGrid& box,
                              int n_samples, int n_iterations, std::uint64_t seed,
                              double period) {
  if (n_samples < 1 || n_iterations < 0)
    throw std::invalid_argument("poincare_section: need n_samples >= 1, n_iterations >= 0");
  SectionCloud cloud;
  cloud.seed = seed;
  cloud.n_samples = n_samples;
  cloud.n_iterations = n_iterations;
  cloud.points.reserve(static_cast<std::size_t>(n_samples) * (n_iterations + 1));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uq(box.q_origin, box.q_origin + box.q_extent);
  std::uniform_real_distribution<double> up(box.p_origin, box.p_origin + box.p_extent);
  for (int s = 0; s < n_samples; ++s) {
    PhasePoint x{uq(rng), up(rng)};
    cloud.points.push_back(box.wrap(x));
    for (int it = 0; it < n_iterations; ++it) {
      x = system.is_map() ? standard_map_step(x, system.kick_strength)
                          : flow(system, x, period);
      cloud.points.push_back(box.wrap(x));
    }
  }
  return cloud;
}

CoarseMap coarse_map(const ClassicalSystem& system, const PlanckBasis& basis, double t,
                     const CMatrix& u_cell) {
  const PhaseSpaceGrid& grid = basis.grid;
  const int d = grid.cell_count();
  CoarseMap map;
  map.t = t;
  map.target.resize(d);
  map.phase = CVector::Ones(d);
  map.magnitude = RVector::Ones(d);

  if (t == 0.0) {
    for (int j = 0; j < d; ++j) map.target[j] = j;
    return map;
  }

  if (u_cell.rows() != d || u_cell.cols() != d)
    throw std::invalid_argument("coarse_map: cell-frame propagator dimension mismatch");

  for (int j = 0; j < d; ++j) {
    const PhasePoint start = grid.cell_center(j);
    PhasePoint img = grid.wrap(flow(system, start, t));
    bool escaped = false;
    if (!grid.q_periodic) {
      const double lo = grid.q_origin, hi = grid.q_origin + grid.q_extent;
      if (img.q < lo || img.q > hi) {
        img.q = std::clamp(img.q, lo + 0.5 * grid.dq(), hi - 0.5 * grid.dq());
        escaped = true;
      }
    }
    if (!grid.p_periodic) {
      const double lo = grid.p_origin, hi = grid.p_origin + grid.p_extent;
      if (img.p < lo || img.p > hi) {
        img.p = std::clamp(img.p, lo + 0.5 * grid.dp(), hi - 0.5 * grid.dp());
        escaped = true;
      }
    }
    if (escaped) map.escaped.push_back(j);
    map.target[j] = grid.locate(img.q, img.p);

    const Complex element = u_cell(map.target[j], j);
    const double mag = std::abs(element);
    map.magnitude(j) = mag;
    if (mag < 1e-14) {
      map.phase(j) = 1.0;  // phase undefined at zero overlap
      map.flagged.push_back(j);
    } else {
      map.phase(j) = element / mag;
    }
  }

  std::unordered_set<int> images(map.target.begin(), map.target.end());
  map.collision_count = d - static_cast<int>(images.size());
  return map;
}

double saddle_lyapunov(const ClassicalSystem& system, PhasePoint point, double stationarity_tol) {
  if (system.is_map())
    throw std::invalid_argument("saddle_lyapunov: defined for continuous flows only");
  const double h = 1e-5;
  const double q = point.q, p = point.p;
  auto ham = [&](double qq, double pp) { return system.hamiltonian(qq, pp); };

  const double dq = (ham(q + h, p) - ham(q - h, p)) / (2.0 * h);
  const double dp = (ham(q, p + h) - ham(q, p - h)) / (2.0 * h);
  if (std::hypot(dq, dp) > stationarity_tol)
    throw std::invalid_argument("saddle_lyapunov: point is not stationary, |grad H| = " +
                                std::to_string(std::hypot(dq, dp)));

  const double hqq = (ham(q + h, p) - 2.0 * ham(q, p) + ham(q - h, p)) / (h * h);
  const double hpp = (ham(q, p + h) - 2.0 * ham(q, p) + ham(q, p - h)) / (h * h);
  const double hqp = (ham(q + h, p + h) - ham(q + h, p - h) - ham(q - h, p + h) +
                      ham(q - h, p - h)) / (4.0 * h * h);

  // linearization [[Hqp, Hpp], [-Hqq, -Hqp]] has eigenvalues
  // +- sqrt(Hqp^2 - Hpp Hqq)
  const double disc = hqp * hqp - hpp * hqq;
  return disc > 0.0 ? std::sqrt(disc) : 0.0;
}

}  // namespace qps

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "rbcsim/phase.hpp"

namespace rbcsim {

// One aggregated data point of a parameter sweep.
struct SweepRow {
  uint32_t L = 0;
  double p = 0.0;
  std::string observable;
  uint32_t element = 0;  // profile cut index, 0 for scalars
  double mean = 0.0;
  double stderr_ = 0.0;
  uint32_t n_traj = 0;
};

struct SweepDataset {
  std::vector<SweepRow> rows;

  // Keys (L, p, observable, element) must be unique.
  void validate() const {
    std::map<std::tuple<uint32_t, double, std::string, uint32_t>, int> seen;
    for (const auto& r : rows)
      if (++seen[{r.L, r.p, r.observable, r.element}] > 1)
        throw std::invalid_argument("duplicate sweep key");
  }
};

// Streaming mean/variance (Welford). Matches batch results to rounding.
class RunningStat {
 public:
  void add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
  }
  uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double sample_variance() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }
  double stderr_of_mean() const {
    return n_ > 0 ? std::sqrt(sample_variance() / static_cast<double>(n_))
                  : 0.0;
  }

 private:
  uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct FitPoint {
  double x;   // raw coordinate (cut length, time step, block side)
  double y;
  double sigma;  // standard error of y; non-positive values get a floor
};

struct FitResult {
  double slope = 0.0;      // named model coefficient, see each fitter
  double intercept = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  double chi2 = 0.0;       // weighted residual sum of squares
  double r2 = 0.0;         // unweighted coefficient of determination
  uint32_t n_points = 0;
  double window_lo = 0.0, window_hi = 0.0;  // in the raw coordinate
};

namespace detail {

inline double sigma_floor(double sigma) {
  return sigma > 1e-12 ? sigma : 1e-12;
}

// Weighted least squares for y = a + m * u. Zero standard errors (degenerate
// estimates at tiny sample counts) are floored relative to the smallest real
// one so a single such point cannot acquire unbounded weight and cancel the
// normal-equation determinant.
inline FitResult wls_line(const std::vector<double>& u,
                          const std::vector<double>& y,
                          const std::vector<double>& sigma) {
  const size_t n = u.size();
  if (n < 3) throw std::invalid_argument("fit needs at least 3 points");
  double min_pos = std::numeric_limits<double>::infinity();
  for (double s : sigma)
    if (s > 0) min_pos = std::min(min_pos, s);
  const double floor_ =
      std::isfinite(min_pos) ? std::max(1e-12, 1e-3 * min_pos) : 1e-12;
  auto weight = [floor_](double s) {
    double f = std::max(s, floor_);
    return 1.0 / (f * f);
  };
  double sw = 0, swu = 0, swy = 0, swuu = 0, swuy = 0;
  for (size_t k = 0; k < n; ++k) {
    double w = weight(sigma[k]);
    sw += w;
    swu += w * u[k];
    swy += w * y[k];
    swuu += w * u[k] * u[k];
    swuy += w * u[k] * y[k];
  }
  double det = sw * swuu - swu * swu;
  if (det <= 0 || !std::isfinite(det))
    throw std::invalid_argument("degenerate fit window");
  FitResult r;
  r.n_points = static_cast<uint32_t>(n);
  r.slope = (sw * swuy - swu * swy) / det;
  r.intercept = (swuu * swy - swu * swuy) / det;
  r.slope_se = std::sqrt(sw / det);
  r.intercept_se = std::sqrt(swuu / det);
  double ybar = 0;
  for (double v : y) ybar += v;
  ybar /= static_cast<double>(n);
  double ss_res = 0, ss_tot = 0;
  for (size_t k = 0; k < n; ++k) {
    double fit = r.intercept + r.slope * u[k];
    double w = weight(sigma[k]);
    r.chi2 += w * (y[k] - fit) * (y[k] - fit);
    ss_res += (y[k] - fit) * (y[k] - fit);
    ss_tot += (y[k] - ybar) * (y[k] - ybar);
  }
  r.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return r;
}

}  // namespace detail

// Fit of a cut profile to value = (c/3) * log2((L/pi) sin(pi l / L)) + g.
// `slope` reports c (three times the regression slope in the chord
// variable). Default window: l in [L/8, 7L/8].
inline FitResult fit_log_profile(const std::vector<FitPoint>& profile,
                                 uint32_t L, double window_lo = -1,
                                 double window_hi = -1) {
  if (L < 8) throw std::invalid_argument("profile fit needs L >= 8");
  if (window_lo < 0) window_lo = static_cast<double>(L) / 8.0;
  if (window_hi < 0) window_hi = 7.0 * static_cast<double>(L) / 8.0;
  std::vector<double> u, y, s;
  for (const auto& pt : profile) {
    if (pt.x < window_lo || pt.x > window_hi) continue;
    double chord =
        (static_cast<double>(L) / pi) * std::sin(pi * pt.x / static_cast<double>(L));
    u.push_back(std::log2(chord));
    y.push_back(pt.y);
    s.push_back(pt.sigma);
  }
  if (u.size() < 3) throw std::invalid_argument("empty profile fit window");
  FitResult r = detail::wls_line(u, y, s);
  r.slope *= 3.0;
  r.slope_se *= 3.0;
  r.window_lo = window_lo;
  r.window_hi = window_hi;
  return r;
}

// Fit of a growth curve to value = (c/3) * log2 t + g; `slope` reports c.
// The automatic window keeps 4 <= t <= t_sat/4, where t_sat is the first
// time the series reaches 95% of its late-time plateau (mean of the last
// quarter). Pass an explicit window to fit other segments, e.g. a plateau.
inline FitResult fit_time_growth(const std::vector<FitPoint>& series,
                                 double window_lo = -1, double window_hi = -1) {
  if (series.size() < 4) throw std::invalid_argument("series too short");
  if (window_lo < 0 || window_hi < 0) {
    size_t tail_from = series.size() - std::max<size_t>(1, series.size() / 4);
    double plateau = 0;
    for (size_t k = tail_from; k < series.size(); ++k) plateau += series[k].y;
    plateau /= static_cast<double>(series.size() - tail_from);
    double t_sat = series.back().x;
    for (const auto& pt : series) {
      if (pt.y >= 0.95 * plateau) {
        t_sat = pt.x;
        break;
      }
    }
    window_lo = 4.0;
    window_hi = t_sat / 4.0;
  }
  std::vector<double> u, y, s;
  for (const auto& pt : series) {
    if (pt.x < window_lo || pt.x > window_hi) continue;
    u.push_back(std::log2(pt.x));
    y.push_back(pt.y);
    s.push_back(pt.sigma);
  }
  if (u.size() < 3)
    throw std::invalid_argument("empty growth fit window after exclusions");
  FitResult r = detail::wls_line(u, y, s);
  r.slope *= 3.0;
  r.slope_se *= 3.0;
  r.window_lo = window_lo;
  r.window_hi = window_hi;
  return r;
}

// Plain weighted linear fit value = slope * l + intercept over block sides
// l <= window_hi (default L/4 when L is passed, else all points).
inline FitResult fit_area_law(const std::vector<FitPoint>& profile,
                              double window_lo = 0, double window_hi = -1) {
  std::vector<double> u, y, s;
  for (const auto& pt : profile) {
    if (pt.x < window_lo || (window_hi > 0 && pt.x > window_hi)) continue;
    u.push_back(pt.x);
    y.push_back(pt.y);
    s.push_back(pt.sigma);
  }
  if (u.size() < 3) throw std::invalid_argument("empty area-law fit window");
  FitResult r = detail::wls_line(u, y, s);
  r.window_lo = window_lo;
  r.window_hi = window_hi > 0 ? window_hi : *std::max_element(u.begin(), u.end());
  return r;
}

struct CollapsePoint {
  uint32_t L;
  double p;
  double y;
  double sigma;
};

struct CollapseResult {
  double pc = 0.0;
  double nu = 0.0;
  double quality = 0.0;   // leave-one-size-out master-curve residual
  uint32_t n_points = 0;  // points entering the final quality
  // Coarse search landscape for diagnostics.
  std::vector<double> grid_pc, grid_nu;
  std::vector<double> grid_q;  // row-major [i_pc * n_nu + i_nu]
};

namespace detail {

struct ScaledPoint {
  double x, y, var;
};

// Quality of a candidate (pc, nu): for each size, interpolate the master
// curve built from the other sizes and accumulate normalized squared
// residuals. Lower is better. Returns +inf when the scaled windows of
// different sizes do not overlap at all.
//
// The master estimate carries two uncertainties: the nodes' propagated
// stderr and the secant's own model error, which for data monotone across
// the bracket is bounded by the node span and taken as t(1-t)|dy|. Without
// the second term, steep branches sampled coarsely in x acquire huge
// residuals from interpolation error alone and drag the argmin away from
// the true exponents.
inline double collapse_quality(
    const std::vector<std::vector<CollapsePoint>>& by_size, double pc,
    double nu, uint32_t* n_used = nullptr) {
  const double inv_nu = 1.0 / nu;
  std::vector<std::vector<ScaledPoint>> scaled(by_size.size());
  for (size_t g = 0; g < by_size.size(); ++g) {
    for (const auto& pt : by_size[g]) {
      double x = (pt.p - pc) * std::pow(static_cast<double>(pt.L), inv_nu);
      double s = sigma_floor(pt.sigma);
      scaled[g].push_back({x, pt.y, s * s});
    }
    std::sort(scaled[g].begin(), scaled[g].end(),
              [](const ScaledPoint& a, const ScaledPoint& b) {
                return a.x < b.x;
              });
  }
  double total = 0;
  uint32_t used = 0;
  std::vector<ScaledPoint> master;
  for (size_t g = 0; g < scaled.size(); ++g) {
    master.clear();
    for (size_t h = 0; h < scaled.size(); ++h) {
      if (h == g) continue;
      master.insert(master.end(), scaled[h].begin(), scaled[h].end());
    }
    std::sort(master.begin(), master.end(),
              [](const ScaledPoint& a, const ScaledPoint& b) {
                return a.x < b.x;
              });
    if (master.size() < 2) continue;
    for (const auto& pt : scaled[g]) {
      if (pt.x < master.front().x || pt.x > master.back().x) continue;
      auto it = std::lower_bound(master.begin(), master.end(), pt.x,
                                 [](const ScaledPoint& m, double x) {
                                   return m.x < x;
                                 });
      const ScaledPoint& hi = it == master.end() ? master.back() : *it;
      const ScaledPoint& lo = it == master.begin() ? *it : *(it - 1);
      double yhat, vhat;
      if (hi.x <= lo.x) {
        yhat = 0.5 * (lo.y + hi.y);
        vhat = 0.5 * (lo.var + hi.var);
      } else {
        double t = (pt.x - lo.x) / (hi.x - lo.x);
        yhat = (1 - t) * lo.y + t * hi.y;
        vhat = (1 - t) * (1 - t) * lo.var + t * t * hi.var;
        double model = t * (1 - t) * (hi.y - lo.y);
        vhat += model * model;
      }
      double d = pt.y - yhat;
      total += d * d / (pt.var + vhat);
      ++used;
    }
  }
  if (n_used) *n_used = used;
  if (used == 0) return std::numeric_limits<double>::infinity();
  return total / static_cast<double>(used);
}

}  // namespace detail

// Two-parameter finite-size collapse: minimize the master-curve residual of
// y vs x = (p - pc) L^{1/nu} over a coarse grid, then shrink the search box
// around the argmin. Needs at least two distinct sizes with overlapping
// scaled windows; throws otherwise.
inline CollapseResult collapse(const std::vector<CollapsePoint>& points,
                               double pc_lo, double pc_hi, double nu_lo,
                               double nu_hi, uint32_t grid = 41,
                               uint32_t refinements = 3) {
  if (pc_hi <= pc_lo || nu_hi <= nu_lo || nu_lo <= 0)
    throw std::invalid_argument("bad collapse search ranges");
  std::map<uint32_t, std::vector<CollapsePoint>> groups;
  for (const auto& pt : points) groups[pt.L].push_back(pt);
  if (groups.size() < 2)
    throw std::invalid_argument("collapse needs at least two sizes");
  std::vector<std::vector<CollapsePoint>> by_size;
  for (auto& [L, v] : groups) by_size.push_back(std::move(v));

  CollapseResult res;
  double best_q = std::numeric_limits<double>::infinity();
  double best_pc = 0, best_nu = 0;

  auto scan = [&](double plo, double phi, double nlo, double nhi,
                  bool record) {
    if (record) {
      res.grid_pc.clear();
      res.grid_nu.clear();
      res.grid_q.assign(size_t{grid} * grid,
                        std::numeric_limits<double>::infinity());
    }
    for (uint32_t a = 0; a < grid; ++a) {
      double pc = plo + (phi - plo) * a / (grid - 1);
      if (record) res.grid_pc.push_back(pc);
      for (uint32_t b = 0; b < grid; ++b) {
        double nu = nlo + (nhi - nlo) * b / (grid - 1);
        if (record && a == 0) res.grid_nu.push_back(nu);
        double q = detail::collapse_quality(by_size, pc, nu);
        if (record) res.grid_q[size_t{a} * grid + b] = q;
        if (q < best_q) {
          best_q = q;
          best_pc = pc;
          best_nu = nu;
        }
      }
    }
  };

  scan(pc_lo, pc_hi, nu_lo, nu_hi, true);
  if (!std::isfinite(best_q))
    throw std::invalid_argument(
        "scaled windows of different sizes never overlap");
  double wp = (pc_hi - pc_lo) / (grid - 1), wn = (nu_hi - nu_lo) / (grid - 1);
  for (uint32_t r = 0; r < refinements; ++r) {
    double plo = std::max(pc_lo, best_pc - 2 * wp);
    double phi = std::min(pc_hi, best_pc + 2 * wp);
    double nlo = std::max(nu_lo, best_nu - 2 * wn);
    double nhi = std::min(nu_hi, best_nu + 2 * wn);
    scan(plo, phi, nlo, nhi, false);
    wp = (phi - plo) / (grid - 1);
    wn = (nhi - nlo) / (grid - 1);
  }
  res.pc = best_pc;
  res.nu = best_nu;
  res.quality = detail::collapse_quality(by_size, best_pc, best_nu,
                                         &res.n_points);
  return res;
}

}  // namespace rbcsim

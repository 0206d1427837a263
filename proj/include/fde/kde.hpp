#pragma once

// Kernel density estimation of univariate and bivariate marginals. Bandwidths
// follow plug-in rules resolved per column (h1 = 1.06*sd*n^-1/5 for the
// univariate estimator, h2 = sd*n^-1/6 per axis for the bivariate one) unless
// fixed explicitly.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fde/types.hpp"

namespace fde {

enum class Kernel { gaussian, epanechnikov };

// A bandwidth given either as the plug-in rule or as an explicit value.
struct Bandwidth {
  bool from_rule = true;
  double value = 0.0;

  static Bandwidth rule() { return {}; }
  static Bandwidth fixed(double h) { return Bandwidth{false, h}; }
};

struct KernelConfig {
  Kernel kernel = Kernel::gaussian;
  Bandwidth h1 = Bandwidth::rule();
  Bandwidth h2 = Bandwidth::rule();
  int grid_points = 100;   // G, per axis
  double floor = 1e-10;    // density clamp before logs

  void validate() const {
    if (grid_points < 16) throw ConfigError("grid_points must be at least 16");
    if (!(floor > 0.0 && floor < 1e-6))
      throw ConfigError("floor must lie in (0, 1e-6)");
    if (!h1.from_rule && !(h1.value > 0.0))
      throw ConfigError("fixed h1 must be positive");
    if (!h2.from_rule && !(h2.value > 0.0))
      throw ConfigError("fixed h2 must be positive");
  }
};

inline double kernel_value(Kernel k, double u) {
  switch (k) {
    case Kernel::gaussian:
      return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case Kernel::epanechnikov:
      return std::fabs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

// Resolved per-column smoothing parameters and data range. A bandwidth that
// resolves to zero (constant column under the plug-in rule) marks the column
// degenerate for the estimators that need it.
struct ColumnKernel {
  double h1 = 0.0;
  double h2 = 0.0;
  double min = 0.0;
  double max = 0.0;

  bool h1_degenerate() const { return !(h1 > 0.0); }
  bool h2_degenerate() const { return !(h2 > 0.0); }
  bool degenerate() const { return h1_degenerate() || h2_degenerate(); }
};

inline ColumnKernel resolve_column(const Eigen::VectorXd& col, const KernelConfig& cfg) {
  const auto n = col.size();
  if (n < 1) throw DataError("empty column");
  if (!col.allFinite()) throw DataError("non-finite entry in column");
  double mean = col.mean();
  double sd = n > 1 ? std::sqrt((col.array() - mean).square().sum() / (n - 1)) : 0.0;
  // numerically constant columns count as zero-variance
  if (sd < 1e-12 * std::max(1.0, std::fabs(mean))) sd = 0.0;
  ColumnKernel ck;
  ck.min = col.minCoeff();
  ck.max = col.maxCoeff();
  double nd = static_cast<double>(n);
  ck.h1 = cfg.h1.from_rule ? 1.06 * sd * std::pow(nd, -0.2) : cfg.h1.value;
  ck.h2 = cfg.h2.from_rule ? sd * std::pow(nd, -1.0 / 6.0) : cfg.h2.value;
  return ck;
}

// Uniformly spaced evaluation grid with trapezoidal quadrature weights,
// spanning the column range extended by three bandwidths.
struct EvalGrid {
  Eigen::VectorXd points;
  Eigen::VectorXd quad_w;

  double lo() const { return points(0); }
  double hi() const { return points(points.size() - 1); }
};

inline EvalGrid column_grid(const ColumnKernel& ck, const KernelConfig& cfg) {
  double ext = 3.0 * std::max(ck.h1, ck.h2);
  int g = cfg.grid_points;
  EvalGrid grid;
  grid.points = Eigen::VectorXd::LinSpaced(g, ck.min - ext, ck.max + ext);
  double step = (grid.points(g - 1) - grid.points(0)) / (g - 1);
  grid.quad_w = Eigen::VectorXd::Constant(g, step);
  grid.quad_w(0) = grid.quad_w(g - 1) = 0.5 * step;
  return grid;
}

// Univariate KDE at a single point, clamped below at cfg.floor.
inline double kde_univariate(const Eigen::VectorXd& data, const KernelConfig& cfg, double x) {
  cfg.validate();
  ColumnKernel ck = resolve_column(data, cfg);
  if (ck.h1_degenerate()) throw ConfigError("bandwidth h1 resolved to zero");
  double s = 0.0;
  for (Eigen::Index t = 0; t < data.size(); ++t)
    s += kernel_value(cfg.kernel, (data(t) - x) / ck.h1);
  return std::max(s / (data.size() * ck.h1), cfg.floor);
}

// Product-kernel bivariate KDE at a single point.
inline double kde_bivariate(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                            const KernelConfig& cfg, double x, double y) {
  cfg.validate();
  if (xi.size() != xj.size()) throw DataError("bivariate KDE needs columns of equal length");
  ColumnKernel ci = resolve_column(xi, cfg);
  ColumnKernel cj = resolve_column(xj, cfg);
  if (ci.h2_degenerate() || cj.h2_degenerate())
    throw ConfigError("bandwidth h2 resolved to zero");
  double s = 0.0;
  for (Eigen::Index t = 0; t < xi.size(); ++t)
    s += kernel_value(cfg.kernel, (xi(t) - x) / ci.h2) *
         kernel_value(cfg.kernel, (xj(t) - y) / cj.h2);
  return std::max(s / (xi.size() * ci.h2 * cj.h2), cfg.floor);
}

// KDE evaluated on a set of points with bandwidth h (shared workhorse for the
// grid-based integrals).
inline Eigen::VectorXd kde_profile(const Eigen::VectorXd& data, Kernel k, double h,
                                   const Eigen::VectorXd& at, double floor) {
  Eigen::VectorXd out(at.size());
  for (Eigen::Index g = 0; g < at.size(); ++g) {
    double s = 0.0;
    for (Eigen::Index t = 0; t < data.size(); ++t)
      s += kernel_value(k, (data(t) - at(g)) / h);
    out(g) = std::max(s / (data.size() * h), floor);
  }
  return out;
}

// n x m matrix of scaled kernel evaluations K((x_t - at_g)/h)/h; the building
// block whose Gram products give bivariate KDE values on grids.
inline Eigen::MatrixXd kernel_matrix(const Eigen::VectorXd& data, Kernel k, double h,
                                     const Eigen::VectorXd& at) {
  Eigen::MatrixXd out(data.size(), at.size());
  for (Eigen::Index g = 0; g < at.size(); ++g)
    for (Eigen::Index t = 0; t < data.size(); ++t)
      out(t, g) = kernel_value(k, (data(t) - at(g)) / h) / h;
  return out;
}

}  // namespace fde

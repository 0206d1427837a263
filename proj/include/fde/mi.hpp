#pragma once

// Plug-in estimators of mutual information and entropy from kernel density
// estimates, their discrete empirical counterparts, and the pairwise weight
// matrices consumed by the tree solvers.
//
// Pairwise quantities are computed in a canonical column order (lexicographic
// on the data) so that estimate_mi(a, b) and estimate_mi(b, a) agree bit for
// bit, and the d(d-1)/2 entries of a weight matrix are reproducible across
// thread counts.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fde/kde.hpp"
#include "fde/parallel.hpp"
#include "fde/types.hpp"

namespace fde {

enum class WeightMode { kde, discrete };

namespace detail {

inline bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index t = 0; t < std::min(a.size(), b.size()); ++t) {
    if (a(t) < b(t)) return true;
    if (a(t) > b(t)) return false;
  }
  return a.size() < b.size();
}

// Per-column state reused across pairs: evaluation grid, univariate marginal
// on the grid (bandwidth h1) and the h2-scaled kernel matrix whose Gram
// products yield the bivariate KDE on the grid.
struct MiColumnCache {
  ColumnKernel ck;
  EvalGrid grid;
  Eigen::VectorXd marginal;  // clamped at cfg.floor
  Eigen::MatrixXd joint_k;   // n x G
};

inline MiColumnCache build_mi_cache(const Eigen::VectorXd& col, const KernelConfig& cfg) {
  MiColumnCache c;
  c.ck = resolve_column(col, cfg);
  if (c.ck.degenerate()) return c;
  c.grid = column_grid(c.ck, cfg);
  c.marginal = kde_profile(col, cfg.kernel, c.ck.h1, c.grid.points, cfg.floor);
  c.joint_k = kernel_matrix(col, cfg.kernel, c.ck.h2, c.grid.points);
  return c;
}

// Trapezoidal integral of p_ij * log(p_ij / (p_i p_j)) over the grid product,
// clamped below at zero.
inline double mi_pair(const MiColumnCache& a, const MiColumnCache& b, Eigen::Index n,
                      double floor) {
  Eigen::MatrixXd joint = (a.joint_k.transpose() * b.joint_k) / static_cast<double>(n);
  const Eigen::Index ga = a.grid.points.size(), gb = b.grid.points.size();
  double mi = 0.0;
  for (Eigen::Index g = 0; g < ga; ++g) {
    const double wa = a.grid.quad_w(g), pa = a.marginal(g);
    double row = 0.0;
    for (Eigen::Index h = 0; h < gb; ++h) {
      double p = std::max(joint(g, h), floor);
      row += b.grid.quad_w(h) * p * std::log(p / (pa * b.marginal(h)));
    }
    mi += wa * row;
  }
  return std::max(mi, 0.0);
}

// Column cache for held-out scoring: fitted densities evaluated at the
// held-out points instead of on a grid.
struct HoldoutColumnCache {
  ColumnKernel ck;
  Eigen::VectorXd marginal_at;  // h1 KDE at held-out points, clamped
  Eigen::MatrixXd joint_k_at;   // n x m, h2-scaled kernels at held-out points
};

inline HoldoutColumnCache build_holdout_cache(const Eigen::VectorXd& train,
                                              const Eigen::VectorXd& holdout,
                                              const KernelConfig& cfg) {
  HoldoutColumnCache c;
  c.ck = resolve_column(train, cfg);
  if (c.ck.degenerate()) return c;
  if (!holdout.allFinite()) throw DataError("non-finite entry in held-out column");
  c.marginal_at = kde_profile(train, cfg.kernel, c.ck.h1, holdout, cfg.floor);
  c.joint_k_at = kernel_matrix(train, cfg.kernel, c.ck.h2, holdout);
  return c;
}

inline double holdout_pair(const HoldoutColumnCache& a, const HoldoutColumnCache& b,
                           Eigen::Index n, double floor) {
  const Eigen::Index m = a.marginal_at.size();
  double s = 0.0;
  for (Eigen::Index t = 0; t < m; ++t) {
    double joint = a.joint_k_at.col(t).dot(b.joint_k_at.col(t)) / static_cast<double>(n);
    joint = std::max(joint, floor);
    s += std::log(joint / (a.marginal_at(t) * b.marginal_at(t)));
  }
  return s / static_cast<double>(m);
}

using Codes = std::vector<std::int64_t>;

inline Codes to_codes(const Eigen::VectorXd& col) {
  Codes c(static_cast<std::size_t>(col.size()));
  for (Eigen::Index t = 0; t < col.size(); ++t) {
    double v = col(t);
    if (!std::isfinite(v)) throw DataError("non-finite entry in discrete column");
    double r = std::nearbyint(v);
    if (std::fabs(v - r) > 1e-9)
      throw DataError("discrete column contains a non-integer code");
    c[static_cast<std::size_t>(t)] = static_cast<std::int64_t>(r);
  }
  return c;
}

inline double mi_discrete_codes(const Codes& a, const Codes& b) {
  const std::size_t n = a.size();
  std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> joint;
  std::map<std::int64_t, std::size_t> ma, mb;
  for (std::size_t t = 0; t < n; ++t) {
    ++joint[{a[t], b[t]}];
    ++ma[a[t]];
    ++mb[b[t]];
  }
  const double nd = static_cast<double>(n);
  double mi = 0.0;
  for (const auto& [ab, c] : joint) {
    double pab = c / nd;
    double pa = ma.at(ab.first) / nd, pb = mb.at(ab.second) / nd;
    mi += pab * std::log(pab / (pa * pb));
  }
  return mi;
}

}  // namespace detail

// Kernel plug-in estimate of I(X_i; X_j); nonnegative by clamping.
// A zero-variance column makes the pair degenerate: the estimate is 0 and
// *degenerate is set instead of aborting.
inline double estimate_mi(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                          const KernelConfig& cfg, bool* degenerate = nullptr) {
  cfg.validate();
  if (xi.size() != xj.size()) throw DataError("estimate_mi: column length mismatch");
  if (xi.size() < 2) throw DataError("estimate_mi: need at least two samples");
  if (degenerate) *degenerate = false;
  const Eigen::VectorXd& a = detail::lex_less(xj, xi) ? xj : xi;
  const Eigen::VectorXd& b = detail::lex_less(xj, xi) ? xi : xj;
  detail::MiColumnCache ca = detail::build_mi_cache(a, cfg);
  detail::MiColumnCache cb = detail::build_mi_cache(b, cfg);
  if (ca.ck.degenerate() || cb.ck.degenerate()) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return detail::mi_pair(ca, cb, xi.size(), cfg.floor);
}

// Plug-in MI from the empirical contingency table; nonnegative without any
// clamping. Codes must be integers stored as reals.
inline double estimate_mi_discrete(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj) {
  if (xi.size() != xj.size()) throw DataError("estimate_mi_discrete: column length mismatch");
  if (xi.size() < 1) throw DataError("estimate_mi_discrete: empty columns");
  detail::Codes a = detail::to_codes(xi), b = detail::to_codes(xj);
  if (detail::lex_less(xj, xi)) std::swap(a, b);
  return detail::mi_discrete_codes(a, b);
}

// Differential entropy estimate -int p log p on the extended grid. Constant
// columns return 0 with the degenerate flag set; the value never enters the
// structure search.
inline double estimate_entropy(const Eigen::VectorXd& col, const KernelConfig& cfg,
                               bool* degenerate = nullptr) {
  cfg.validate();
  if (col.size() < 1) throw DataError("estimate_entropy: empty column");
  if (degenerate) *degenerate = false;
  ColumnKernel ck = resolve_column(col, cfg);
  if (ck.h1_degenerate()) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  EvalGrid grid = column_grid(ck, cfg);
  Eigen::VectorXd p = kde_profile(col, cfg.kernel, ck.h1, grid.points, cfg.floor);
  double h = 0.0;
  for (Eigen::Index g = 0; g < grid.points.size(); ++g)
    h -= grid.quad_w(g) * p(g) * std::log(p(g));
  return h;
}

// Average held-out log-ratio log(p_ij / (p_i p_j)) of one candidate edge,
// with densities fitted on the training columns.
inline double pairwise_holdout_term(const Eigen::VectorXd& train_i, const Eigen::VectorXd& train_j,
                                    const Eigen::VectorXd& holdout_i, const Eigen::VectorXd& holdout_j,
                                    const KernelConfig& cfg, bool* degenerate = nullptr) {
  cfg.validate();
  if (train_i.size() != train_j.size()) throw DataError("holdout term: train length mismatch");
  if (holdout_i.size() != holdout_j.size()) throw DataError("holdout term: holdout length mismatch");
  if (holdout_i.size() < 1) throw DataError("holdout term: empty held-out columns");
  if (degenerate) *degenerate = false;
  bool swap = detail::lex_less(train_j, train_i);
  const Eigen::VectorXd& ta = swap ? train_j : train_i;
  const Eigen::VectorXd& tb = swap ? train_i : train_j;
  const Eigen::VectorXd& ha = swap ? holdout_j : holdout_i;
  const Eigen::VectorXd& hb = swap ? holdout_i : holdout_j;
  detail::HoldoutColumnCache ca = detail::build_holdout_cache(ta, ha, cfg);
  detail::HoldoutColumnCache cb = detail::build_holdout_cache(tb, hb, cfg);
  if (ca.ck.degenerate() || cb.ck.degenerate()) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return detail::holdout_pair(ca, cb, train_i.size(), cfg.floor);
}

// All-pairs MI weight matrix. Pair computations run in parallel and merge by
// index, so the result is identical for any thread count. Degenerate columns
// contribute zero weights and a warning entry.
inline WeightMatrix weight_matrix(const Dataset& data, const KernelConfig& cfg, WeightMode mode,
                                  unsigned threads = 1,
                                  std::vector<std::string>* warnings = nullptr) {
  cfg.validate();
  data.validate();
  const Eigen::Index d = data.d();
  WeightMatrix wm(data.column_names);

  if (mode == WeightMode::discrete) {
    std::vector<detail::Codes> codes(static_cast<std::size_t>(d));
    std::vector<Eigen::VectorXd> cols(static_cast<std::size_t>(d));
    for (Eigen::Index c = 0; c < d; ++c) {
      cols[c] = data.column(c);
      codes[c] = detail::to_codes(cols[c]);
    }
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
      auto [i, j] = pairs[p];
      try {
        bool swap = detail::lex_less(cols[j], cols[i]);
        double v = swap ? detail::mi_discrete_codes(codes[j], codes[i])
                        : detail::mi_discrete_codes(codes[i], codes[j]);
        wm.set_pair(i, j, v);
      } catch (const std::exception& e) {
        throw DataError("pair (" + data.column_names[i] + ", " + data.column_names[j] +
                        "): " + e.what());
      }
    });
    return wm;
  }

  std::vector<Eigen::VectorXd> cols(static_cast<std::size_t>(d));
  std::vector<detail::MiColumnCache> cache(static_cast<std::size_t>(d));
  parallel_for(static_cast<std::size_t>(d), threads, [&](std::size_t c) {
    cols[c] = data.column(static_cast<Eigen::Index>(c));
    try {
      cache[c] = detail::build_mi_cache(cols[c], cfg);
    } catch (const std::exception& e) {
      throw DataError("column " + data.column_names[c] + ": " + e.what());
    }
  });
  if (warnings)
    for (Eigen::Index c = 0; c < d; ++c)
      if (cache[c].ck.degenerate())
        warnings->push_back("column " + data.column_names[c] +
                            " has zero variance; its weights are 0");

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    auto [i, j] = pairs[p];
    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    if (cache[ui].ck.degenerate() || cache[uj].ck.degenerate()) {
      wm.set_pair(i, j, 0.0);
      return;
    }
    try {
      bool swap = detail::lex_less(cols[uj], cols[ui]);
      double v = swap ? detail::mi_pair(cache[uj], cache[ui], data.n(), cfg.floor)
                      : detail::mi_pair(cache[ui], cache[uj], data.n(), cfg.floor);
      wm.set_pair(i, j, v);
    } catch (const std::exception& e) {
      throw DataError("pair (" + data.column_names[i] + ", " + data.column_names[j] +
                      "): " + e.what());
    }
  });
  return wm;
}

// All-pairs held-out log-likelihood terms (may be negative), aligned with the
// training data's columns. Used for pruning and held-out scoring.
inline WeightMatrix holdout_matrix(const Dataset& train, const Dataset& holdout,
                                   const KernelConfig& cfg, WeightMode mode,
                                   unsigned threads = 1) {
  cfg.validate();
  train.validate();
  if (holdout.column_names != train.column_names)
    throw DataError("held-out columns do not match training columns");
  if (holdout.n() < 1) throw DataError("held-out set is empty");
  if (!holdout.values.allFinite()) throw DataError("held-out set contains a non-finite entry");
  const Eigen::Index d = train.d();
  WeightMatrix hm(train.column_names);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j) pairs.emplace_back(i, j);

  if (mode == WeightMode::discrete) {
    std::vector<detail::Codes> tc(static_cast<std::size_t>(d)), hc(static_cast<std::size_t>(d));
    for (Eigen::Index c = 0; c < d; ++c) {
      tc[c] = detail::to_codes(train.column(c));
      hc[c] = detail::to_codes(holdout.column(c));
    }
    const double n = static_cast<double>(train.n());
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
      auto [i, j] = pairs[p];
      std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> joint;
      std::map<std::int64_t, std::size_t> mi_, mj_;
      for (Eigen::Index t = 0; t < train.n(); ++t) {
        ++joint[{tc[i][t], tc[j][t]}];
        ++mi_[tc[i][t]];
        ++mj_[tc[j][t]];
      }
      auto prob = [&](const auto& table, const auto& key) {
        auto it = table.find(key);
        return it == table.end() ? cfg.floor : std::max(it->second / n, cfg.floor);
      };
      double s = 0.0;
      for (Eigen::Index t = 0; t < holdout.n(); ++t)
        s += std::log(prob(joint, std::make_pair(hc[i][t], hc[j][t])) /
                      (prob(mi_, hc[i][t]) * prob(mj_, hc[j][t])));
      hm.set_pair(i, j, s / static_cast<double>(holdout.n()));
    });
    return hm;
  }

  std::vector<Eigen::VectorXd> tcols(static_cast<std::size_t>(d));
  std::vector<detail::HoldoutColumnCache> cache(static_cast<std::size_t>(d));
  parallel_for(static_cast<std::size_t>(d), threads, [&](std::size_t c) {
    tcols[c] = train.column(static_cast<Eigen::Index>(c));
    try {
      cache[c] = detail::build_holdout_cache(tcols[c], holdout.column(static_cast<Eigen::Index>(c)), cfg);
    } catch (const std::exception& e) {
      throw DataError("column " + train.column_names[c] + ": " + e.what());
    }
  });
  parallel_for(pairs.size(), threads, [&](std::size_t p) {
    auto [i, j] = pairs[p];
    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    if (cache[ui].ck.degenerate() || cache[uj].ck.degenerate()) {
      hm.set_pair(i, j, 0.0);
      return;
    }
    bool swap = detail::lex_less(tcols[uj], tcols[ui]);
    double v = swap ? detail::holdout_pair(cache[uj], cache[ui], train.n(), cfg.floor)
                    : detail::holdout_pair(cache[ui], cache[uj], train.n(), cfg.floor);
    hm.set_pair(i, j, v);
  });
  return hm;
}

}  // namespace fde

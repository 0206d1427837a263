#pragma once

// Core value types shared by the estimators: the sample matrix and the
// symmetric pairwise weight matrix, plus the library's error categories.

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fde {

// Violated precondition or broken internal invariant.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed or unusable input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration (bandwidths, grids, prior parameters).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An n x d sample matrix with named columns.
struct Dataset {
  Eigen::MatrixXd values;                 // n rows, d columns
  std::vector<std::string> column_names;  // d unique identifiers

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index d() const { return values.cols(); }

  Eigen::VectorXd column(Eigen::Index j) const { return values.col(j); }

  void validate() const {
    if (n() < 2 || d() < 2)
      throw DataError("dataset requires n >= 2 and d >= 2");
    if (static_cast<Eigen::Index>(column_names.size()) != d())
      throw DataError("column name count does not match column count");
    std::set<std::string> seen;
    for (const auto& name : column_names)
      if (!seen.insert(name).second)
        throw DataError("duplicate column name: " + name);
    if (!values.allFinite())
      throw DataError("dataset contains a non-finite entry");
  }
};

// Symmetric d x d matrix of pairwise edge weights with a zero diagonal.
struct WeightMatrix {
  Eigen::MatrixXd w;
  std::vector<std::string> labels;

  WeightMatrix() = default;
  explicit WeightMatrix(std::vector<std::string> names)
      : w(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(names.size()),
                                static_cast<Eigen::Index>(names.size()))),
        labels(std::move(names)) {}

  Eigen::Index d() const { return w.rows(); }

  double operator()(Eigen::Index i, Eigen::Index j) const { return w(i, j); }

  void set_pair(Eigen::Index i, Eigen::Index j, double value) {
    w(i, j) = value;
    w(j, i) = value;
  }

  bool is_symmetric() const {
    for (Eigen::Index i = 0; i < d(); ++i) {
      if (w(i, i) != 0.0) return false;
      for (Eigen::Index j = i + 1; j < d(); ++j)
        if (w(i, j) != w(j, i)) return false;
    }
    return true;
  }
};

}  // namespace fde

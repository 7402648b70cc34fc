#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wvar {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;

/// Tolerance used by geometric predicates (unit norms, containment, dedup).
inline constexpr double kGeomTol = 1e-12;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A construction precondition failed because the grid is too coarse for the
/// requested input (m below the resolution the construction needs).
class BelowResolution : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

inline Vec unit_vector(int dim, int axis, double sign = 1.0) {
  Vec v = Vec::Zero(dim);
  v(axis) = sign;
  return v;
}

inline Vec vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

}  // namespace wvar

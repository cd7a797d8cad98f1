#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <stdexcept>
#include <string>

namespace ccg {

// Points and vectors are always stored with three components; coordinates
// beyond the mesh dimension are zero.
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Axis-aligned box; only the first `dim` axes are meaningful.
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Ones();

  [[nodiscard]] bool contains(const Vec3& x, int dim) const {
    for (int i = 0; i < dim; ++i) {
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    }
    return true;
  }

  [[nodiscard]] double measure(int dim) const {
    double m = 1.0;
    for (int i = 0; i < dim; ++i) m *= hi[i] - lo[i];
    return m;
  }

  static Box unit() { return Box{}; }
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccg

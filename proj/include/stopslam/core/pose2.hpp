#pragma once

#include <Eigen/Core>

namespace stopslam {

/// Wraps an angle into (-pi, pi]. Values already in range are returned unchanged.
double normalize_angle(double angle);

/// Rigid transform in the plane. Heading is kept in (-pi, pi].
class Pose2 {
 public:
  Pose2() = default;
  Pose2(double x, double y, double theta);

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }

  Eigen::Vector3d vector() const { return {x_, y_, theta_}; }
  static Pose2 from_vector(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

  /// this ⊕ other
  Pose2 operator*(const Pose2& other) const;
  Pose2 inverse() const;
  /// Transform of `to` expressed in the frame of `from` (from⁻¹ ⊕ to).
  static Pose2 between(const Pose2& from, const Pose2& to) { return from.inverse() * to; }

  Eigen::Vector2d transform_point(const Eigen::Vector2d& p) const;
  double distance_to(const Pose2& other) const;

  friend bool operator==(const Pose2&, const Pose2&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

}  // namespace stopslam

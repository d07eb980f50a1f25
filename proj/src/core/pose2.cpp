#include "stopslam/core/pose2.hpp"

#include <cmath>
#include <numbers>

namespace stopslam {

double normalize_angle(double angle) {
  constexpr double kPi = std::numbers::pi;
  if (angle > kPi || angle <= -kPi) {
    angle = std::remainder(angle, 2.0 * kPi);
    if (angle <= -kPi) angle += 2.0 * kPi;
  }
  return angle;
}

Pose2::Pose2(double x, double y, double theta) : x_(x), y_(y), theta_(normalize_angle(theta)) {}

Pose2 Pose2::operator*(const Pose2& other) const {
  const double c = std::cos(theta_);
  const double s = std::sin(theta_);
  return {x_ + c * other.x_ - s * other.y_, y_ + s * other.x_ + c * other.y_, theta_ + other.theta_};
}

Pose2 Pose2::inverse() const {
  const double c = std::cos(theta_);
  const double s = std::sin(theta_);
  return {-c * x_ - s * y_, s * x_ - c * y_, -theta_};
}

Eigen::Vector2d Pose2::transform_point(const Eigen::Vector2d& p) const {
  const double c = std::cos(theta_);
  const double s = std::sin(theta_);
  return {x_ + c * p.x() - s * p.y(), y_ + s * p.x() + c * p.y()};
}

double Pose2::distance_to(const Pose2& other) const { return std::hypot(other.x_ - x_, other.y_ - y_); }

}  // namespace stopslam

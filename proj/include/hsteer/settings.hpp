// settings.hpp
// Measurement directions on the Bloch sphere.

#pragma once

#include <Eigen/Core>
#include <vector>

namespace hsteer {

using BlochVector = Eigen::Vector3d;

/// n distinct unit Bloch vectors. Each vector is an axis; its sign is a
/// labelling convention only.
class MeasurementSet {
 public:
  explicit MeasurementSet(std::vector<BlochVector> directions);

  [[nodiscard]] std::size_t size() const { return directions_.size(); }
  [[nodiscard]] const std::vector<BlochVector>& directions() const { return directions_; }
  [[nodiscard]] const BlochVector& operator[](std::size_t k) const { return directions_[k]; }

  /// Common rotation of every direction.
  [[nodiscard]] MeasurementSet rotated(const Eigen::Matrix3d& rotation) const;

 private:
  std::vector<BlochVector> directions_;
};

/// Axes of the Platonic-solid constructions:
///   2  -> {z, x}
///   3  -> {x, y, z} (octahedron)
///   4  -> cube body diagonals
///   6  -> icosahedron vertex axes (0, +-1, phi) and cyclic permutations
///   10 -> dodecahedron vertex axes, the dual of the n = 6 icosahedron
///   16 -> union of the n = 6 and n = 10 sets
/// Throws std::invalid_argument for any other n.
MeasurementSet platonic_settings(int n);

/// Approximately uniform axes on the upper hemisphere from a golden-angle
/// spiral: z_i = 1 - (i + 1/2)/n, azimuth i * pi (3 - sqrt5).
MeasurementSet spiral_settings(int n);

}  // namespace hsteer

// settings.cpp

#include "hsteer/settings.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hsteer {

MeasurementSet::MeasurementSet(std::vector<BlochVector> directions)
    : directions_(std::move(directions)) {
  if (directions_.empty()) throw std::invalid_argument("measurement set is empty");
  for (auto& d : directions_) {
    const double n = d.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("degenerate direction");
    if (std::abs(n - 1.0) > 1e-12) d /= n;
  }
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    for (std::size_t j = i + 1; j < directions_.size(); ++j) {
      if (std::abs(std::abs(directions_[i].dot(directions_[j])) - 1.0) < 1e-12) {
        throw std::invalid_argument("measurement axes must be pairwise distinct");
      }
    }
  }
}

MeasurementSet MeasurementSet::rotated(const Eigen::Matrix3d& rotation) const {
  std::vector<BlochVector> out;
  out.reserve(directions_.size());
  for (const auto& d : directions_) out.push_back(rotation * d);
  return MeasurementSet(std::move(out));
}

namespace {

std::vector<BlochVector> icosahedron_axes() {
  const double phi = std::numbers::phi;
  return {{0, 1, phi}, {0, -1, phi}, {1, phi, 0}, {-1, phi, 0}, {phi, 0, 1}, {-phi, 0, 1}};
}

std::vector<BlochVector> dodecahedron_axes() {
  const double phi = std::numbers::phi;
  const double inv = 1.0 / phi;
  return {{1, 1, 1},     {1, 1, -1},     {1, -1, 1},   {-1, 1, 1},  {0, phi, inv},
          {0, phi, -inv}, {inv, 0, phi}, {-inv, 0, phi}, {phi, inv, 0}, {phi, -inv, 0}};
}

}  // namespace

MeasurementSet platonic_settings(int n) {
  switch (n) {
    case 2:
      return MeasurementSet({{0, 0, 1}, {1, 0, 0}});
    case 3:
      return MeasurementSet({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    case 4:
      return MeasurementSet({{1, 1, 1}, {1, 1, -1}, {1, -1, 1}, {-1, 1, 1}});
    case 6:
      return MeasurementSet(icosahedron_axes());
    case 10:
      return MeasurementSet(dodecahedron_axes());
    case 16: {
      auto axes = icosahedron_axes();
      const auto dodeca = dodecahedron_axes();
      axes.insert(axes.end(), dodeca.begin(), dodeca.end());
      return MeasurementSet(std::move(axes));
    }
    default:
      throw std::invalid_argument("unsupported number of settings: " + std::to_string(n));
  }
}

MeasurementSet spiral_settings(int n) {
  if (n < 1) throw std::invalid_argument("spiral needs at least one direction");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<BlochVector> axes;
  axes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    const double az = golden * i;
    axes.emplace_back(r * std::cos(az), r * std::sin(az), z);
  }
  return MeasurementSet(std::move(axes));
}

}  // namespace hsteer

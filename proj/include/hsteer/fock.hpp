// fock.hpp
// Truncated multimode Fock-space states and the linear-optics / threshold
// detection primitives acting on them.

#pragma once

#include <array>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hsteer {

using Amplitude = std::complex<double>;

/// 2x2 single-photon transfer matrix. Column c holds the output amplitudes of
/// a photon entering input mode c.
using ModeMatrix = std::array<std::array<Amplitude, 2>, 2>;

enum class Polarization : std::uint8_t { kH = 0, kV = 1 };
enum class SpectralLabel : std::uint8_t { kMatched = 0, kOrthogonal = 1 };

struct ModeLabel {
  std::string arm;
  Polarization polarization = Polarization::kH;
  SpectralLabel internal = SpectralLabel::kMatched;

  auto operator<=>(const ModeLabel&) const = default;
};

/// Ordered set of optical modes. Modes are added one spatial arm at a time and
/// every arm owns exactly four modes: {H, V} x {matched, orthogonal}.
class ModeLayout {
 public:
  static constexpr std::size_t kModesPerArm = 4;

  ModeLayout() = default;
  explicit ModeLayout(const std::vector<std::string>& arms);

  /// Returns a copy with one more arm appended. Throws on duplicate names.
  [[nodiscard]] ModeLayout with_arm(std::string arm, bool environment = false) const;

  [[nodiscard]] std::size_t size() const { return arms_.size() * kModesPerArm; }
  [[nodiscard]] std::size_t arm_count() const { return arms_.size(); }
  [[nodiscard]] const std::vector<std::string>& arms() const { return arms_; }
  [[nodiscard]] bool has_arm(std::string_view arm) const;
  [[nodiscard]] bool is_environment_arm(std::string_view arm) const;
  [[nodiscard]] bool is_environment_mode(std::size_t mode) const;
  [[nodiscard]] std::size_t environment_arm_count() const;

  [[nodiscard]] ModeLabel label(std::size_t mode) const;
  [[nodiscard]] std::size_t index(std::string_view arm, Polarization pol,
                                  SpectralLabel internal) const;
  [[nodiscard]] std::optional<std::size_t> find(const ModeLabel& label) const;
  /// The four mode indices of an arm, ordered H-matched, H-orth, V-matched, V-orth.
  [[nodiscard]] std::array<std::size_t, 4> arm_modes(std::string_view arm) const;

  /// Concatenation; throws std::invalid_argument on arm-name collisions.
  [[nodiscard]] static ModeLayout concat(const ModeLayout& a, const ModeLayout& b);

  bool operator==(const ModeLayout&) const = default;

 private:
  std::size_t arm_position(std::string_view arm) const;

  std::vector<std::string> arms_;
  std::vector<bool> environment_;
};

/// Fock basis element: photon count per mode.
struct OccupationState {
  std::vector<std::uint8_t> counts;

  [[nodiscard]] int total() const;
  auto operator<=>(const OccupationState&) const = default;
};

/// Sparse superposition over occupation states. The truncation bounds the
/// total photon number; amplitude mass beyond it is absent, so the tail weight
/// is the norm deficit 1 - sum |a|^2.
class PhotonicState {
 public:
  PhotonicState(ModeLayout layout, int max_photons);

  static PhotonicState vacuum(ModeLayout layout, int max_photons);

  /// Accumulates amplitude onto a basis element. Elements above the truncation
  /// are dropped. Returns false when dropped.
  bool add(const OccupationState& occupation, Amplitude amplitude);

  [[nodiscard]] const ModeLayout& layout() const { return layout_; }
  [[nodiscard]] int max_photons() const { return max_photons_; }
  [[nodiscard]] const std::map<OccupationState, Amplitude>& amplitudes() const {
    return amplitudes_;
  }
  [[nodiscard]] Amplitude amplitude(const OccupationState& occupation) const;
  [[nodiscard]] double norm() const;
  [[nodiscard]] double tail_weight() const;
  [[nodiscard]] std::size_t support_size() const { return amplitudes_.size(); }

  /// Removes entries with |a|^2 below the threshold.
  void prune(double threshold = 1e-300);

 private:
  ModeLayout layout_;
  int max_photons_;
  std::map<OccupationState, Amplitude> amplitudes_;
};

/// Convex mixture of pure states. Weights sum to one.
struct StateEnsemble {
  struct Member {
    double weight;
    PhotonicState state;
  };
  std::vector<Member> members;

  static StateEnsemble pure(PhotonicState state);
  [[nodiscard]] double tail_weight() const;
};

struct ThresholdDetector {
  double efficiency = 1.0;
  double dark_count = 0.0;

  void validate() const;
  /// Click probability given n photons impinging.
  [[nodiscard]] double click_probability(int photons) const;
};

struct DetectorGroup {
  std::vector<std::size_t> modes;
  ThresholdDetector detector;
};

/// Joint click distribution; bit g of the pattern index is set when group g
/// fires.
struct ClickDistribution {
  std::vector<double> probability;
  double tail_weight = 0.0;

  [[nodiscard]] double total() const;
  [[nodiscard]] double marginal_click(std::size_t group) const;
};

/// General passive two-mode transform on modes (i, j).
PhotonicState apply_mode_transform(const PhotonicState& state, std::size_t mode_i,
                                   std::size_t mode_j, const ModeMatrix& matrix);

/// Symmetric beam splitter (i on reflection) acting per (polarization,
/// internal) sub-mode pair. The phase multiplies reflection into arm_a.
PhotonicState apply_beamsplitter(const PhotonicState& state, std::string_view arm_a,
                                 std::string_view arm_b, double transmissivity_h,
                                 double transmissivity_v, double phase = 0.0);

/// Loss as a beam splitter into a fresh environment arm appended to the layout.
PhotonicState apply_loss(const PhotonicState& state, std::string_view arm,
                         double transmission);

/// Same 2x2 polarization unitary on both internal components of an arm.
PhotonicState apply_polarization_unitary(const PhotonicState& state, std::string_view arm,
                                         const ModeMatrix& unitary);

ClickDistribution click_distribution(const PhotonicState& state,
                                     std::span<const DetectorGroup> groups);
ClickDistribution click_distribution(const StateEnsemble& ensemble,
                                     std::span<const DetectorGroup> groups);

/// Tensor product; the truncation defaults to the larger of the two.
PhotonicState tensor(const PhotonicState& a, const PhotonicState& b,
                     std::optional<int> max_photons = std::nullopt);
StateEnsemble tensor(const StateEnsemble& a, const StateEnsemble& b,
                     std::optional<int> max_photons = std::nullopt);

double norm(const PhotonicState& state);

struct ModeCondition {
  std::size_t mode;
  int photons;
};

struct Projection {
  PhotonicState state;
  double probability;
};

/// Conditions on exact photon numbers in the listed modes and renormalizes.
Projection project(const PhotonicState& state, std::span<const ModeCondition> conditions);

/// Photon count summed over all modes of an arm.
int arm_photons(const OccupationState& occupation, const ModeLayout& layout,
                std::string_view arm);

/// dB attenuation to linear transmission, 10^(-dB/10).
double db_to_transmission(double loss_db);

}  // namespace hsteer

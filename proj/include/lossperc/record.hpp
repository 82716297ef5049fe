#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace lossperc {

/// Trajectory of one microcanonical sweep: largest component size and
/// spanning flag after each of the T photon additions (index 0 is the state
/// before any photon is added).
struct SweepRecord {
  std::size_t total_photons = 0;
  std::vector<std::uint32_t> largest;
  std::vector<std::uint8_t> spanning;
  /// Smallest photon count at which a spanning cluster exists.
  std::optional<std::size_t> onset;
  std::uint64_t seed = 0;

  friend bool operator==(const SweepRecord&, const SweepRecord&) = default;
};

}  // namespace lossperc

#pragma once

#include "coherence_pursuit/pgm.hpp"
#include "coherence_pursuit/types.hpp"

#include <cstdint>
#include <optional>

namespace cop {

struct SaliencyConfig {
  int patch = 10;
  Index r = 2;
  double q = 0.5;  ///< fraction of patches dropped before fitting the basis
  CoherencePower power = CoherencePower::Squared;
  unsigned threads = 0;
};

struct SaliencyResult {
  /// Saliency per patch in [0, 1], row-major over the patch grid.
  Matrix patch_saliency;
  GrayImage patch_image;  ///< one pixel per patch
  GrayImage full_image;   ///< nearest-neighbour upsampled to the input size
  int cropped_width = 0;
  int cropped_height = 0;
  bool cropped = false;  ///< input was cropped from the top-left to a patch multiple
  /// Rank-r fit to the most coherent (1 - q) share of patches, when enough
  /// non-zero patches exist.
  std::optional<SubspaceBasis> background;
};

/// Non-overlapping patch x patch windows become columns; a patch's saliency
/// is 1 - p(i) / max p over the normalized patches. All-zero patches get
/// saliency 0. Identical patches produce a uniform map.
SaliencyResult saliency(const GrayImage& img, const SaliencyConfig& cfg = {});

}  // namespace cop

#include "coherence_pursuit/saliency.hpp"

#include "coherence_pursuit/cop.hpp"
#include "coherence_pursuit/errors.hpp"
#include "coherence_pursuit/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace cop {

SaliencyResult saliency(const GrayImage& img, const SaliencyConfig& cfg) {
  if (cfg.patch < 1) throw InvalidArgument("saliency: patch must be >= 1");
  if (img.width < 1 || img.height < 1 ||
      img.pixels.size() != static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height))
    throw InvalidArgument("saliency: malformed image");
  const int gw = img.width / cfg.patch;
  const int gh = img.height / cfg.patch;
  if (gw < 1 || gh < 1)
    throw InvalidArgument("saliency: image smaller than one patch after cropping");
  const Index n = static_cast<Index>(gw) * gh;
  const Index dim = static_cast<Index>(cfg.patch) * cfg.patch;
  if (cfg.r < 1 || cfg.r > std::min(dim, n))
    throw InvalidArgument("saliency: r must be in 1..min(patch^2, number of patches)");

  SaliencyResult res;
  res.cropped_width = gw * cfg.patch;
  res.cropped_height = gh * cfg.patch;
  res.cropped = res.cropped_width != img.width || res.cropped_height != img.height;

  Matrix d(dim, n);
  for (int pr = 0; pr < gh; ++pr) {
    for (int pc = 0; pc < gw; ++pc) {
      const Index j = static_cast<Index>(pr) * gw + pc;
      for (int y = 0; y < cfg.patch; ++y)
        for (int x = 0; x < cfg.patch; ++x)
          d(static_cast<Index>(y) * cfg.patch + x, j) =
              static_cast<double>(img.at(pr * cfg.patch + y, pc * cfg.patch + x));
    }
  }

  res.patch_saliency = Matrix::Zero(gh, gw);
  const NormalizedColumns cols = normalize_columns(d, ZeroColumnPolicy::Lenient);
  if (cols.x.cols() > 0) {
    const CoherenceProfile prof = coherence_kernel(cols.x, cfg.power, kDefaultBlock, cfg.threads);
    const double pmax = prof.values.maxCoeff();
    for (std::size_t k = 0; k < cols.survivors.size(); ++k) {
      const Index j = cols.survivors[k];
      const double v = prof.values(static_cast<Index>(k));
      res.patch_saliency(j / gw, j % gw) = pmax > 0 ? std::clamp(1.0 - v / pmax, 0.0, 1.0) : 0.0;
    }
    if (cols.x.cols() >= cfg.r) {
      const auto keep = top_fraction_sampling(prof, cfg.q);
      Matrix y(dim, static_cast<Index>(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) y.col(static_cast<Index>(j)) = cols.x.col(keep[j]);
      if (y.cols() >= cfg.r) res.background = top_r_singular_subspace(y, cfg.r);
    }
  }

  res.patch_image.width = gw;
  res.patch_image.height = gh;
  res.patch_image.maxval = 255;
  res.patch_image.pixels.resize(static_cast<std::size_t>(n));
  for (int pr = 0; pr < gh; ++pr)
    for (int pc = 0; pc < gw; ++pc)
      res.patch_image.at(pr, pc) =
          static_cast<std::uint16_t>(std::lround(255.0 * res.patch_saliency(pr, pc)));

  res.full_image.width = img.width;
  res.full_image.height = img.height;
  res.full_image.maxval = 255;
  res.full_image.pixels.resize(img.pixels.size());
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      res.full_image.at(y, x) =
          res.patch_image.at(std::min(y / cfg.patch, gh - 1), std::min(x / cfg.patch, gw - 1));
  return res;
}

}  // namespace cop

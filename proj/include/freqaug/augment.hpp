#pragma once

// Frequency-component replacement (same-class low/high band swap),
// amplitude-phase recombination, and the crop/flip baseline transforms.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "freqaug/errors.hpp"
#include "freqaug/image.hpp"
#include "freqaug/parallel.hpp"
#include "freqaug/rng.hpp"
#include "freqaug/spectral.hpp"

namespace freqaug {

enum class AugmentMode { kRfc, kApr, kRfcApr };
enum class CompositionOrder { kRfcThenApr, kAprThenRfc };

inline AugmentMode parse_augment_mode(const std::string& s) {
  if (s == "rfc") return AugmentMode::kRfc;
  if (s == "apr") return AugmentMode::kApr;
  if (s == "rfc+apr") return AugmentMode::kRfcApr;
  throw ArgumentError("unknown augmentation mode '" + s + "' (expected rfc, apr or rfc+apr)");
}

inline std::string to_string(AugmentMode m) {
  switch (m) {
    case AugmentMode::kRfc: return "rfc";
    case AugmentMode::kApr: return "apr";
    case AugmentMode::kRfcApr: return "rfc+apr";
  }
  return "?";
}

struct AugmentConfig {
  double radius = 4.0;
  double apply_probability = 0.5;
  AugmentMode mode = AugmentMode::kRfc;
  CompositionOrder order = CompositionOrder::kRfcThenApr;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(apply_probability >= 0.0 && apply_probability <= 1.0)) {
      throw ArgumentError("apply probability must lie in [0,1]");
    }
    if (!(radius >= 0.0)) throw ArgumentError("radius must be >= 0");
  }
};

namespace detail {

inline void require_same_shape(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("image shapes differ: " + to_string(a.shape()) + " vs " +
                     to_string(b.shape()));
  }
}

}  // namespace detail

/// Swaps the high band of x with that of a same-class partner:
///   x_mix  = F^-1(M_l z)  + F^-1(M_h z')
///   x'_mix = F^-1(M_l z') + F^-1(M_h z)
/// Each pair of inverse transforms is evaluated as one inverse of the summed
/// spectrum (linearity).
inline std::pair<ImageTensor, ImageTensor> rfc_swap(const ImageTensor& x,
                                                    const ImageTensor& x_prime, double radius,
                                                    Clamp clamp = Clamp::kYes) {
  detail::require_same_shape(x, x_prime);
  if (x.label() && x_prime.label() && *x.label() != *x_prime.label()) {
    throw ClassError("frequency swap needs a same-class pair, got labels " +
                     std::to_string(*x.label()) + " and " + std::to_string(*x_prime.label()));
  }
  const std::optional<int> label = x.label() ? x.label() : x_prime.label();
  const auto [low, high] = make_masks(x.height(), x.width(), radius);
  const auto [z_l, z_h] = band_split(dft2(x), low, high);
  const auto [zp_l, zp_h] = band_split(dft2(x_prime), low, high);
  return {idft2(z_l + zp_h, clamp, label), idft2(zp_l + z_h, clamp, label)};
}

/// Phase of `phase_source` combined with the amplitude of `amplitude_source`.
inline ImageTensor apr_recombine(const ImageTensor& phase_source,
                                 const ImageTensor& amplitude_source,
                                 Clamp clamp = Clamp::kYes) {
  detail::require_same_shape(phase_source, amplitude_source);
  PolarSpectrum mixed = to_polar(dft2(phase_source));
  mixed.amplitude = to_polar(dft2(amplitude_source)).amplitude;
  return idft2(from_polar(mixed), clamp, phase_source.label());
}

/// Uniform same-class partner for dataset position `pos`, excluding `pos`
/// itself unless it is alone in its class.
inline std::size_t draw_partner(const LabeledDataset& dataset, std::size_t pos,
                                SeedStream& stream) {
  const auto& members = dataset.members(*dataset[pos].label());
  if (members.size() <= 1) return pos;
  auto k = static_cast<std::size_t>(stream.below(members.size() - 1));
  const auto self = std::lower_bound(members.begin(), members.end(), pos) - members.begin();
  if (k >= static_cast<std::size_t>(self)) ++k;
  return members[k];
}

namespace detail {

inline std::vector<ImageTensor> augment_one(const LabeledDataset& ds, std::size_t pos,
                                            const AugmentConfig& cfg, SeedStream stream) {
  const ImageTensor& x = ds[pos];
  const double p = cfg.apply_probability;
  std::vector<ImageTensor> working{x};
  bool transformed = false;

  const auto apply_rfc = [&] {
    std::vector<ImageTensor> next;
    for (const ImageTensor& w : working) {
      auto [a, b] = rfc_swap(w, ds[draw_partner(ds, pos, stream)], cfg.radius);
      next.push_back(std::move(a));
      next.push_back(std::move(b));
    }
    working = std::move(next);
    transformed = true;
  };
  const auto apply_apr = [&] {
    for (ImageTensor& w : working) w = apr_recombine(w, ds[draw_partner(ds, pos, stream)]);
    transformed = true;
  };

  switch (cfg.mode) {
    case AugmentMode::kRfc:
      if (stream.bernoulli(p)) apply_rfc();
      break;
    case AugmentMode::kApr:
      if (stream.bernoulli(p)) apply_apr();
      break;
    case AugmentMode::kRfcApr: {
      const bool first = stream.bernoulli(p);
      const bool second = stream.bernoulli(p);
      if (cfg.order == CompositionOrder::kRfcThenApr) {
        if (first) apply_rfc();
        if (second) apply_apr();
      } else {
        if (first) apply_apr();
        if (second) apply_rfc();
      }
      break;
    }
  }
  if (!transformed) return {};
  return working;
}

}  // namespace detail

/// Offline expansion: originals first, then every augmented image in source
/// order. Image i draws only from stream split(i), so the output does not
/// depend on `threads`.
inline LabeledDataset augment_batch(const LabeledDataset& dataset, const AugmentConfig& config,
                                    std::size_t threads = 1) {
  config.validate();
  const SeedStream root(config.seed);
  std::vector<std::vector<ImageTensor>> extra(dataset.size());
  parallel_for(dataset.size(), threads, [&](std::size_t i) {
    extra[i] = detail::augment_one(dataset, i, config, root.split(i));
  });
  std::vector<ImageTensor> out(dataset.images());
  for (auto& group : extra) {
    for (auto& img : group) out.push_back(std::move(img));
  }
  return LabeledDataset(std::move(out), dataset.class_count());
}

// --- Baseline spatial transforms -------------------------------------------

/// Window of the zero-padded image starting at (row_offset, col_offset) in
/// padded coordinates; offsets range over [0, 2 * padding].
inline ImageTensor crop_at(const ImageTensor& image, std::size_t padding, std::size_t row_offset,
                           std::size_t col_offset) {
  const Shape s = image.shape();
  std::vector<double> out(s.size(), 0.0);
  for (std::size_t c = 0; c < s.channels; ++c) {
    for (std::size_t i = 0; i < s.height; ++i) {
      for (std::size_t j = 0; j < s.width; ++j) {
        const auto si = static_cast<std::ptrdiff_t>(i + row_offset) - static_cast<std::ptrdiff_t>(padding);
        const auto sj = static_cast<std::ptrdiff_t>(j + col_offset) - static_cast<std::ptrdiff_t>(padding);
        if (si < 0 || sj < 0 || si >= static_cast<std::ptrdiff_t>(s.height) ||
            sj >= static_cast<std::ptrdiff_t>(s.width)) {
          continue;
        }
        out[(c * s.height + i) * s.width + j] =
            image.at(c, static_cast<std::size_t>(si), static_cast<std::size_t>(sj));
      }
    }
  }
  return ImageTensor(s, std::move(out), image.label());
}

inline ImageTensor random_crop(const ImageTensor& image, std::size_t padding, SeedStream& stream) {
  const std::uint64_t span = 2 * padding + 1;
  const auto oi = static_cast<std::size_t>(stream.below(span));
  const auto oj = static_cast<std::size_t>(stream.below(span));
  return crop_at(image, padding, oi, oj);
}

inline ImageTensor hflip(const ImageTensor& image) {
  const Shape s = image.shape();
  std::vector<double> out(s.size());
  for (std::size_t c = 0; c < s.channels; ++c)
    for (std::size_t i = 0; i < s.height; ++i)
      for (std::size_t j = 0; j < s.width; ++j)
        out[(c * s.height + i) * s.width + j] = image.at(c, i, s.width - 1 - j);
  return ImageTensor(s, std::move(out), image.label());
}

inline ImageTensor random_hflip(const ImageTensor& image, SeedStream& stream) {
  return stream.bernoulli(0.5) ? hflip(image) : image;
}

// --- Online (per-batch) augmentation ---------------------------------------

/// Per-batch transform used during training. Receives the minibatch and a
/// stream dedicated to that batch.
using BatchTransform =
    std::function<std::vector<ImageTensor>(std::vector<ImageTensor>, SeedStream&)>;

struct OnlineAugment {
  bool baseline = true;   // random crop (padding 4) + horizontal flip
  std::size_t crop_padding = 4;
  std::optional<AugmentConfig> frequency;  // RFC / APR, partners drawn within the batch
};

/// Builds a batch transform. Frequency augmentation replaces an image by its
/// first augmented output (batch size is kept); partners are same-label
/// images of the same batch, the image itself when it has no classmate.
inline BatchTransform make_online_transform(OnlineAugment cfg) {
  if (cfg.frequency) cfg.frequency->validate();
  return [cfg](std::vector<ImageTensor> batch, SeedStream& stream) {
    if (cfg.frequency) {
      const auto& f = *cfg.frequency;
      std::vector<ImageTensor> labeled(batch);
      int max_label = 0;
      for (const auto& img : labeled) {
        if (!img.label()) throw LabelError("online frequency augmentation needs labeled images");
        max_label = std::max(max_label, *img.label());
      }
      const LabeledDataset pool(std::move(labeled), static_cast<std::size_t>(max_label) + 1);
      for (std::size_t i = 0; i < batch.size(); ++i) {
        auto out = detail::augment_one(pool, i, f, stream.split(i));
        if (!out.empty()) batch[i] = std::move(out.front());
      }
    }
    if (cfg.baseline) {
      for (auto& img : batch) img = random_hflip(random_crop(img, cfg.crop_padding, stream), stream);
    }
    return batch;
  };
}

}  // namespace freqaug

#pragma once

// Test-only helpers: independent oracles and synthetic data. Nothing here
// calls into the spectral module, so the oracles stay independent of the
// code they check.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "freqaug/image.hpp"
#include "freqaug/rng.hpp"

namespace freqaug::testing {

inline ImageTensor random_image(Shape shape, SeedStream& rng, std::optional<int> label = std::nullopt) {
  std::vector<double> px(shape.size());
  for (double& v : px) v = rng.uniform();
  return ImageTensor(shape, std::move(px), label);
}

/// Direct O((HW)^2) DFT of one channel straight from the definition,
/// returned in the centered layout (DC at (H/2, W/2)).
inline std::vector<std::complex<double>> direct_centered_dft(const ImageTensor& x, std::size_t c) {
  const std::size_t h = x.height(), w = x.width();
  std::vector<std::complex<double>> out(h * w);
  for (std::size_t u = 0; u < h; ++u) {
    for (std::size_t v = 0; v < w; ++v) {
      std::complex<double> acc = 0;
      for (std::size_t i = 0; i < h; ++i)
        for (std::size_t j = 0; j < w; ++j) {
          const double ang = -2.0 * std::numbers::pi *
                             (static_cast<double>((u * i) % h) / static_cast<double>(h) +
                              static_cast<double>((v * j) % w) / static_cast<double>(w));
          acc += x.at(c, i, j) * std::complex<double>(std::cos(ang), std::sin(ang));
        }
      out[((u + h / 2) % h) * w + (v + w / 2) % w] = acc;
    }
  }
  return out;
}

/// Number of integer offsets (di, dj) inside an h x w grid centred at
/// (h/2, w/2) with di^2 + dj^2 < r^2, counted in integers when r is integral.
inline std::size_t lattice_disk_count(std::size_t h, std::size_t w, long long r) {
  std::size_t n = 0;
  for (long long i = 0; i < static_cast<long long>(h); ++i)
    for (long long j = 0; j < static_cast<long long>(w); ++j) {
      const long long di = i - static_cast<long long>(h / 2);
      const long long dj = j - static_cast<long long>(w / 2);
      if (di * di + dj * dj < r * r) ++n;
    }
  return n;
}

/// Plain 2D convolution with a (2r+1)^2 kernel and half-sample reflection,
/// written without separability.
inline std::vector<double> direct_convolve(const std::vector<double>& plane, std::size_t h,
                                           std::size_t w, const std::vector<double>& kernel_1d) {
  const auto r = static_cast<long long>(kernel_1d.size() / 2);
  auto reflect = [](long long k, long long n) {
    while (k < 0 || k >= n) k = k < 0 ? -k - 1 : 2 * n - k - 1;
    return k;
  };
  std::vector<double> out(h * w, 0.0);
  for (long long i = 0; i < static_cast<long long>(h); ++i)
    for (long long j = 0; j < static_cast<long long>(w); ++j) {
      double acc = 0.0;
      for (long long a = -r; a <= r; ++a)
        for (long long b = -r; b <= r; ++b) {
          const auto ii = reflect(i + a, static_cast<long long>(h));
          const auto jj = reflect(j + b, static_cast<long long>(w));
          acc += kernel_1d[static_cast<std::size_t>(a + r)] * kernel_1d[static_cast<std::size_t>(b + r)] *
                 plane[static_cast<std::size_t>(ii) * w + static_cast<std::size_t>(jj)];
        }
      out[static_cast<std::size_t>(i) * w + static_cast<std::size_t>(j)] = acc;
    }
  return out;
}

/// Class-conditional textures: class k is a tinted sinusoidal grating with
/// its own orientation and frequency plus per-pixel noise. Balanced labels
/// (image n has label n % classes).
inline LabeledDataset synthetic_dataset(std::size_t count, std::size_t classes, Shape shape,
                                        std::uint64_t seed, double noise = 0.15) {
  SeedStream rng(seed);
  std::vector<ImageTensor> images;
  images.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const int label = static_cast<int>(n % classes);
    const double fu = 1.0 + static_cast<double>(label % 3);
    const double fv = 1.0 + static_cast<double>((label / 3) % 4);
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    std::vector<double> px(shape.size());
    for (std::size_t c = 0; c < shape.channels; ++c) {
      const double tint = 0.15 * std::cos(static_cast<double>(label + 2 * c));
      for (std::size_t i = 0; i < shape.height; ++i)
        for (std::size_t j = 0; j < shape.width; ++j) {
          const double t = 2.0 * std::numbers::pi *
                               (fu * static_cast<double>(i) / static_cast<double>(shape.height) +
                                fv * static_cast<double>(j) / static_cast<double>(shape.width)) +
                           phase;
          const double v = 0.5 + tint + 0.25 * std::sin(t) + noise * (rng.uniform() - 0.5);
          px[(c * shape.height + i) * shape.width + j] = std::clamp(v, 0.0, 1.0);
        }
    }
    images.emplace_back(shape, std::move(px), label);
  }
  return LabeledDataset(std::move(images), classes);
}

/// Unlabeled uniform-noise images (the synthetic OOD set).
inline std::vector<ImageTensor> uniform_noise_images(std::size_t count, Shape shape,
                                                     std::uint64_t seed) {
  SeedStream rng(seed);
  std::vector<ImageTensor> out;
  for (std::size_t n = 0; n < count; ++n) out.push_back(random_image(shape, rng));
  return out;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace freqaug::testing

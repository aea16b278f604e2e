#pragma once

// 2D DFT with a center-shifted layout, circular band masks and polar
// (amplitude/phase) decomposition.
//
// Conventions:
//   forward  Z[u,v] = sum_{i,j} x[i,j] exp(-2 pi i (u i / H + v j / W))
//   inverse  x[i,j] = 1/(H W) sum_{u,v} Z[u,v] exp(+2 pi i (...))
//   After the forward transform the spectrum is shifted so that frequency
//   (0,0) sits at (floor(H/2), floor(W/2)).

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "freqaug/errors.hpp"
#include "freqaug/image.hpp"

namespace freqaug {

using cplx = std::complex<double>;

// --- 1D transforms ---------------------------------------------------------

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 transform. sign = -1 forward, +1 inverse
// (unnormalized both ways).
inline void fft_pow2(std::span<cplx> a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    for (std::size_t k = 0; k < half; ++k) {
      // Twiddles computed directly rather than by repeated multiplication so
      // error does not accumulate along the butterfly.
      const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(len);
      const cplx w(std::cos(ang), std::sin(ang));
      for (std::size_t s = 0; s < n; s += len) {
        const cplx u = a[s + k];
        const cplx v = a[s + k + half] * w;
        a[s + k] = u + v;
        a[s + k + half] = u - v;
      }
    }
  }
}

// O(n^2) fallback for lengths that are not powers of two. Index products are
// reduced mod n before the angle is formed to keep the twiddles exact.
inline void dft_naive(std::span<cplx> a, int sign) {
  const std::size_t n = a.size();
  std::vector<cplx> tw(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(n);
    tw[k] = cplx(std::cos(ang), std::sin(ang));
  }
  std::vector<cplx> out(n);
  for (std::size_t u = 0; u < n; ++u) {
    cplx acc = 0;
    for (std::size_t t = 0; t < n; ++t) acc += a[t] * tw[(u * t) % n];
    out[u] = acc;
  }
  std::copy(out.begin(), out.end(), a.begin());
}

inline void transform_1d(std::span<cplx> a, int sign) {
  if (a.size() <= 1) return;
  if (is_pow2(a.size())) {
    fft_pow2(a, sign);
  } else {
    dft_naive(a, sign);
  }
}

// Separable 2D transform of one row-major plane.
inline void transform_2d(std::span<cplx> plane, std::size_t h, std::size_t w, int sign) {
  for (std::size_t i = 0; i < h; ++i) transform_1d(plane.subspan(i * w, w), sign);
  std::vector<cplx> col(h);
  for (std::size_t j = 0; j < w; ++j) {
    for (std::size_t i = 0; i < h; ++i) col[i] = plane[i * w + j];
    transform_1d(col, sign);
    for (std::size_t i = 0; i < h; ++i) plane[i * w + j] = col[i];
  }
}

// forward: natural -> centered (fftshift); !forward: centered -> natural.
template <class T>
void shift_plane(std::span<T> plane, std::size_t h, std::size_t w, bool forward) {
  std::vector<T> tmp(plane.begin(), plane.end());
  const std::size_t si = h / 2, sj = w / 2;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t ci = (i + si) % h, cj = (j + sj) % w;
      if (forward) {
        plane[ci * w + cj] = tmp[i * w + j];
      } else {
        plane[i * w + j] = tmp[ci * w + cj];
      }
    }
  }
}

}  // namespace detail

// --- Types -----------------------------------------------------------------

/// Center-shifted complex spectrum, one plane per channel.
struct Spectrum {
  Shape shape;
  std::vector<cplx> coeffs;

  Spectrum() = default;
  Spectrum(Shape s, std::vector<cplx> c) : shape(s), coeffs(std::move(c)) {
    if (coeffs.size() != shape.size()) {
      throw ShapeError("spectrum length " + std::to_string(coeffs.size()) +
                       " does not match shape " + to_string(shape));
    }
  }
  static Spectrum zeros(Shape s) { return Spectrum(s, std::vector<cplx>(s.size())); }

  std::size_t center_row() const { return shape.height / 2; }
  std::size_t center_col() const { return shape.width / 2; }

  const cplx& at(std::size_t c, std::size_t i, std::size_t j) const {
    return coeffs[(c * shape.height + i) * shape.width + j];
  }
  cplx& at(std::size_t c, std::size_t i, std::size_t j) {
    return coeffs[(c * shape.height + i) * shape.width + j];
  }

  Spectrum& operator+=(const Spectrum& o) {
    if (o.shape != shape) throw ShapeError("spectrum shapes differ");
    for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] += o.coeffs[k];
    return *this;
  }
  friend Spectrum operator+(Spectrum a, const Spectrum& b) { return a += b; }
};

enum class MaskKind { kLowPass, kHighPass };

/// Binary disk (low-pass) or its complement (high-pass) around the DC index.
struct FreqMask {
  std::size_t height = 0;
  std::size_t width = 0;
  double radius = 0.0;
  MaskKind kind = MaskKind::kLowPass;
  std::vector<std::uint8_t> bits;

  std::uint8_t at(std::size_t i, std::size_t j) const { return bits[i * width + j]; }
  std::size_t popcount() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
  }
};

struct PolarSpectrum {
  Shape shape;
  std::vector<double> amplitude;
  std::vector<double> phase;
};

// --- Operations ------------------------------------------------------------

inline Spectrum dft2(const ImageTensor& image) {
  const Shape s = image.shape();
  std::vector<cplx> coeffs(image.data().begin(), image.data().end());
  for (std::size_t c = 0; c < s.channels; ++c) {
    std::span<cplx> plane(coeffs.data() + c * s.plane(), s.plane());
    detail::transform_2d(plane, s.height, s.width, -1);
    detail::shift_plane(plane, s.height, s.width, true);
  }
  return Spectrum(s, std::move(coeffs));
}

/// Inverse transform keeping the complex result; idft2 takes its real part.
inline std::vector<cplx> idft2_complex(const Spectrum& spectrum) {
  const Shape s = spectrum.shape;
  std::vector<cplx> values = spectrum.coeffs;
  const double scale = 1.0 / static_cast<double>(s.plane());
  for (std::size_t c = 0; c < s.channels; ++c) {
    std::span<cplx> plane(values.data() + c * s.plane(), s.plane());
    detail::shift_plane(plane, s.height, s.width, false);
    detail::transform_2d(plane, s.height, s.width, +1);
    for (cplx& v : plane) v *= scale;
  }
  return values;
}

/// Real part of the inverse transform. For spectra of real images (and any
/// Hermitian-symmetric masking of them) the discarded imaginary part is
/// round-off only.
inline ImageTensor idft2(const Spectrum& spectrum, Clamp clamp = Clamp::kNo,
                         std::optional<int> label = std::nullopt) {
  const auto values = idft2_complex(spectrum);
  std::vector<double> re(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) re[k] = values[k].real();
  return finish(ImageTensor(spectrum.shape, std::move(re), label), clamp);
}

/// Low-pass disk (distance to DC strictly below radius) and its complement.
inline std::pair<FreqMask, FreqMask> make_masks(std::size_t height, std::size_t width,
                                                double radius) {
  if (!(radius >= 0.0)) throw DomainError("mask radius must be >= 0");
  FreqMask low{height, width, radius, MaskKind::kLowPass, std::vector<std::uint8_t>(height * width)};
  FreqMask high{height, width, radius, MaskKind::kHighPass, std::vector<std::uint8_t>(height * width)};
  const double ci = static_cast<double>(height / 2);
  const double cj = static_cast<double>(width / 2);
  for (std::size_t i = 0; i < height; ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      const double di = static_cast<double>(i) - ci;
      const double dj = static_cast<double>(j) - cj;
      const bool inside = std::sqrt(di * di + dj * dj) < radius;
      low.bits[i * width + j] = inside ? 1 : 0;
      high.bits[i * width + j] = inside ? 0 : 1;
    }
  }
  return {std::move(low), std::move(high)};
}

/// Elementwise product of a mask with every channel plane of a spectrum.
inline Spectrum apply_mask(const Spectrum& spectrum, const FreqMask& mask) {
  if (mask.height != spectrum.shape.height || mask.width != spectrum.shape.width) {
    throw ShapeError("mask is " + std::to_string(mask.height) + "x" +
                     std::to_string(mask.width) + " but spectrum is " +
                     to_string(spectrum.shape));
  }
  Spectrum out = spectrum;
  const std::size_t plane = spectrum.shape.plane();
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) {
    if (!mask.bits[k % plane]) out.coeffs[k] = 0.0;
  }
  return out;
}

inline std::pair<Spectrum, Spectrum> band_split(const Spectrum& spectrum, const FreqMask& low,
                                                const FreqMask& high) {
  return {apply_mask(spectrum, low), apply_mask(spectrum, high)};
}

inline PolarSpectrum to_polar(const Spectrum& spectrum) {
  PolarSpectrum p{spectrum.shape, std::vector<double>(spectrum.coeffs.size()),
                  std::vector<double>(spectrum.coeffs.size())};
  for (std::size_t k = 0; k < spectrum.coeffs.size(); ++k) {
    const cplx z = spectrum.coeffs[k];
    p.amplitude[k] = std::abs(z);
    // arg(0) is defined as 0; atan2(+0, x<0) already yields +pi so the range
    // is (-pi, pi] except for -0.0 imaginary parts, which are normalized.
    if (z == cplx(0.0, 0.0)) {
      p.phase[k] = 0.0;
    } else {
      const double im = z.imag() == 0.0 ? 0.0 : z.imag();
      p.phase[k] = std::atan2(im, z.real());
    }
  }
  return p;
}

inline Spectrum from_polar(const PolarSpectrum& polar) {
  if (polar.amplitude.size() != polar.shape.size() || polar.phase.size() != polar.shape.size()) {
    throw ShapeError("polar spectrum sizes do not match shape " + to_string(polar.shape));
  }
  std::vector<cplx> coeffs(polar.amplitude.size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!(polar.amplitude[k] >= 0.0)) {
      throw DomainError("negative amplitude at coefficient " + std::to_string(k));
    }
    coeffs[k] = std::polar(polar.amplitude[k], polar.phase[k]);
  }
  return Spectrum(polar.shape, std::move(coeffs));
}

}  // namespace freqaug

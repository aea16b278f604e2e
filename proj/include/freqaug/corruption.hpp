#pragma once

// Four of the CIFAR-10-C corruption families (gaussian noise, gaussian blur,
// fog, contrast) at severities 1..5. Severity parameters come from a
// CorruptionTable; the built-in table mirrors data/corruption_constants.txt.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "freqaug/errors.hpp"
#include "freqaug/image.hpp"
#include "freqaug/parallel.hpp"
#include "freqaug/rng.hpp"

namespace freqaug {

enum class CorruptionKind { kGaussianNoise, kGaussianBlur, kFog, kContrast };

inline const std::vector<std::pair<CorruptionKind, std::string>>& corruption_names() {
  static const std::vector<std::pair<CorruptionKind, std::string>> names = {
      {CorruptionKind::kGaussianNoise, "gaussian_noise"},
      {CorruptionKind::kGaussianBlur, "gaussian_blur"},
      {CorruptionKind::kFog, "fog"},
      {CorruptionKind::kContrast, "contrast"},
  };
  return names;
}

inline std::string to_string(CorruptionKind k) {
  for (const auto& [kind, name] : corruption_names())
    if (kind == k) return name;
  return "?";
}

inline CorruptionKind parse_corruption_kind(const std::string& s) {
  for (const auto& [kind, name] : corruption_names())
    if (name == s) return kind;
  throw ArgumentError("unknown corruption kind '" + s + "'");
}

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::kGaussianNoise;
  int severity = 1;
  std::uint64_t seed = 0;
};

/// Parameter lists keyed by (kind, severity).
///   gaussian_noise: sigma          gaussian_blur: sigma
///   contrast: factor               fog: strength, octave amplitude decay
class CorruptionTable {
 public:
  static CorruptionTable builtin() {
    CorruptionTable t;
    const double noise[] = {0.04, 0.06, 0.08, 0.09, 0.10};
    const double blur[] = {0.4, 0.6, 0.7, 0.8, 1.0};
    const double contrast[] = {0.75, 0.5, 0.4, 0.3, 0.15};
    const double fog[] = {0.2, 0.5, 0.75, 1.0, 1.5};
    for (int s = 1; s <= 5; ++s) {
      t.set(CorruptionKind::kGaussianNoise, s, {noise[s - 1]});
      t.set(CorruptionKind::kGaussianBlur, s, {blur[s - 1]});
      t.set(CorruptionKind::kContrast, s, {contrast[s - 1]});
      t.set(CorruptionKind::kFog, s, {fog[s - 1], 0.7});
    }
    return t;
  }

  /// Text format: one `kind:severity = p1 p2 ...` per line, '#' comments.
  static CorruptionTable parse(std::istream& in) {
    CorruptionTable t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto eq = line.find('=');
      const auto colon = line.find(':');
      if (eq == std::string::npos || colon == std::string::npos || colon > eq) {
        throw FormatError("corruption constants line " + std::to_string(lineno) +
                          ": expected 'kind:severity = values'");
      }
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t\r") + 1);
        return s;
      };
      const CorruptionKind kind = parse_corruption_kind(trim(line.substr(0, colon)));
      int severity = 0;
      try {
        severity = std::stoi(trim(line.substr(colon + 1, eq - colon - 1)));
      } catch (const std::exception&) {
        throw FormatError("corruption constants line " + std::to_string(lineno) +
                          ": bad severity");
      }
      std::istringstream vals(line.substr(eq + 1));
      std::vector<double> params;
      for (double v; vals >> v;) params.push_back(v);
      if (!vals.eof()) {
        throw FormatError("corruption constants line " + std::to_string(lineno) +
                          ": non-numeric parameter");
      }
      t.set(kind, severity, std::move(params));
    }
    return t;
  }

  static CorruptionTable load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return parse(in);
  }

  void set(CorruptionKind kind, int severity, std::vector<double> params) {
    check_severity(severity);
    const std::size_t need = kind == CorruptionKind::kFog ? 2 : 1;
    if (params.size() != need) {
      throw FormatError(to_string(kind) + ":" + std::to_string(severity) + " needs " +
                        std::to_string(need) + " parameter(s)");
    }
    params_[{kind, severity}] = std::move(params);
  }

  const std::vector<double>& get(CorruptionKind kind, int severity) const {
    check_severity(severity);
    auto it = params_.find({kind, severity});
    if (it == params_.end()) {
      throw ArgumentError("no constants for " + to_string(kind) + ":" + std::to_string(severity));
    }
    return it->second;
  }

  friend bool operator==(const CorruptionTable&, const CorruptionTable&) = default;

 private:
  static void check_severity(int severity) {
    if (severity < 1 || severity > 5) {
      throw ArgumentError("severity " + std::to_string(severity) + " outside 1..5");
    }
  }

  std::map<std::pair<CorruptionKind, int>, std::vector<double>> params_;
};

// --- Individual corruptions -------------------------------------------------

inline ImageTensor add_gaussian_noise(const ImageTensor& image, double sigma, SeedStream& stream) {
  std::vector<double> out(image.data().begin(), image.data().end());
  for (double& v : out) v = std::clamp(v + sigma * stream.normal(), 0.0, 1.0);
  return ImageTensor(image.shape(), std::move(out), image.label());
}

namespace detail {

// Half-sample symmetric reflection (d c b a | a b c d | d c b a), periodic
// in 2n so it stays valid for kernels wider than the image.
inline std::size_t reflect_index(std::ptrdiff_t idx, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = idx % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - 1 - m;
  return static_cast<std::size_t>(m);
}

inline std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) return {1.0};
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
    const double w = std::exp(-0.5 * static_cast<double>(t * t) / (sigma * sigma));
    k[static_cast<std::size_t>(t + radius)] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

}  // namespace detail

/// Separable Gaussian blur, kernel truncated at 4 sigma, reflect padding.
inline ImageTensor gaussian_blur(const ImageTensor& image, double sigma) {
  const auto kernel = detail::gaussian_kernel(sigma);
  if (kernel.size() == 1) return image;
  const auto r = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const Shape s = image.shape();
  std::vector<double> tmp(s.size()), out(s.size());
  const auto src = image.data();
  for (std::size_t c = 0; c < s.channels; ++c) {
    const std::size_t base = c * s.plane();
    for (std::size_t i = 0; i < s.height; ++i)
      for (std::size_t j = 0; j < s.width; ++j) {
        double acc = 0.0;
        for (std::ptrdiff_t t = -r; t <= r; ++t) {
          const auto jj = detail::reflect_index(static_cast<std::ptrdiff_t>(j) + t, s.width);
          acc += kernel[static_cast<std::size_t>(t + r)] * src[base + i * s.width + jj];
        }
        tmp[base + i * s.width + j] = acc;
      }
    for (std::size_t i = 0; i < s.height; ++i)
      for (std::size_t j = 0; j < s.width; ++j) {
        double acc = 0.0;
        for (std::ptrdiff_t t = -r; t <= r; ++t) {
          const auto ii = detail::reflect_index(static_cast<std::ptrdiff_t>(i) + t, s.height);
          acc += kernel[static_cast<std::size_t>(t + r)] * tmp[base + ii * s.width + j];
        }
        out[base + i * s.width + j] = std::clamp(acc, 0.0, 1.0);
      }
  }
  return ImageTensor(s, std::move(out), image.label());
}

/// Per-channel contrast scaling about the channel mean: x*c + mean*(1-c).
inline ImageTensor adjust_contrast(const ImageTensor& image, double factor) {
  const Shape s = image.shape();
  std::vector<double> out(s.size());
  for (std::size_t c = 0; c < s.channels; ++c) {
    const auto plane = image.channel(c);
    double mean = 0.0;
    for (double v : plane) mean += v;
    mean /= static_cast<double>(std::max<std::size_t>(1, plane.size()));
    for (std::size_t k = 0; k < plane.size(); ++k) {
      out[c * s.plane() + k] = std::clamp(plane[k] * factor + mean * (1.0 - factor), 0.0, 1.0);
    }
  }
  return ImageTensor(s, std::move(out), image.label());
}

/// Diamond-square height map on a size x size torus (size a power of two),
/// normalized to [0,1]. The random perturbation amplitude is multiplied by
/// `decay` after every octave.
inline std::vector<double> plasma_fractal(std::size_t size, double decay, SeedStream& stream) {
  std::vector<double> map(size * size, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return map[(i % size) * size + (j % size)];
  };
  double amplitude = 1.0;
  auto perturb = [&](double mean) { return mean + amplitude * (2.0 * stream.uniform() - 1.0); };
  for (std::size_t step = size; step >= 2; step /= 2) {
    const std::size_t half = step / 2;
    // squares: centre of each cell from its four corners
    for (std::size_t i = 0; i < size; i += step)
      for (std::size_t j = 0; j < size; j += step)
        at(i + half, j + half) =
            perturb((at(i, j) + at(i + step, j) + at(i, j + step) + at(i + step, j + step)) / 4.0);
    // diamonds: edge midpoints from the two corners and two adjacent centres
    for (std::size_t i = 0; i < size; i += step)
      for (std::size_t j = 0; j < size; j += step) {
        at(i, j + half) = perturb((at(i, j) + at(i, j + step) + at(i + half, j + half) +
                                   at(i + size - half, j + half)) / 4.0);
        at(i + half, j) = perturb((at(i, j) + at(i + step, j) + at(i + half, j + half) +
                                   at(i + half, j + size - half)) / 4.0);
      }
    amplitude *= decay;
  }
  const auto [lo, hi] = std::minmax_element(map.begin(), map.end());
  const double low = *lo, range = *hi - *lo;
  for (double& v : map) v = range > 0.0 ? (v - low) / range : 0.0;
  return map;
}

/// Adds strength * fog to every channel and rescales by max/(max+strength).
inline ImageTensor add_fog(const ImageTensor& image, double strength, double decay,
                           SeedStream& stream) {
  const Shape s = image.shape();
  std::size_t size = 2;
  while (size < std::max(s.height, s.width)) size *= 2;
  const auto fog = plasma_fractal(size, decay, stream);
  const double max_val = image.max();
  const double scale = (max_val + strength) > 0.0 ? max_val / (max_val + strength) : 0.0;
  std::vector<double> out(s.size());
  for (std::size_t c = 0; c < s.channels; ++c)
    for (std::size_t i = 0; i < s.height; ++i)
      for (std::size_t j = 0; j < s.width; ++j) {
        const double v = image.at(c, i, j) + strength * fog[i * size + j];
        out[(c * s.height + i) * s.width + j] = std::clamp(v * scale, 0.0, 1.0);
      }
  return ImageTensor(s, std::move(out), image.label());
}

inline ImageTensor corrupt(const ImageTensor& image, const CorruptionSpec& spec,
                           const CorruptionTable& table = CorruptionTable::builtin()) {
  const auto& p = table.get(spec.kind, spec.severity);
  SeedStream stream(spec.seed);
  switch (spec.kind) {
    case CorruptionKind::kGaussianNoise: return add_gaussian_noise(image, p[0], stream);
    case CorruptionKind::kGaussianBlur: return gaussian_blur(image, p[0]);
    case CorruptionKind::kContrast: return adjust_contrast(image, p[0]);
    case CorruptionKind::kFog: return add_fog(image, p[0], p[1], stream);
  }
  return image;
}

/// Corrupts every image; image i uses seed derive_seed(spec.seed, i).
inline std::vector<ImageTensor> corrupt_all(const std::vector<ImageTensor>& images,
                                            const CorruptionSpec& spec,
                                            const CorruptionTable& table = CorruptionTable::builtin(),
                                            std::size_t threads = 1) {
  std::vector<ImageTensor> out(images.size());
  parallel_for(images.size(), threads, [&](std::size_t i) {
    CorruptionSpec local = spec;
    local.seed = derive_seed(spec.seed, i);
    out[i] = corrupt(images[i], local, table);
  });
  return out;
}

}  // namespace freqaug

#pragma once

// Diagnostic test sets that isolate frequency bands and phase:
//   low / high          F^-1(M z)
//   phase_only          F^-1(A_m e^{i P_x})
//   low_phase / high_phase  F^-1(A_m M e^{i P_x})
// where A_m is the mean amplitude spectrum of the evaluated set.

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "freqaug/errors.hpp"
#include "freqaug/image.hpp"
#include "freqaug/parallel.hpp"
#include "freqaug/scoring.hpp"
#include "freqaug/spectral.hpp"

namespace freqaug {

struct MeanAmplitude {
  Shape shape;
  std::vector<double> amplitude;
  std::size_t source_count = 0;
};

inline MeanAmplitude mean_amplitude(const std::vector<ImageTensor>& images) {
  if (images.empty()) throw DomainError("mean amplitude of an empty dataset");
  MeanAmplitude m{images.front().shape(), std::vector<double>(images.front().size(), 0.0),
                  images.size()};
  for (std::size_t k = 0; k < images.size(); ++k) {
    if (images[k].shape() != m.shape) {
      throw ShapeError("image " + std::to_string(k) + " has shape " +
                       to_string(images[k].shape()) + ", expected " + to_string(m.shape));
    }
    const auto amp = to_polar(dft2(images[k])).amplitude;
    for (std::size_t t = 0; t < amp.size(); ++t) m.amplitude[t] += amp[t];
  }
  const double n = static_cast<double>(images.size());
  for (double& a : m.amplitude) a /= n;
  return m;
}

inline MeanAmplitude mean_amplitude(const LabeledDataset& dataset) {
  return mean_amplitude(dataset.images());
}

enum class ProbeBand { kLow, kHigh, kLowPhase, kHighPhase, kPhaseOnly };

struct ProbeKind {
  ProbeBand band = ProbeBand::kPhaseOnly;
  std::optional<double> radius;

  static ProbeKind low(double r) { return {ProbeBand::kLow, r}; }
  static ProbeKind high(double r) { return {ProbeBand::kHigh, r}; }
  static ProbeKind low_phase(double r) { return {ProbeBand::kLowPhase, r}; }
  static ProbeKind high_phase(double r) { return {ProbeBand::kHighPhase, r}; }
  static ProbeKind phase_only() { return {ProbeBand::kPhaseOnly, std::nullopt}; }

  bool banded() const { return band != ProbeBand::kPhaseOnly; }
  bool uses_phase() const { return band != ProbeBand::kLow && band != ProbeBand::kHigh; }
};

inline std::string to_string(ProbeBand b) {
  switch (b) {
    case ProbeBand::kLow: return "low";
    case ProbeBand::kHigh: return "high";
    case ProbeBand::kLowPhase: return "low_phase";
    case ProbeBand::kHighPhase: return "high_phase";
    case ProbeBand::kPhaseOnly: return "phase_only";
  }
  return "?";
}

namespace detail {

inline void require_mean_shape(const ImageTensor& image, const MeanAmplitude& m) {
  if (m.shape != image.shape()) {
    throw ShapeError("mean amplitude is " + to_string(m.shape) + " but image is " +
                     to_string(image.shape()));
  }
}

// Builds every probe from one forward transform of the image.
class ProbeBuilder {
 public:
  ProbeBuilder(const ImageTensor& image, const MeanAmplitude* mean)
      : image_(image), spectrum_(dft2(image)) {
    if (mean) {
      require_mean_shape(image, *mean);
      PolarSpectrum polar = to_polar(spectrum_);
      polar.amplitude = mean->amplitude;
      phase_spectrum_ = from_polar(polar);
    }
  }

  ImageTensor build(const ProbeKind& kind, Clamp clamp) const {
    if (kind.banded() && !kind.radius) {
      throw ArgumentError("probe kind " + to_string(kind.band) + " needs a radius");
    }
    if (!kind.banded() && kind.radius) {
      throw ArgumentError("phase_only probe takes no radius");
    }
    if (kind.uses_phase() && !phase_spectrum_) {
      throw ArgumentError("probe kind " + to_string(kind.band) + " needs a mean amplitude");
    }
    const Spectrum& base = kind.uses_phase() ? *phase_spectrum_ : spectrum_;
    if (!kind.banded()) return idft2(base, clamp, image_.label());
    const auto [low, high] = make_masks(image_.height(), image_.width(), *kind.radius);
    const bool low_band = kind.band == ProbeBand::kLow || kind.band == ProbeBand::kLowPhase;
    return idft2(apply_mask(base, low_band ? low : high), clamp, image_.label());
  }

 private:
  const ImageTensor& image_;
  Spectrum spectrum_;
  std::optional<Spectrum> phase_spectrum_;
};

}  // namespace detail

inline ImageTensor phase_only(const ImageTensor& image, const MeanAmplitude& mean,
                              Clamp clamp = Clamp::kYes) {
  return detail::ProbeBuilder(image, &mean).build(ProbeKind::phase_only(), clamp);
}

inline ImageTensor band_probe(const ImageTensor& image, const ProbeKind& kind,
                              const MeanAmplitude* mean = nullptr, Clamp clamp = Clamp::kYes) {
  if (kind.uses_phase() && !mean) {
    throw ArgumentError("probe kind " + to_string(kind.band) + " needs a mean amplitude");
  }
  return detail::ProbeBuilder(image, kind.uses_phase() ? mean : nullptr).build(kind, clamp);
}

// --- Accuracy table ---------------------------------------------------------

struct ProbeRow {
  std::string kind;  // original, low, high, low_phase, high_phase, phase_only
  std::optional<double> radius;
  double accuracy = 0.0;
};

struct ProbeTable {
  std::vector<double> radii;
  std::vector<ProbeRow> rows;

  const ProbeRow& find(const std::string& kind, std::optional<double> radius = std::nullopt) const {
    for (const auto& r : rows)
      if (r.kind == kind && r.radius == radius) return r;
    throw ArgumentError("no probe row " + kind);
  }
};

inline std::string format_radius(double r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

/// Accuracy of argmax(model(probe)) against the label for the unmodified
/// images, each banded kind at each radius, and the phase-only images.
inline ProbeTable probe_table(const ScoreFn& model, const LabeledDataset& dataset,
                              const std::vector<double>& radii, const MeanAmplitude& mean,
                              std::size_t threads = 1) {
  std::vector<ProbeKind> kinds;
  for (double r : radii) {
    kinds.push_back(ProbeKind::low(r));
    kinds.push_back(ProbeKind::high(r));
    kinds.push_back(ProbeKind::low_phase(r));
    kinds.push_back(ProbeKind::high_phase(r));
  }
  kinds.push_back(ProbeKind::phase_only());
  const std::size_t columns = kinds.size() + 1;  // + original

  std::vector<std::vector<char>> correct(dataset.size(), std::vector<char>(columns, 0));
  parallel_for(dataset.size(), threads, [&](std::size_t n) {
    const ImageTensor& img = dataset[n];
    const detail::ProbeBuilder builder(img, &mean);
    const auto label = static_cast<std::size_t>(*img.label());
    auto classify = [&](const ImageTensor& probe, const std::string& kind,
                        std::optional<double> radius) {
      try {
        return argmax(model(probe)) == label;
      } catch (const std::exception& e) {
        throw Error("model failed on probe kind=" + kind +
                    (radius ? " radius=" + format_radius(*radius) : std::string()) + " image " +
                    std::to_string(n) + ": " + e.what());
      }
    };
    correct[n][0] = classify(img, "original", std::nullopt);
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      correct[n][k + 1] =
          classify(builder.build(kinds[k], Clamp::kYes), to_string(kinds[k].band), kinds[k].radius);
    }
  });

  ProbeTable table{radii, {}};
  const double total = static_cast<double>(dataset.size());
  auto accuracy = [&](std::size_t col) {
    std::size_t hits = 0;
    for (const auto& row : correct) hits += static_cast<std::size_t>(row[col]);
    return total > 0 ? static_cast<double>(hits) / total : 0.0;
  };
  table.rows.push_back({"original", std::nullopt, accuracy(0)});
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    table.rows.push_back({to_string(kinds[k].band), kinds[k].radius, accuracy(k + 1)});
  }
  return table;
}

inline std::string probe_table_csv(const ProbeTable& table) {
  std::ostringstream os;
  os << "kind,radius,accuracy\n" << std::fixed;
  for (const auto& row : table.rows) {
    os << row.kind << ',' << (row.radius ? format_radius(*row.radius) : "") << ','
       << std::setprecision(6) << row.accuracy << '\n';
  }
  return os.str();
}

/// One-line table: Original | Low | High | Low-P | High-P | Phase only, in
/// percent; the first radius is shown plain and the rest in parentheses.
inline std::string probe_table_text(const ProbeTable& table) {
  const std::vector<std::pair<std::string, std::string>> cols = {
      {"Original", "original"}, {"Low", "low"},         {"High", "high"},
      {"Low-P", "low_phase"},   {"High-P", "high_phase"}, {"Phase only", "phase_only"}};
  auto pct = [](double a) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << 100.0 * a;
    return os.str();
  };
  std::vector<std::string> cells;
  for (const auto& [title, kind] : cols) {
    if (kind == "original" || kind == "phase_only") {
      cells.push_back(pct(table.find(kind).accuracy));
      continue;
    }
    std::string cell;
    for (std::size_t i = 0; i < table.radii.size(); ++i) {
      const std::string v = pct(table.find(kind, table.radii[i]).accuracy);
      cell += i == 0 ? v : " (" + v + ")";
    }
    cells.push_back(cell);
  }
  std::ostringstream os;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::size_t w = std::max(cols[c].first.size(), cells[c].size());
    os << (c ? " | " : "") << std::setw(static_cast<int>(w)) << cols[c].first;
  }
  os << '\n';
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::size_t w = std::max(cols[c].first.size(), cells[c].size());
    os << (c ? " | " : "") << std::setw(static_cast<int>(w)) << cells[c];
  }
  os << '\n';
  if (!table.radii.empty()) {
    os << "radius " << format_radius(table.radii.front());
    for (std::size_t i = 1; i < table.radii.size(); ++i) os << " (" << format_radius(table.radii[i]) << ")";
    os << '\n';
  }
  return os.str();
}

}  // namespace freqaug

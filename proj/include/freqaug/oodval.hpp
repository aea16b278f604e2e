#pragma once

// Max-softmax confidence OOD detection: in-distribution inputs are the
// positive class, AUROC is the Mann-Whitney statistic with ties counted 1/2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "freqaug/errors.hpp"
#include "freqaug/image.hpp"
#include "freqaug/parallel.hpp"
#include "freqaug/scoring.hpp"

namespace freqaug {

struct ScoreSet {
  std::vector<double> in_dist;
  std::vector<double> ood;

  void validate() const {
    if (in_dist.empty() || ood.empty()) {
      throw DomainError("AUROC needs at least one in-distribution and one OOD score");
    }
    auto finite = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(in_dist) || !finite(ood)) throw DomainError("scores must be finite");
  }
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocReport {
  double auroc = 0.0;
  std::vector<RocPoint> roc_points;
  std::size_t threshold_count = 0;
};

inline double trapezoid_area(const std::vector<RocPoint>& points) {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    area += (points[k].fpr - points[k - 1].fpr) * (points[k].tpr + points[k - 1].tpr) * 0.5;
  }
  return area;
}

/// Rank statistic plus the ROC curve from a sweep over every distinct score
/// (descending), both in O(n log n).
inline RocReport auroc(const ScoreSet& scores) {
  scores.validate();
  std::vector<std::pair<double, bool>> all;  // (score, is_in)
  all.reserve(scores.in_dist.size() + scores.ood.size());
  for (double s : scores.in_dist) all.emplace_back(s, true);
  for (double s : scores.ood) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const auto n_in = static_cast<std::uint64_t>(scores.in_dist.size());
  const auto n_ood = static_cast<std::uint64_t>(scores.ood.size());
  // Twice the Mann-Whitney U, kept integral: 2 per strict win, 1 per tie.
  std::uint64_t twice_u = 0;
  std::uint64_t in_above = 0, ood_above = 0;
  RocReport report;
  report.roc_points.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < all.size();) {
    std::uint64_t in_group = 0, ood_group = 0;
    const double value = all[k].first;
    for (; k < all.size() && all[k].first == value; ++k) (all[k].second ? in_group : ood_group)++;
    // in-distribution scores in this group beat every OOD score below it
    twice_u += in_group * ood_group + 2 * in_group * (n_ood - ood_above - ood_group);
    in_above += in_group;
    ood_above += ood_group;
    report.roc_points.push_back({static_cast<double>(ood_above) / static_cast<double>(n_ood),
                                 static_cast<double>(in_above) / static_cast<double>(n_in)});
    ++report.threshold_count;
  }
  report.auroc = static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_in) *
                                                 static_cast<double>(n_ood));
  return report;
}

/// (TPR, FPR) of the detector "in-distribution iff score >= threshold".
inline std::pair<double, double> detect_at_threshold(const ScoreSet& scores, double threshold) {
  scores.validate();
  auto frac = [threshold](const std::vector<double>& v) {
    const auto n = std::count_if(v.begin(), v.end(), [&](double s) { return s >= threshold; });
    return static_cast<double>(n) / static_cast<double>(v.size());
  };
  return {frac(scores.in_dist), frac(scores.ood)};
}

/// Max-softmax confidence per image, in input order.
inline std::vector<double> score_dataset(const ScoreFn& model, const std::vector<ImageTensor>& images,
                                         std::size_t threads = 1) {
  std::vector<double> scores(images.size());
  parallel_for(images.size(), threads, [&](std::size_t i) {
    try {
      const auto p = model(images[i]);
      if (p.empty()) throw Error("model returned no scores");
      scores[i] = *std::max_element(p.begin(), p.end());
    } catch (const std::exception& e) {
      throw Error("scoring failed at image " + std::to_string(i) + ": " + e.what());
    }
  });
  return scores;
}

struct NamedImages {
  std::string name;
  std::vector<ImageTensor> images;
};

struct OodRow {
  std::string name;
  RocReport report;
};

struct OodTable {
  double test_accuracy = 0.0;
  std::vector<double> in_scores;
  std::vector<OodRow> rows;
};

inline OodTable evaluate_ood(const ScoreFn& model, const LabeledDataset& in_dataset,
                             const std::vector<NamedImages>& ood_sets, std::size_t threads = 1) {
  OodTable table;
  std::vector<char> hit(in_dataset.size(), 0);
  table.in_scores.resize(in_dataset.size());
  parallel_for(in_dataset.size(), threads, [&](std::size_t i) {
    const auto p = model(in_dataset[i]);
    table.in_scores[i] = *std::max_element(p.begin(), p.end());
    hit[i] = argmax(p) == static_cast<std::size_t>(*in_dataset[i].label());
  });
  if (!in_dataset.empty()) {
    table.test_accuracy = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) /
                          static_cast<double>(in_dataset.size());
  }
  for (const auto& set : ood_sets) {
    try {
      table.rows.push_back({set.name, auroc({table.in_scores, score_dataset(model, set.images, threads)})});
    } catch (const std::exception& e) {
      throw Error("OOD set '" + set.name + "': " + e.what());
    }
  }
  return table;
}

/// "method | Test acc. | <set> ..." with percentages to two decimals.
inline std::string format_ood_table(const OodTable& table, const std::string& method) {
  std::ostringstream head, row;
  head << std::left << std::setw(static_cast<int>(std::max<std::size_t>(6, method.size())))
       << "method" << " | Test acc.";
  row << std::left << std::setw(static_cast<int>(std::max<std::size_t>(6, method.size())))
      << method << " | " << std::right << std::setw(9) << std::fixed << std::setprecision(2)
      << 100.0 * table.test_accuracy;
  for (const auto& r : table.rows) {
    const int w = static_cast<int>(std::max<std::size_t>(6, r.name.size()));
    head << " | " << std::setw(w) << r.name;
    row << " | " << std::setw(w) << 100.0 * r.report.auroc;
  }
  return head.str() + "\n" + row.str() + "\n";
}

// --- Score CSV interchange -----------------------------------------------------

inline std::string scores_csv(const ScoreSet& scores) {
  std::ostringstream os;
  os << "score,is_in_distribution\n" << std::setprecision(17);
  for (double s : scores.in_dist) os << s << ",1\n";
  for (double s : scores.ood) os << s << ",0\n";
  return os.str();
}

/// Appends the rows of a score CSV to `into`, split by the flag column.
inline void parse_scores_csv(const std::string& text, ScoreSet& into) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line.rfind("score", 0) == 0)) continue;
    const auto comma = line.find(',');
    double score = 0.0;
    int flag = -1;
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      std::size_t used = 0;
      score = std::stod(line.substr(0, comma), &used);
      flag = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw FormatError("score CSV line " + std::to_string(lineno) + ": '" + line + "'");
    }
    if (flag != 0 && flag != 1) {
      throw FormatError("score CSV line " + std::to_string(lineno) +
                        ": is_in_distribution must be 0 or 1");
    }
    (flag == 1 ? into.in_dist : into.ood).push_back(score);
  }
}

inline std::string roc_csv(const RocReport& report) {
  std::ostringstream os;
  os << "fpr,tpr\n" << std::setprecision(17);
  for (const auto& p : report.roc_points) os << p.fpr << ',' << p.tpr << '\n';
  return os.str();
}

}  // namespace freqaug

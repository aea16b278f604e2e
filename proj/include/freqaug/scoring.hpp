#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

#include "freqaug/image.hpp"

namespace freqaug {

/// A classifier seen from the outside: image in, per-class scores out.
/// Implementations must be safe to call concurrently.
using ScoreFn = std::function<std::vector<double>(const ImageTensor&)>;

inline std::size_t argmax(const std::vector<double>& scores) {
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

}  // namespace freqaug

// Swaps the high-frequency band between two synthetic images and writes the
// inputs and both outputs as PPM files into the current directory.
//
//   freqaug_demo [radius]

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>

#include "freqaug/freqaug.hpp"

using namespace freqaug;

namespace {

// Smooth color ramp with a fine checkerboard on top.
ImageTensor pattern(double phase, double checker) {
  const Shape shape{32, 32, 3};
  std::vector<double> px(shape.size());
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < 32; ++i) {
      for (std::size_t j = 0; j < 32; ++j) {
        const double ramp = 0.5 + 0.3 * std::sin(2 * std::numbers::pi * (i + j) / 64.0 + phase + c);
        const double fine = ((i + j) % 2 ? checker : -checker);
        px[c * shape.plane() + i * 32 + j] = std::clamp(ramp + fine, 0.0, 1.0);
      }
    }
  }
  return ImageTensor(shape, std::move(px), 0);
}

void save(const std::string& name, const ImageTensor& img) {
  write_file(name, write_ppm(img));
  std::cout << "wrote " << name << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const double radius = argc > 1 ? std::atof(argv[1]) : 4.0;
  const ImageTensor a = pattern(0.0, 0.0), b = pattern(2.0, 0.15);
  const auto [low, high] = make_masks(32, 32, radius);
  std::cout << "radius " << radius << ": " << low.popcount() << " low-pass bins, "
            << high.popcount() << " high-pass bins\n";

  const auto [ab, ba] = rfc_swap(a, b, radius);
  save("demo_a.ppm", a);
  save("demo_b.ppm", b);
  save("demo_low_a_high_b.ppm", ab);
  save("demo_low_b_high_a.ppm", ba);
  save("demo_phase_a_amp_b.ppm", apr_recombine(a, b));
  return 0;
}

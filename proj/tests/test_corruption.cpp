#include <gtest/gtest.h>

#include <sstream>

#include "freqaug/corruption.hpp"
#include "support/test_support.hpp"

namespace freqaug {
namespace {

using testing::random_image;

CorruptionTable table_with(CorruptionKind kind, std::vector<double> params) {
  CorruptionTable t = CorruptionTable::builtin();
  t.set(kind, 1, std::move(params));
  return t;
}

TEST(CorruptionTable, ShippedFileMatchesBuiltin) {
  EXPECT_EQ(CorruptionTable::load(FREQAUG_CONSTANTS_FILE), CorruptionTable::builtin());
}

TEST(CorruptionTable, ParseErrors) {
  std::istringstream bad_kind("snow:1 = 0.1\n");
  EXPECT_THROW(CorruptionTable::parse(bad_kind), ArgumentError);
  std::istringstream bad_sev("fog:9 = 0.1 0.7\n");
  EXPECT_THROW(CorruptionTable::parse(bad_sev), ArgumentError);
  std::istringstream bad_arity("fog:1 = 0.1\n");
  EXPECT_THROW(CorruptionTable::parse(bad_arity), FormatError);
  std::istringstream bad_value("contrast:1 = abc\n");
  EXPECT_THROW(CorruptionTable::parse(bad_value), FormatError);
  std::istringstream ok("# comment\n\ncontrast:2 = 0.5  # trailing\n");
  EXPECT_EQ(CorruptionTable::parse(ok).get(CorruptionKind::kContrast, 2), std::vector<double>{0.5});
  EXPECT_THROW(CorruptionTable::builtin().get(CorruptionKind::kFog, 0), ArgumentError);
}

TEST(Corrupt, IdentityCasesAreExact) {
  SeedStream rng(1);
  const ImageTensor x = random_image({32, 32, 3}, rng, 4);
  const CorruptionSpec noise{CorruptionKind::kGaussianNoise, 1, 3};
  EXPECT_EQ(corrupt(x, noise, table_with(CorruptionKind::kGaussianNoise, {0.0})), x);
  const CorruptionSpec contrast{CorruptionKind::kContrast, 1, 0};
  EXPECT_EQ(corrupt(x, contrast, table_with(CorruptionKind::kContrast, {1.0})), x);
  const CorruptionSpec blur{CorruptionKind::kGaussianBlur, 1, 0};
  EXPECT_EQ(corrupt(x, blur, table_with(CorruptionKind::kGaussianBlur, {0.0})), x);
  EXPECT_EQ(corrupt(x, blur, table_with(CorruptionKind::kGaussianBlur, {1e-9})), x);
}

TEST(Corrupt, BlurMatchesDirectConvolution) {
  SeedStream rng(2);
  const ImageTensor x = random_image({9, 7, 1}, rng);
  for (double sigma : {0.4, 1.0, 2.5}) {
    const ImageTensor out = gaussian_blur(x, sigma);
    // kernel rebuilt here from the Gaussian formula, 4-sigma truncation
    const auto r = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> k;
    double sum = 0.0;
    for (int t = -r; t <= r; ++t) {
      k.push_back(std::exp(-0.5 * t * t / (sigma * sigma)));
      sum += k.back();
    }
    for (double& w : k) w /= sum;
    const std::vector<double> plane(x.data().begin(), x.data().end());
    const auto ref = testing::direct_convolve(plane, 9, 7, k);
    EXPECT_LT(testing::max_abs_diff(out.data(), ref), 1e-12) << "sigma " << sigma;
  }
}

TEST(Corrupt, BlurPreservesConstantImage) {
  const ImageTensor x({5, 5, 1}, std::vector<double>(25, 0.6));
  const ImageTensor out = gaussian_blur(x, 1.0);
  const std::vector<double> plane(25, 0.6);
  const auto ref = testing::direct_convolve(plane, 5, 5, detail::gaussian_kernel(1.0));
  double mean = 0.0;
  for (double v : out.data()) mean += v / 25.0;
  EXPECT_NEAR(mean, 0.6, 1e-12);
  EXPECT_LT(testing::max_abs_diff(out.data(), ref), 1e-12);
}

TEST(Corrupt, ContrastPullsTowardChannelMean) {
  const ImageTensor x({1, 2, 1}, {0.2, 0.6});
  const ImageTensor out = adjust_contrast(x, 0.5);
  EXPECT_NEAR(out.data()[0], 0.3, 1e-12);
  EXPECT_NEAR(out.data()[1], 0.5, 1e-12);
}

TEST(Corrupt, NoiseStatistics) {
  const ImageTensor x({64, 64, 1}, std::vector<double>(64 * 64, 0.5));
  SeedStream s(3);
  const ImageTensor out = add_gaussian_noise(x, 0.1, s);
  double mean = 0.0, var = 0.0;
  for (double v : out.data()) mean += v;
  mean /= static_cast<double>(out.size());
  for (double v : out.data()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(out.size());
  EXPECT_NEAR(mean, 0.5, 0.01);
  EXPECT_NEAR(std::sqrt(var), 0.1, 0.01);
}

TEST(Corrupt, PlasmaIsNormalizedAndSeeded) {
  SeedStream a(7), b(7), c(8);
  const auto pa = plasma_fractal(32, 0.7, a);
  EXPECT_EQ(pa, plasma_fractal(32, 0.7, b));
  EXPECT_NE(pa, plasma_fractal(32, 0.7, c));
  EXPECT_EQ(*std::min_element(pa.begin(), pa.end()), 0.0);
  EXPECT_EQ(*std::max_element(pa.begin(), pa.end()), 1.0);
}

TEST(Corrupt, EverythingStaysInUnitRange) {
  SeedStream rng(4);
  for (int n = 0; n < 20; ++n) {
    const ImageTensor x = random_image({32, 32, 3}, rng);
    for (const auto& [kind, name] : corruption_names()) {
      for (int sev = 1; sev <= 5; ++sev) {
        const ImageTensor out = corrupt(x, {kind, sev, static_cast<std::uint64_t>(n)});
        EXPECT_GE(out.min(), 0.0) << name;
        EXPECT_LE(out.max(), 1.0) << name;
        EXPECT_EQ(out.shape(), x.shape());
      }
    }
  }
}

TEST(Corrupt, BatchIsDeterministicPerImage) {
  SeedStream rng(5);
  std::vector<ImageTensor> imgs;
  for (int k = 0; k < 6; ++k) imgs.push_back(random_image({8, 8, 3}, rng));
  const CorruptionSpec spec{CorruptionKind::kFog, 3, 11};
  const auto a = corrupt_all(imgs, spec);
  const auto b = corrupt_all(imgs, spec, CorruptionTable::builtin(), 3);
  EXPECT_EQ(a, b);
  CorruptionSpec single = spec;
  single.seed = derive_seed(11, 4);
  EXPECT_EQ(a[4], corrupt(imgs[4], single));
  EXPECT_EQ(parse_corruption_kind("gaussian_blur"), CorruptionKind::kGaussianBlur);
}

}  // namespace
}  // namespace freqaug

#include <gtest/gtest.h>

#include <set>

#include "freqaug/augment.hpp"
#include "support/test_support.hpp"

namespace freqaug {
namespace {

using testing::max_abs_diff;
using testing::random_image;

constexpr Shape kRgb32{32, 32, 3};

TEST(RfcSwap, SelfSwapIsIdentity) {
  SeedStream rng(1);
  const ImageTensor x = random_image(kRgb32, rng, 2);
  const auto [a, b] = rfc_swap(x, x, 4.0, Clamp::kNo);
  EXPECT_LT(max_abs_diff(a.data(), x.data()), 1e-6);
  EXPECT_LT(max_abs_diff(b.data(), x.data()), 1e-6);
  EXPECT_EQ(a.label(), 2);
}

TEST(RfcSwap, SwappingTwiceRestoresInputs) {
  SeedStream rng(2);
  const ImageTensor x = random_image(kRgb32, rng, 1), y = random_image(kRgb32, rng, 1);
  const auto [xm, ym] = rfc_swap(x, y, 4.0, Clamp::kNo);
  const auto [xb, yb] = rfc_swap(xm, ym, 4.0, Clamp::kNo);
  EXPECT_LT(max_abs_diff(xb.data(), x.data()), 1e-6);
  EXPECT_LT(max_abs_diff(yb.data(), y.data()), 1e-6);
}

TEST(RfcSwap, RadiusZeroSwapsWholeImages) {
  SeedStream rng(3);
  const ImageTensor x = random_image(kRgb32, rng), y = random_image(kRgb32, rng);
  const auto [xm, ym] = rfc_swap(x, y, 0.0, Clamp::kNo);
  EXPECT_LT(max_abs_diff(xm.data(), y.data()), 1e-6);
  EXPECT_LT(max_abs_diff(ym.data(), x.data()), 1e-6);
}

TEST(RfcSwap, SpectrumMatchesMaskedCombination) {
  SeedStream rng(4);
  const ImageTensor x = random_image(kRgb32, rng), y = random_image(kRgb32, rng);
  const auto [xm, ym] = rfc_swap(x, y, 4.0, Clamp::kNo);
  const auto [low, high] = make_masks(32, 32, 4.0);
  const Spectrum zx = dft2(x), zy = dft2(y), zm = dft2(xm), zym = dft2(ym);
  const std::size_t plane = 32 * 32;
  for (std::size_t k = 0; k < zx.coeffs.size(); ++k) {
    const bool lo = low.bits[k % plane] != 0;
    const cplx expect_x = lo ? zx.coeffs[k] : zy.coeffs[k];
    const cplx expect_y = lo ? zy.coeffs[k] : zx.coeffs[k];
    EXPECT_LT(std::abs(zm.coeffs[k] - expect_x), 1e-6);
    EXPECT_LT(std::abs(zym.coeffs[k] - expect_y), 1e-6);
  }
  // low-band energy of x survives in x_mix
  double e_x = 0.0, e_mix = 0.0;
  for (std::size_t k = 0; k < zx.coeffs.size(); ++k) {
    if (!low.bits[k % plane]) continue;
    e_x += std::norm(zx.coeffs[k]);
    e_mix += std::norm(zm.coeffs[k]);
  }
  EXPECT_NEAR(e_mix, e_x, 1e-9 * e_x);
}

TEST(RfcSwap, OutputsClampedByDefault) {
  SeedStream rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto [a, b] = rfc_swap(random_image(kRgb32, rng), random_image(kRgb32, rng), 4.0);
    EXPECT_GE(std::min(a.min(), b.min()), 0.0);
    EXPECT_LE(std::max(a.max(), b.max()), 1.0);
  }
}

TEST(RfcSwap, RejectsMismatches) {
  SeedStream rng(6);
  EXPECT_THROW(rfc_swap(random_image(kRgb32, rng, 0), random_image(kRgb32, rng, 1), 4.0), ClassError);
  EXPECT_THROW(rfc_swap(random_image(kRgb32, rng), random_image({16, 16, 3}, rng), 4.0), ShapeError);
}

TEST(Apr, SelfRecombinationIsIdentity) {
  SeedStream rng(7);
  const ImageTensor x = random_image(kRgb32, rng, 5);
  const ImageTensor out = apr_recombine(x, x, Clamp::kNo);
  EXPECT_LT(max_abs_diff(out.data(), x.data()), 1e-6);
  EXPECT_EQ(out.label(), 5);
}

TEST(Apr, ZeroPhaseSourceGivesPointSymmetricImage) {
  SeedStream rng(8);
  const ImageTensor amp = random_image({8, 8, 1}, rng);
  const ImageTensor out = apr_recombine(ImageTensor::zeros({8, 8, 1}), amp, Clamp::kNo);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      EXPECT_NEAR(out.at(0, i, j), out.at(0, (8 - i) % 8, (8 - j) % 8), 1e-9);
    }
  // all-zero phase means the spectrum is the (real, non-negative) amplitude
  const Spectrum z = dft2(out);
  const PolarSpectrum pa = to_polar(dft2(amp));
  for (std::size_t k = 0; k < z.coeffs.size(); ++k) {
    EXPECT_NEAR(z.coeffs[k].real(), pa.amplitude[k], 1e-6);
    EXPECT_NEAR(z.coeffs[k].imag(), 0.0, 1e-6);
  }
}

TEST(Apr, AmplitudeComesFromAmplitudeSource) {
  SeedStream rng(9);
  const ImageTensor x = random_image(kRgb32, rng, 0), y = random_image(kRgb32, rng, 0);
  const ImageTensor out = apr_recombine(x, y, Clamp::kNo);
  const auto amp_out = to_polar(dft2(out)).amplitude;
  const auto amp_y = to_polar(dft2(y)).amplitude;
  EXPECT_LT(max_abs_diff(amp_out, amp_y), 1e-6);
  EXPECT_THROW(apr_recombine(x, random_image({8, 8, 3}, rng)), ShapeError);
}

LabeledDataset small_dataset(std::size_t n, std::size_t classes, std::uint64_t seed) {
  SeedStream rng(seed);
  std::vector<ImageTensor> imgs;
  for (std::size_t k = 0; k < n; ++k) imgs.push_back(random_image({8, 8, 3}, rng, static_cast<int>(k % classes)));
  return LabeledDataset(imgs, classes);
}

TEST(AugmentBatch, ZeroProbabilityIsIdentity) {
  const auto ds = small_dataset(12, 3, 1);
  AugmentConfig cfg;
  cfg.apply_probability = 0.0;
  for (auto mode : {AugmentMode::kRfc, AugmentMode::kApr, AugmentMode::kRfcApr}) {
    cfg.mode = mode;
    EXPECT_EQ(augment_batch(ds, cfg).images(), ds.images());
  }
}

TEST(AugmentBatch, SingletonClassSelfPairs) {
  const auto ds = small_dataset(1, 1, 2);
  AugmentConfig cfg;
  cfg.apply_probability = 1.0;
  const auto out = augment_batch(ds, cfg);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_LT(max_abs_diff(out[1].data(), ds[0].data()), 1e-6);
  EXPECT_LT(max_abs_diff(out[2].data(), ds[0].data()), 1e-6);
}

TEST(AugmentBatch, CountingContract) {
  const auto ds = small_dataset(10, 2, 3);
  AugmentConfig cfg;
  cfg.apply_probability = 1.0;
  cfg.mode = AugmentMode::kRfc;
  EXPECT_EQ(augment_batch(ds, cfg).size(), 30u);
  cfg.mode = AugmentMode::kApr;
  EXPECT_EQ(augment_batch(ds, cfg).size(), 20u);
  cfg.mode = AugmentMode::kRfcApr;
  EXPECT_EQ(augment_batch(ds, cfg).size(), 30u);
  cfg.order = CompositionOrder::kAprThenRfc;
  EXPECT_EQ(augment_batch(ds, cfg).size(), 30u);
}

TEST(AugmentBatch, OriginalsFirstAndLabelsPreserved) {
  const auto ds = small_dataset(9, 3, 4);
  AugmentConfig cfg;
  cfg.apply_probability = 0.5;
  cfg.seed = 17;
  const auto out = augment_batch(ds, cfg);
  for (std::size_t k = 0; k < ds.size(); ++k) EXPECT_EQ(out[k], ds[k]);
  for (const auto& img : out.images()) {
    EXPECT_GE(img.min(), 0.0);
    EXPECT_LE(img.max(), 1.0);
  }
  // rfc emits pairs, so the augmented tail has even length
  EXPECT_EQ((out.size() - ds.size()) % 2, 0u);
}

TEST(AugmentBatch, DeterministicAcrossRunsAndThreadCounts) {
  const auto ds = small_dataset(24, 4, 5);
  AugmentConfig cfg;
  cfg.mode = AugmentMode::kRfcApr;
  cfg.seed = 99;
  const auto a = augment_batch(ds, cfg, 1);
  const auto b = augment_batch(ds, cfg, 1);
  const auto c = augment_batch(ds, cfg, 4);
  EXPECT_EQ(a.images(), b.images());
  EXPECT_EQ(a.images(), c.images());
  cfg.seed = 100;
  EXPECT_NE(augment_batch(ds, cfg).images(), a.images());
}

TEST(AugmentBatch, EmptyDatasetAndBadConfig) {
  AugmentConfig cfg;
  EXPECT_TRUE(augment_batch(LabeledDataset({}, 3), cfg).empty());
  cfg.apply_probability = 1.5;
  EXPECT_THROW(augment_batch(LabeledDataset({}, 3), cfg), ArgumentError);
  EXPECT_THROW(parse_augment_mode("mixup"), ArgumentError);
  EXPECT_EQ(parse_augment_mode("rfc+apr"), AugmentMode::kRfcApr);
}

TEST(AugmentBatch, PartnersStayInClass) {
  const auto ds = small_dataset(30, 3, 6);
  SeedStream s(1);
  for (std::size_t p = 0; p < ds.size(); ++p) {
    for (int t = 0; t < 5; ++t) {
      const std::size_t q = draw_partner(ds, p, s);
      EXPECT_EQ(ds[q].label(), ds[p].label());
      EXPECT_NE(q, p);
    }
  }
}

TEST(RandomCrop, PaddingZeroIsIdentity) {
  SeedStream rng(1);
  const ImageTensor x = random_image({6, 5, 3}, rng, 1);
  EXPECT_EQ(random_crop(x, 0, rng), x);
}

TEST(RandomCrop, OriginOffsetShiftsDownRight) {
  SeedStream rng(2);
  const ImageTensor x = random_image({10, 10, 1}, rng);
  const ImageTensor out = crop_at(x, 4, 0, 0);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_EQ(out.at(0, i, j), (i < 4 || j < 4) ? 0.0 : x.at(0, i - 4, j - 4));
    }
}

TEST(RandomCrop, EnumeratesNineDistinctWindows) {
  const ImageTensor x({2, 2, 1}, {0.1, 0.2, 0.3, 0.4});
  std::set<std::vector<double>> all;
  for (std::size_t oi = 0; oi <= 2; ++oi)
    for (std::size_t oj = 0; oj <= 2; ++oj) {
      const ImageTensor w = crop_at(x, 1, oi, oj);
      all.insert(std::vector<double>(w.data().begin(), w.data().end()));
    }
  EXPECT_EQ(all.size(), 9u);
  SeedStream rng(3);
  std::set<std::vector<double>> seen;
  for (int t = 0; t < 400; ++t) {
    const ImageTensor w = random_crop(x, 1, rng);
    std::vector<double> v(w.data().begin(), w.data().end());
    EXPECT_TRUE(all.count(v));
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 9u);
}

TEST(HFlip, Properties) {
  SeedStream rng(4);
  const ImageTensor x = random_image({4, 7, 3}, rng);
  EXPECT_EQ(hflip(hflip(x)), x);
  const ImageTensor f = hflip(x);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = 0; k < 7; ++k) EXPECT_EQ(f.at(c, i, 6 - k), x.at(c, i, k));
  const ImageTensor thin = random_image({5, 1, 3}, rng);
  for (int t = 0; t < 10; ++t) EXPECT_EQ(random_hflip(thin, rng), thin);

  int flips = 0;
  for (int t = 0; t < 1000; ++t) flips += random_hflip(x, rng) == x ? 0 : 1;
  EXPECT_NEAR(flips, 500, 60);
}

TEST(OnlineTransform, KeepsBatchSizeAndIsDeterministic) {
  const auto ds = small_dataset(16, 2, 7);
  OnlineAugment cfg;
  cfg.frequency = AugmentConfig{};
  cfg.frequency->apply_probability = 1.0;
  const auto hook = make_online_transform(cfg);
  SeedStream s1(5), s2(5);
  const auto a = hook(ds.images(), s1);
  const auto b = hook(ds.images(), s2);
  ASSERT_EQ(a.size(), ds.size());
  EXPECT_EQ(a, b);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k].label(), ds[k].label());
}

}  // namespace
}  // namespace freqaug

#pragma once

// One-hidden-layer ReLU MLP with softmax output, trained by minibatch SGD
// with momentum and a multi-step learning-rate schedule.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "freqaug/augment.hpp"
#include "freqaug/errors.hpp"
#include "freqaug/image.hpp"
#include "freqaug/rng.hpp"
#include "freqaug/scoring.hpp"

namespace freqaug {

struct ClassifierState {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t class_count = 0;
  Eigen::MatrixXd w1;  // hidden x input
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;  // classes x hidden
  Eigen::VectorXd b2;
  std::uint64_t rng_seed = 0;

  /// Weights and biases uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static ClassifierState initialize(std::size_t input_dim, std::size_t hidden_dim,
                                    std::size_t class_count, std::uint64_t seed) {
    if (input_dim == 0 || hidden_dim == 0 || class_count == 0) {
      throw ArgumentError("classifier dimensions must be positive");
    }
    ClassifierState s{input_dim, hidden_dim, class_count,
                      Eigen::MatrixXd(hidden_dim, input_dim), Eigen::VectorXd(hidden_dim),
                      Eigen::MatrixXd(class_count, hidden_dim), Eigen::VectorXd(class_count),
                      seed};
    SeedStream stream = SeedStream(seed).split(0x1417);
    auto fill = [&](auto& m, std::size_t fan_in) {
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = bound * (2.0 * stream.uniform() - 1.0);
    };
    fill(s.w1, input_dim);
    fill(s.b1, input_dim);
    fill(s.w2, hidden_dim);
    fill(s.b2, hidden_dim);
    return s;
  }

  std::size_t parameter_count() const {
    return static_cast<std::size_t>(w1.size() + b1.size() + w2.size() + b2.size());
  }

  bool finite() const {
    return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
  }

  friend bool operator==(const ClassifierState& a, const ClassifierState& b) {
    return a.input_dim == b.input_dim && a.hidden_dim == b.hidden_dim &&
           a.class_count == b.class_count && a.rng_seed == b.rng_seed && a.w1 == b.w1 &&
           a.b1 == b.b1 && a.w2 == b.w2 && a.b2 == b.b2;
  }
};

/// Gradients share the parameter layout of ClassifierState.
struct Gradients {
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  double loss = 0.0;  // mean cross-entropy of the batch
};

namespace detail {

inline Eigen::Map<const Eigen::VectorXd> flatten(const ClassifierState& s, const ImageTensor& x) {
  if (x.size() != s.input_dim) {
    throw ShapeError("image has " + std::to_string(x.size()) + " values, model expects " +
                     std::to_string(s.input_dim));
  }
  return Eigen::Map<const Eigen::VectorXd>(x.data().data(), static_cast<Eigen::Index>(x.size()));
}

// Column-wise numerically stable softmax.
inline Eigen::MatrixXd softmax_columns(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index c = 0; c < logits.cols(); ++c) {
    const Eigen::VectorXd e = (logits.col(c).array() - logits.col(c).maxCoeff()).exp();
    p.col(c) = e / e.sum();
  }
  return p;
}

inline Eigen::MatrixXd stack(const ClassifierState& s, std::span<const ImageTensor> batch) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(s.input_dim), static_cast<Eigen::Index>(batch.size()));
  for (std::size_t n = 0; n < batch.size(); ++n) x.col(static_cast<Eigen::Index>(n)) = flatten(s, batch[n]);
  return x;
}

}  // namespace detail

inline Eigen::VectorXd logits(const ClassifierState& s, const ImageTensor& image) {
  const Eigen::VectorXd hidden = (s.w1 * detail::flatten(s, image) + s.b1).cwiseMax(0.0);
  return s.w2 * hidden + s.b2;
}

inline std::vector<double> forward(const ClassifierState& s, const ImageTensor& image) {
  const Eigen::MatrixXd p = detail::softmax_columns(logits(s, image));
  return std::vector<double>(p.data(), p.data() + p.size());
}

/// Max-softmax confidence.
inline double confidence(const ClassifierState& s, const ImageTensor& image) {
  const auto p = forward(s, image);
  return *std::max_element(p.begin(), p.end());
}

inline ScoreFn as_scorer(ClassifierState state) {
  auto shared = std::make_shared<const ClassifierState>(std::move(state));
  return [shared](const ImageTensor& x) { return forward(*shared, x); };
}

/// Exact gradients of the mean cross-entropy over `batch` (labels required).
inline Gradients gradients(const ClassifierState& s, std::span<const ImageTensor> batch) {
  if (batch.empty()) throw ArgumentError("gradient of an empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::MatrixXd x = detail::stack(s, batch);
  const Eigen::MatrixXd pre = (s.w1 * x).colwise() + s.b1;
  const Eigen::MatrixXd hidden = pre.cwiseMax(0.0);
  const Eigen::MatrixXd p = detail::softmax_columns((s.w2 * hidden).colwise() + s.b2);

  Eigen::MatrixXd dz = p;
  double loss = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& label = batch[static_cast<std::size_t>(c)].label();
    if (!label || static_cast<std::size_t>(*label) >= s.class_count) {
      throw LabelError("batch item " + std::to_string(c) + " has no valid label");
    }
    loss -= std::log(std::max(p(*label, c), 1e-300));
    dz(*label, c) -= 1.0;
  }
  dz /= static_cast<double>(n);

  Gradients g;
  g.loss = loss / static_cast<double>(n);
  g.w2 = dz * hidden.transpose();
  g.b2 = dz.rowwise().sum();
  const Eigen::MatrixXd dh = (s.w2.transpose() * dz).cwiseProduct(
      (pre.array() > 0.0).cast<double>().matrix());
  g.w1 = dh * x.transpose();
  g.b1 = dh.rowwise().sum();
  return g;
}

// --- Training ----------------------------------------------------------------

struct SgdSchedule {
  double base_lr = 0.1;
  double decay_factor = 0.2;
  std::vector<std::size_t> milestone_epochs{6, 12, 16, 19};
  std::size_t total_epochs = 20;
  double momentum = 0.9;
  double weight_decay = 0.0;
  std::size_t batch_size = 64;

  void validate() const {
    for (std::size_t k = 0; k < milestone_epochs.size(); ++k) {
      if (k > 0 && milestone_epochs[k] <= milestone_epochs[k - 1]) {
        throw ArgumentError("milestones must be strictly increasing");
      }
      if (milestone_epochs[k] >= total_epochs && total_epochs > 0) {
        throw ArgumentError("milestone " + std::to_string(milestone_epochs[k]) +
                            " is not below total epochs " + std::to_string(total_epochs));
      }
    }
    if (batch_size == 0) throw ArgumentError("batch size must be positive");
  }

  /// Epochs are 0-based; the rate drops once per milestone <= epoch.
  double lr(std::size_t epoch) const {
    double rate = base_lr;
    for (std::size_t m : milestone_epochs)
      if (m <= epoch) rate *= decay_factor;
    return rate;
  }
};

struct EpochLog {
  std::size_t epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;
};

struct TrainOptions {
  std::size_t hidden_dim = 256;
  std::uint64_t seed = 0;
  BatchTransform augment;  // optional per-batch transform
  const LabeledDataset* test_set = nullptr;
};

struct TrainResult {
  ClassifierState state;
  std::vector<EpochLog> log;
};

inline double accuracy(const ClassifierState& s, const LabeledDataset& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& img : data.images()) {
    hits += argmax(forward(s, img)) == static_cast<std::size_t>(*img.label()) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

/// One optimizer step from `state` with velocity buffers `v`.
inline void sgd_step(ClassifierState& s, Gradients& v, const Gradients& g, double lr,
                     double momentum, double weight_decay) {
  auto update = [&](auto& param, auto& vel, const auto& grad) {
    vel = momentum * vel + grad + weight_decay * param;
    param -= lr * vel;
  };
  update(s.w1, v.w1, g.w1);
  update(s.b1, v.b1, g.b1);
  update(s.w2, v.w2, g.w2);
  update(s.b2, v.b2, g.b2);
}

inline TrainResult train(const LabeledDataset& dataset, const SgdSchedule& schedule,
                         const TrainOptions& options = {}) {
  if (dataset.empty()) throw ArgumentError("cannot train on an empty dataset");
  schedule.validate();
  TrainResult result{ClassifierState::initialize(dataset[0].size(), options.hidden_dim,
                                                 dataset.class_count(), options.seed),
                     {}};
  ClassifierState& s = result.state;
  Gradients velocity{Eigen::MatrixXd::Zero(s.w1.rows(), s.w1.cols()),
                     Eigen::VectorXd::Zero(s.b1.size()),
                     Eigen::MatrixXd::Zero(s.w2.rows(), s.w2.cols()),
                     Eigen::VectorXd::Zero(s.b2.size()), 0.0};
  const SeedStream root = SeedStream(options.seed).split(0x7EA1);

  std::vector<std::size_t> order(dataset.size());
  for (std::size_t epoch = 0; epoch < schedule.total_epochs; ++epoch) {
    SeedStream epoch_stream = root.split(epoch);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(epoch_stream.below(i))]);
    }

    const double lr = schedule.lr(epoch);
    double loss_sum = 0.0;
    std::size_t seen = 0, hits = 0, batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += schedule.batch_size, ++batch_index) {
      const std::size_t stop = std::min(order.size(), start + schedule.batch_size);
      std::vector<ImageTensor> batch;
      batch.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) batch.push_back(dataset[order[k]]);
      if (options.augment) {
        SeedStream batch_stream = epoch_stream.split(batch_index);
        batch = options.augment(std::move(batch), batch_stream);
      }

      for (const auto& img : batch) {
        hits += argmax(forward(s, img)) == static_cast<std::size_t>(*img.label()) ? 1 : 0;
      }
      const Gradients g = gradients(s, batch);
      if (!std::isfinite(g.loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batch_index));
      }
      sgd_step(s, velocity, g, lr, schedule.momentum, schedule.weight_decay);
      if (!s.finite()) {
        throw TrainingError("non-finite parameters after epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(batch_index));
      }
      loss_sum += g.loss * static_cast<double>(batch.size());
      seen += batch.size();
    }

    EpochLog entry{epoch, lr, loss_sum / static_cast<double>(seen),
                   static_cast<double>(hits) / static_cast<double>(seen), std::nullopt};
    if (options.test_set) entry.test_accuracy = accuracy(s, *options.test_set);
    result.log.push_back(entry);
  }
  return result;
}

inline std::string training_log_csv(const std::vector<EpochLog>& log) {
  std::ostringstream os;
  os << "epoch,lr,loss,train_acc,test_acc\n" << std::setprecision(10);
  for (const auto& e : log) {
    os << e.epoch << ',' << e.lr << ',' << e.loss << ',' << e.train_accuracy << ',';
    if (e.test_accuracy) os << *e.test_accuracy;
    os << '\n';
  }
  return os.str();
}

// --- Model file -------------------------------------------------------------
//
//   "FQAUGMLP"  magic (8 bytes)
//   u8          format version (1)
//   u64 x 4     input_dim, hidden_dim, class_count, rng_seed
//   4 sections  tag[4] ("W1__", "B1__", "W2__", "B2__"), u64 count,
//               count f64 values, row-major
// All integers and floats little-endian.

inline constexpr char kModelMagic[8] = {'F', 'Q', 'A', 'U', 'G', 'M', 'L', 'P'};
inline constexpr std::uint8_t kModelVersion = 1;

namespace detail {

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
}

class ModelReader {
 public:
  explicit ModelReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw FormatError("model file truncated at byte " + std::to_string(pos_));
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint64_t u64() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | b[static_cast<std::size_t>(k)];
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<std::uint8_t> save_model(const ClassifierState& s) {
  std::vector<std::uint8_t> out(std::begin(kModelMagic), std::end(kModelMagic));
  out.push_back(kModelVersion);
  detail::put_u64(out, s.input_dim);
  detail::put_u64(out, s.hidden_dim);
  detail::put_u64(out, s.class_count);
  detail::put_u64(out, s.rng_seed);
  auto section = [&](const char* tag, const Eigen::MatrixXd& m) {
    out.insert(out.end(), tag, tag + 4);
    detail::put_u64(out, static_cast<std::uint64_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) detail::put_u64(out, std::bit_cast<std::uint64_t>(m(r, c)));
  };
  section("W1__", s.w1);
  section("B1__", s.b1);
  section("W2__", s.w2);
  section("B2__", s.b2);
  return out;
}

inline ClassifierState load_model(std::span<const std::uint8_t> bytes) {
  detail::ModelReader in(bytes);
  const auto magic = in.take(8);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kModelMagic))) {
    throw FormatError("not a model file (bad magic)");
  }
  const auto version = in.take(1)[0];
  if (version != kModelVersion) {
    throw FormatError("unsupported model file version " + std::to_string(version));
  }
  ClassifierState s;
  s.input_dim = in.u64();
  s.hidden_dim = in.u64();
  s.class_count = in.u64();
  s.rng_seed = in.u64();
  auto section = [&](const char* tag, Eigen::Index rows, Eigen::Index cols) {
    const auto t = in.take(4);
    if (std::memcmp(t.data(), tag, 4) != 0) throw FormatError(std::string("expected section ") + tag);
    const std::uint64_t count = in.u64();
    if (count != static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) ||
        count > in.remaining() / 8) {
      throw FormatError(std::string("section ") + tag + " has the wrong size");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = in.f64();
    return m;
  };
  const auto in_dim = static_cast<Eigen::Index>(s.input_dim);
  const auto hid = static_cast<Eigen::Index>(s.hidden_dim);
  const auto cls = static_cast<Eigen::Index>(s.class_count);
  s.w1 = section("W1__", hid, in_dim);
  s.b1 = section("B1__", hid, 1);
  s.w2 = section("W2__", cls, hid);
  s.b2 = section("B2__", cls, 1);
  if (!in.done()) throw FormatError("trailing bytes after model sections");
  return s;
}

}  // namespace freqaug

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freqaug/errors.hpp"

namespace freqaug {

struct Shape {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;

  std::size_t plane() const { return height * width; }
  std::size_t size() const { return height * width * channels; }

  friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(const Shape& s) {
  return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" +
         std::to_string(s.channels);
}

/// Real-valued image, channel-planar (all of channel 0, then channel 1, ...),
/// each plane row-major. Values are nominally in [0,1]; intermediate results
/// of spectral transforms may leave that range until clamped.
class ImageTensor {
 public:
  ImageTensor() = default;

  ImageTensor(Shape shape, std::vector<double> data,
              std::optional<int> label = std::nullopt)
      : shape_(shape), data_(std::move(data)), label_(label) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("image data length " + std::to_string(data_.size()) +
                       " does not match shape " + to_string(shape_));
    }
    if (label_ && *label_ < 0) {
      throw LabelError("negative label " + std::to_string(*label_));
    }
  }

  static ImageTensor zeros(Shape shape, std::optional<int> label = std::nullopt) {
    return ImageTensor(shape, std::vector<double>(shape.size(), 0.0), label);
  }

  const Shape& shape() const { return shape_; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t channels() const { return shape_.channels; }
  std::size_t size() const { return data_.size(); }

  std::span<const double> data() const { return data_; }
  std::span<const double> channel(std::size_t c) const {
    return std::span<const double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }

  double at(std::size_t c, std::size_t i, std::size_t j) const {
    return data_[(c * shape_.height + i) * shape_.width + j];
  }

  const std::optional<int>& label() const { return label_; }

  ImageTensor with_label(std::optional<int> label) const {
    return ImageTensor(shape_, data_, label);
  }

  ImageTensor clamped() const {
    std::vector<double> out(data_);
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
    return ImageTensor(shape_, std::move(out), label_);
  }

  double min() const {
    return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
  }
  double max() const {
    return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
  }

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
  std::optional<int> label_;
};

enum class Clamp { kNo, kYes };

inline ImageTensor finish(ImageTensor img, Clamp clamp) {
  return clamp == Clamp::kYes ? img.clamped() : img;
}

/// Labeled images plus a per-class position index. The index is rebuilt on
/// every mutation so it always inverts the labels.
class LabeledDataset {
 public:
  LabeledDataset() = default;

  LabeledDataset(std::vector<ImageTensor> images, std::size_t class_count)
      : images_(std::move(images)), class_count_(class_count) {
    rebuild_index();
  }

  const std::vector<ImageTensor>& images() const { return images_; }
  const ImageTensor& operator[](std::size_t i) const { return images_[i]; }
  std::size_t size() const { return images_.size(); }
  bool empty() const { return images_.empty(); }
  std::size_t class_count() const { return class_count_; }

  const std::vector<std::vector<std::size_t>>& class_index() const { return class_index_; }
  const std::vector<std::size_t>& members(int label) const {
    return class_index_.at(static_cast<std::size_t>(label));
  }

  void push_back(ImageTensor img) {
    check_label(img, images_.size());
    class_index_[static_cast<std::size_t>(*img.label())].push_back(images_.size());
    images_.push_back(std::move(img));
  }

 private:
  void check_label(const ImageTensor& img, std::size_t pos) const {
    if (!img.label()) {
      throw LabelError("image " + std::to_string(pos) + " has no label");
    }
    if (static_cast<std::size_t>(*img.label()) >= class_count_) {
      throw LabelError("image " + std::to_string(pos) + " has label " +
                       std::to_string(*img.label()) + " >= class count " +
                       std::to_string(class_count_));
    }
  }

  void rebuild_index() {
    class_index_.assign(class_count_, {});
    for (std::size_t p = 0; p < images_.size(); ++p) {
      check_label(images_[p], p);
      class_index_[static_cast<std::size_t>(*images_[p].label())].push_back(p);
    }
  }

  std::vector<ImageTensor> images_;
  std::size_t class_count_ = 0;
  std::vector<std::vector<std::size_t>> class_index_;
};

}  // namespace freqaug

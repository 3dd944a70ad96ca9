#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace softcap {

/// Flat row-major hidden state of shape tokens x channels, 64-bit elements.
///
/// A default-constructed tensor is empty (0 x 0) and only serves as a
/// placeholder; every other constructor enforces positive dimensions,
/// `data.size() == tokens * channels` and finite entries.
class FeatureTensor {
 public:
  FeatureTensor() = default;
  FeatureTensor(std::size_t tokens, std::size_t channels);
  FeatureTensor(std::size_t tokens, std::size_t channels, std::vector<double> data);

  static FeatureTensor filled(std::size_t tokens, std::size_t channels, double value);

  std::size_t tokens() const { return tokens_; }
  std::size_t channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<const double> values() const { return data_; }
  std::span<double> values() { return data_; }

  double operator[](std::size_t i) const { return data_[i]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double at(std::size_t token, std::size_t channel) const;

  bool same_shape(const FeatureTensor& other) const {
    return tokens_ == other.tokens_ && channels_ == other.channels_;
  }
  bool all_finite() const;

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  std::size_t tokens_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

using Trajectory = std::vector<FeatureTensor>;

}  // namespace softcap

#include "softcap/feature_tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "softcap/errors.hpp"

namespace softcap {

namespace {

void check_dims(std::size_t tokens, std::size_t channels) {
  if (tokens == 0 || channels == 0) {
    throw InputError("feature tensor dimensions must be positive, got " + std::to_string(tokens) +
                     "x" + std::to_string(channels));
  }
}

}  // namespace

FeatureTensor::FeatureTensor(std::size_t tokens, std::size_t channels)
    : tokens_(tokens), channels_(channels) {
  check_dims(tokens, channels);
  data_.assign(tokens * channels, 0.0);
}

FeatureTensor::FeatureTensor(std::size_t tokens, std::size_t channels, std::vector<double> data)
    : tokens_(tokens), channels_(channels), data_(std::move(data)) {
  check_dims(tokens, channels);
  if (data_.size() != tokens * channels) {
    throw InputError("feature tensor length " + std::to_string(data_.size()) +
                     " does not match " + std::to_string(tokens) + "x" + std::to_string(channels));
  }
  if (!all_finite()) throw InputError("feature tensor contains non-finite values");
}

FeatureTensor FeatureTensor::filled(std::size_t tokens, std::size_t channels, double value) {
  FeatureTensor t(tokens, channels);
  std::fill(t.data_.begin(), t.data_.end(), value);
  if (!std::isfinite(value)) throw InputError("feature tensor fill value is not finite");
  return t;
}

double FeatureTensor::at(std::size_t token, std::size_t channel) const {
  if (token >= tokens_ || channel >= channels_) throw InputError("feature tensor index out of range");
  return data_[token * channels_ + channel];
}

bool FeatureTensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace softcap

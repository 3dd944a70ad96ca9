#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "softcap/feature_tensor.hpp"

namespace softcap {

enum class CoefficientScheme {
  /// Newton extrapolation from backward differences: alpha_r(k) = C(k + r - 1, r).
  /// Exact on polynomial sequences of degree <= available order.
  newton_forward,
  /// Truncated Taylor series: alpha_r(k) = k^r / r!.
  factorial_taylor,
};

std::string_view to_string(CoefficientScheme scheme);
CoefficientScheme coefficient_scheme_from_string(std::string_view name);

struct CacheConfig {
  std::size_t order = 2;     // m
  std::size_t max_skip = 10;  // D_max
  CoefficientScheme scheme = CoefficientScheme::newton_forward;

  void validate() const;
};

/// Latest Full anchor plus the finite-difference stack over recent Full features.
///
/// Differences are taken over Full evaluations in arrival order; the step
/// gaps between Fulls are not used.
class AnchorState {
 public:
  explicit AnchorState(std::size_t order = 2);

  bool has_anchor() const { return !history_.empty(); }
  std::size_t order() const { return order_; }
  /// Throws StateError when no Full has been seen.
  std::size_t anchor_step() const;
  const FeatureTensor& feature() const;
  /// diffs()[r-1] is the r-th backward difference; size() <= order().
  std::span<const FeatureTensor> diffs() const { return diffs_; }
  const std::deque<FeatureTensor>& history() const { return history_; }

  /// Records a Full evaluation at step t and rebuilds the difference stack.
  void refresh(std::size_t t, const FeatureTensor& full_feature);

 private:
  void rebuild_diffs();

  std::size_t order_;
  std::optional<std::size_t> anchor_step_;
  std::deque<FeatureTensor> history_;  // oldest first, at most order_ + 1
  std::vector<FeatureTensor> diffs_;
};

AnchorState refresh(AnchorState anchor, std::size_t t, const FeatureTensor& full_feature);

/// Coefficient alpha_r for a skip of k steps.
double taylor_coefficient(CoefficientScheme scheme, std::size_t k, std::size_t r);

/// h_a + sum_r alpha_r(t - a) * Delta^(r) h_a over the available orders.
FeatureTensor approximate(const AnchorState& anchor, std::size_t t, const CacheConfig& cfg);

std::size_t cache_distance(const AnchorState& anchor, std::size_t t);

nlohmann::json to_json(const AnchorState& anchor, bool include_diffs = false);

}  // namespace softcap

#include <cmath>
#include <random>

#include "doctest.h"
#include "softcap/cache_engine.hpp"
#include "softcap/errors.hpp"
#include "softcap/trajectory.hpp"

using namespace softcap;

namespace {

FeatureTensor scalar_tensor(double v) { return FeatureTensor::filled(1, 1, v); }

double rel_l2(const FeatureTensor& approx, const FeatureTensor& truth) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (approx[i] - truth[i]) * (approx[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

double l2(const FeatureTensor& a, const FeatureTensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("difference stack from Full history") {
  AnchorState anchor(2);
  CHECK_FALSE(anchor.has_anchor());
  CHECK_THROWS_AS(anchor.anchor_step(), StateError);

  anchor.refresh(0, scalar_tensor(0.0));
  CHECK(anchor.diffs().empty());
  CHECK(anchor.anchor_step() == 0);

  SUBCASE("identical features give zero first difference") {
    anchor.refresh(1, scalar_tensor(0.0));
    REQUIRE(anchor.diffs().size() == 1);
    CHECK(anchor.diffs()[0][0] == 0.0);
  }
  SUBCASE("squares give Delta1 = 3, Delta2 = 2") {
    anchor.refresh(1, scalar_tensor(1.0));
    anchor.refresh(2, scalar_tensor(4.0));
    REQUIRE(anchor.diffs().size() == 2);
    CHECK(anchor.diffs()[0][0] == 3.0);
    CHECK(anchor.diffs()[1][0] == 2.0);
    CHECK(anchor.history().size() == 3);
    anchor.refresh(3, scalar_tensor(9.0));
    CHECK(anchor.history().size() == 3);
    CHECK(anchor.diffs()[0][0] == 5.0);
    CHECK(anchor.diffs()[1][0] == 2.0);
  }
}

TEST_CASE("refresh rejects shape changes and non-increasing steps") {
  AnchorState anchor(1);
  anchor.refresh(3, FeatureTensor::filled(2, 2, 1.0));
  CHECK_THROWS_AS(anchor.refresh(4, FeatureTensor::filled(2, 3, 1.0)), StateError);
  CHECK_THROWS_AS(anchor.refresh(3, FeatureTensor::filled(2, 2, 1.0)), OrderingError);
  const AnchorState copy = refresh(anchor, 5, FeatureTensor::filled(2, 2, 2.0));
  CHECK(copy.anchor_step() == 5);
  CHECK(anchor.anchor_step() == 3);
}

TEST_CASE("coefficient schemes") {
  for (std::size_t k = 1; k <= 10; ++k) {
    CHECK(taylor_coefficient(CoefficientScheme::newton_forward, k, 0) == 1.0);
    CHECK(taylor_coefficient(CoefficientScheme::newton_forward, k, 1) == double(k));
    CHECK(taylor_coefficient(CoefficientScheme::factorial_taylor, k, 1) == double(k));
    CHECK(taylor_coefficient(CoefficientScheme::newton_forward, k, 2) == double(k * (k + 1) / 2));
    CHECK(taylor_coefficient(CoefficientScheme::factorial_taylor, k, 2) == doctest::Approx(k * k / 2.0));
  }
  CHECK(taylor_coefficient(CoefficientScheme::newton_forward, 3, 3) == 10.0);
  CHECK(coefficient_scheme_from_string("factorial-taylor") == CoefficientScheme::factorial_taylor);
  CHECK(to_string(CoefficientScheme::newton_forward) == "newton-forward");
}

TEST_CASE("extrapolation of the sequence 0, 1, 4") {
  CacheConfig cfg;
  cfg.order = 2;
  AnchorState anchor(2);
  anchor.refresh(0, scalar_tensor(0.0));
  anchor.refresh(1, scalar_tensor(1.0));
  anchor.refresh(2, scalar_tensor(4.0));
  // t^2 continued
  CHECK(approximate(anchor, 3, cfg)[0] == 9.0);
  CHECK(approximate(anchor, 4, cfg)[0] == 16.0);
  CHECK(approximate(anchor, 12, cfg)[0] == 144.0);

  cfg.scheme = CoefficientScheme::factorial_taylor;
  CHECK(approximate(anchor, 4, cfg)[0] == 4.0 + 2.0 * 3.0 + 2.0 * 2.0);

  cfg.order = 1;
  cfg.scheme = CoefficientScheme::newton_forward;
  CHECK(approximate(anchor, 3, cfg)[0] == 4.0 + 3.0);
}

TEST_CASE("a lone anchor extrapolates as a constant") {
  CacheConfig cfg;
  AnchorState anchor(2);
  const auto h = FeatureTensor::filled(3, 4, 2.5);
  anchor.refresh(7, h);
  for (std::size_t t = 8; t <= 17; ++t) CHECK(approximate(anchor, t, cfg) == h);
}

TEST_CASE("approximation errors") {
  CacheConfig cfg;
  cfg.max_skip = 3;
  AnchorState anchor(2);
  CHECK_THROWS_AS(approximate(anchor, 1, cfg), StateError);
  anchor.refresh(5, scalar_tensor(1.0));
  CHECK_THROWS_AS(approximate(anchor, 5, cfg), OrderingError);
  CHECK_THROWS_AS(approximate(anchor, 4, cfg), OrderingError);
  CHECK_NOTHROW(approximate(anchor, 8, cfg));
  CHECK_THROWS_AS(approximate(anchor, 9, cfg), GuardViolation);

  CacheConfig bad;
  bad.order = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.order = 2;
  bad.max_skip = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("cache distance") {
  AnchorState anchor(2);
  anchor.refresh(10, scalar_tensor(0.0));
  CHECK(cache_distance(anchor, 10) == 0);
  CHECK(cache_distance(anchor, 13) == 3);
  anchor.refresh(13, scalar_tensor(0.0));
  CHECK(cache_distance(anchor, 14) == 1);
  CHECK_THROWS_AS(cache_distance(anchor, 12), OrderingError);
}

TEST_CASE("extrapolation is exact on polynomials of degree up to the order") {
  for (std::size_t order = 1; order <= 4; ++order) {
    for (unsigned degree = 0; degree <= order; ++degree) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        TrajectorySpec spec;
        spec.kind = TrajectoryKind::polynomial;
        spec.degree = degree;
        spec.seed = seed;
        spec.steps = order + 1 + 10;
        spec.tokens = 3;
        spec.channels = 5;
        const auto traj = generate(spec);
        CacheConfig cfg;
        cfg.order = order;
        AnchorState anchor(order);
        for (std::size_t t = 0; t <= order; ++t) anchor.refresh(t, traj[t]);
        for (std::size_t k = 1; k <= cfg.max_skip; ++k) {
          const auto approx = approximate(anchor, order + k, cfg);
          CHECK(approx.same_shape(traj[order + k]));
          CHECK(rel_l2(approx, traj[order + k]) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("mean error on smooth noise grows with skip distance") {
  constexpr std::size_t kSeeds = 120;
  constexpr std::size_t kMaxSkip = 10;
  CacheConfig cfg;
  cfg.max_skip = kMaxSkip;
  std::vector<double> mean(kMaxSkip + 1, 0.0);
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    TrajectorySpec spec;
    spec.kind = TrajectoryKind::smooth_noise;
    spec.seed = seed;
    spec.steps = cfg.order + 1 + kMaxSkip;
    spec.tokens = 4;
    spec.channels = 8;
    const auto traj = generate(spec);
    AnchorState anchor(cfg.order);
    for (std::size_t t = 0; t <= cfg.order; ++t) anchor.refresh(t, traj[t]);
    for (std::size_t k = 1; k <= kMaxSkip; ++k) {
      mean[k] += l2(approximate(anchor, cfg.order + k, cfg), traj[cfg.order + k]) / kSeeds;
    }
  }
  for (std::size_t k = 2; k <= kMaxSkip; ++k) {
    CAPTURE(k);
    CHECK(mean[k] >= mean[k - 1]);
  }
}

TEST_CASE("anchor JSON") {
  AnchorState anchor(2);
  auto j = to_json(anchor);
  CHECK(j["anchor_step"].is_null());
  anchor.refresh(0, scalar_tensor(0.0));
  anchor.refresh(1, scalar_tensor(1.0));
  j = to_json(anchor, true);
  CHECK(j["anchor_step"] == 1);
  CHECK(j["diffs"].size() == 1);
}

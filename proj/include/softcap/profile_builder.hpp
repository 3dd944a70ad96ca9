#pragma once

#include <span>

#include "softcap/controller.hpp"
#include "softcap/policy.hpp"

namespace softcap {

/// Tabulates C(p) from a fixed-threshold reference policy run over an ensemble.
///
/// Every member runs the full policy loop with the controller bypassed and a
/// constant threshold tau_ref. At step t (p = t / (T - 1)) the knot value is
/// the ensemble-mean Full count realized before the decision at t, divided
/// by the same mean at the last step, so an every-step-Full reference maps
/// onto the identity line. Warmup and guard Fulls are counted. One knot per
/// step; members may run on `jobs` threads, reduction order is fixed.
///
/// Throws ConfigError for an empty/ragged ensemble or tau_ref outside (0, 1),
/// DegenerateProfileError when the ensemble realizes no Fulls.
ReferenceProfile build_profile(double tau_ref, std::span<const Trajectory> ensemble, const PolicyConfig& base,
                               unsigned jobs = 1);

}  // namespace softcap

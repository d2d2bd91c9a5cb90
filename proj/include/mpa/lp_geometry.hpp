#pragma once

#include "mpa/types.hpp"

namespace mpa {

/// Direction of total l-inf length `step` maximizing g.v on the ball surface:
/// step * sign(g), with sign(0) = 0.
Vec steepest_ascent_linf(const Vec& g, double step);

/// Direction of l2 length `step` maximizing g.v: (step/||g||2) * g.
/// Returns the zero vector for g = 0.
Vec steepest_ascent_l2(const Vec& g, double step);

/// One-hot direction of l1 mass `step` at the largest |g_i| (ties broken by
/// lowest index). Returns the zero vector for g = 0.
Vec steepest_ascent_l1(const Vec& g, double step);

/// Spreads l1 mass `step` evenly over the k largest-|g| coordinates whose
/// ascent direction keeps x_adv inside [0,1]. Ineligible coordinates (zero
/// gradient, or sitting on the box face the gradient points out of) are
/// skipped and replaced by the next largest eligible ones; with fewer than k
/// eligible coordinates the mass is split among those available. Returns the
/// zero vector when nothing is eligible.
Vec steepest_ascent_l1_topk(const Vec& g, double step, Index k, const Vec& x_adv);

/// Dispatch on the norm; Norm::L1 uses the top-k variant.
Vec steepest_ascent(const Vec& g, Norm p, double step, Index k, const Vec& x_adv);

/// Elementwise clamp to [-eps, eps].
Vec project_linf(Vec delta, double eps);

/// Radial scaling onto the l2 ball: (min(eps, ||delta||2) / ||delta||2) * delta.
Vec project_l2(const Vec& delta, double eps);

/// Minimal-l2-distance projection onto the l1 ball of radius eps
/// (sort-based simplex projection; identity inside the ball).
Vec project_l1(const Vec& delta, double eps);

Vec project(const Vec& delta, Norm p, double eps);

/// Elementwise clamp to [lo, hi].
Vec clip_box(Vec x, double lo, double hi);

/// Default sparsity for the top-k l1 ascent: max(1, ceil(0.01 * d)).
Index default_l1_topk(Index d);

}  // namespace mpa

#include "mpa/lp_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mpa {

namespace {

inline double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Vec steepest_ascent_linf(const Vec& g, double step) {
    Vec out(g.size());
    for (Index i = 0; i < g.size(); ++i) out[i] = step * sign(g[i]);
    return out;
}

Vec steepest_ascent_l2(const Vec& g, double step) {
    const double n = g.norm();
    if (n == 0.0) return Vec::Zero(g.size());
    return (step / n) * g;
}

Vec steepest_ascent_l1(const Vec& g, double step) {
    Vec out = Vec::Zero(g.size());
    Index best = -1;
    double best_mag = 0.0;
    for (Index i = 0; i < g.size(); ++i) {
        const double m = std::abs(g[i]);
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    if (best >= 0) out[best] = step * sign(g[best]);
    return out;
}

Vec steepest_ascent_l1_topk(const Vec& g, double step, Index k, const Vec& x_adv) {
    const Index d = g.size();
    std::vector<Index> eligible;
    eligible.reserve(static_cast<std::size_t>(d));
    for (Index i = 0; i < d; ++i) {
        if (g[i] > 0.0 && x_adv[i] < 1.0) eligible.push_back(i);
        else if (g[i] < 0.0 && x_adv[i] > 0.0) eligible.push_back(i);
    }
    Vec out = Vec::Zero(d);
    if (eligible.empty()) return out;

    const Index take = std::min<Index>(k, static_cast<Index>(eligible.size()));
    // k largest |g| among the eligible; ties resolved toward lower index by
    // the stable partial ordering below.
    std::stable_sort(eligible.begin(), eligible.end(), [&](Index a, Index b) {
        return std::abs(g[a]) > std::abs(g[b]);
    });
    const double mass = step / static_cast<double>(take);
    for (Index j = 0; j < take; ++j) {
        const Index i = eligible[static_cast<std::size_t>(j)];
        out[i] = mass * sign(g[i]);
    }
    return out;
}

Vec steepest_ascent(const Vec& g, Norm p, double step, Index k, const Vec& x_adv) {
    switch (p) {
        case Norm::LInf: return steepest_ascent_linf(g, step);
        case Norm::L2: return steepest_ascent_l2(g, step);
        case Norm::L1: return steepest_ascent_l1_topk(g, step, k > 0 ? k : default_l1_topk(g.size()), x_adv);
    }
    return Vec::Zero(g.size());
}

Vec project_linf(Vec delta, double eps) {
    for (Index i = 0; i < delta.size(); ++i)
        delta[i] = std::clamp(delta[i], -eps, eps);
    return delta;
}

Vec project_l2(const Vec& delta, double eps) {
    const double n = delta.norm();
    if (n == 0.0) return delta;
    return (std::min(eps, n) / n) * delta;
}

Vec project_l1(const Vec& delta, double eps) {
    const Index d = delta.size();
    Vec mag = delta.cwiseAbs();
    if (mag.sum() <= eps) return delta;

    // Simplex projection threshold from the sorted magnitudes.
    std::vector<double> sorted(mag.data(), mag.data() + d);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumsum = 0.0;
    double eta = 0.0;
    for (Index j = 0; j < d; ++j) {
        cumsum += sorted[static_cast<std::size_t>(j)];
        const double candidate = (cumsum - eps) / static_cast<double>(j + 1);
        if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) eta = candidate;
    }
    Vec out(d);
    for (Index i = 0; i < d; ++i)
        out[i] = sign(delta[i]) * std::max(mag[i] - eta, 0.0);
    return out;
}

Vec project(const Vec& delta, Norm p, double eps) {
    switch (p) {
        case Norm::LInf: return project_linf(delta, eps);
        case Norm::L2: return project_l2(delta, eps);
        case Norm::L1: return project_l1(delta, eps);
    }
    return delta;
}

Vec clip_box(Vec x, double lo, double hi) {
    for (Index i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lo, hi);
    return x;
}

Index default_l1_topk(Index d) {
    return std::max<Index>(1, static_cast<Index>(std::ceil(0.01 * static_cast<double>(d))));
}

}  // namespace mpa

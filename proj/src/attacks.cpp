#include "mpa/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mpa {

namespace {

void validate(const AttackConfig& cfg) {
    if (cfg.norms.empty()) throw std::invalid_argument("attack config has no norms");
    for (std::size_t i = 0; i < cfg.norms.size(); ++i) {
        for (std::size_t j = i + 1; j < cfg.norms.size(); ++j)
            if (cfg.norms[i].norm == cfg.norms[j].norm)
                throw std::invalid_argument("duplicate norm in attack config");
        if (cfg.norms[i].epsilon <= 0.0 || cfg.norms[i].step <= 0.0)
            throw std::invalid_argument("attack budgets and steps must be positive");
    }
    if (cfg.temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
    if (cfg.iterations < 0 || cfg.inner_iterations < 0)
        throw std::invalid_argument("iteration counts must be nonnegative");
}

Index topk_of(const AttackConfig& cfg, Index d) {
    return cfg.l1_topk > 0 ? cfg.l1_topk : default_l1_topk(d);
}

// Single-norm PGD update; combine_and_project performs the same arithmetic
// per pixel subset, which keeps the single-norm reduction bit-exact.
Vec pgd_step(const Vec& x_adv, const Vec& x, const Vec& dir, Norm p, double eps) {
    Vec moved = x_adv + dir;
    Vec delta = moved - x;
    delta = project(delta, p, eps);
    return clip_box(x + delta, 0.0, 1.0);
}

}  // namespace

AttackReport pgd_attack(const MlpModel& model, const LabeledExample& ex, Norm p, double eps,
                        double step, int iterations, Index topk) {
    if (eps <= 0.0 || step <= 0.0)
        throw std::invalid_argument("attack budget and step must be positive");
    const Index d = ex.x.size();
    const Index k = topk > 0 ? topk : default_l1_topk(d);

    Vec x_adv = ex.x;
    auto report = [&](bool success, int used) {
        AttackReport r;
        r.success = success;
        r.iterations_used = used;
        r.x_adv = x_adv;
        r.assignment_counts = {d};
        r.final_loss = cross_entropy(model.forward(x_adv), ex.label);
        return r;
    };

    if (model.predict(x_adv) != ex.label) return report(true, 0);
    for (int iter = 1; iter <= iterations; ++iter) {
        const Vec g = model.input_gradient(x_adv, ex.label);
        const Vec dir = steepest_ascent(g, p, step, k, x_adv);
        x_adv = pgd_step(x_adv, ex.x, dir, p, eps);
        if (model.predict(x_adv) != ex.label) return report(true, iter);
    }
    return report(false, iterations);
}

Vec msd_adversary(const MlpModel& model, const LabeledExample& ex, const AttackConfig& cfg,
                  const MsdHook* hook) {
    validate(cfg);
    const Index k = topk_of(cfg, ex.x.size());
    Vec x_adv = ex.x;
    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        const Vec g = model.input_gradient(x_adv, ex.label);
        std::vector<double> losses;
        losses.reserve(cfg.norms.size());
        Vec best;
        double best_loss = -std::numeric_limits<double>::infinity();
        std::size_t chosen = 0;
        for (std::size_t j = 0; j < cfg.norms.size(); ++j) {
            const auto& nb = cfg.norms[j];
            const Vec dir = steepest_ascent(g, nb.norm, nb.step, k, x_adv);
            Vec delta = (x_adv + dir) - ex.x;
            delta = project(delta, nb.norm, nb.epsilon);
            Vec candidate = ex.x + delta;
            const double loss = cross_entropy(model.forward(candidate), ex.label);
            losses.push_back(loss);
            if (loss > best_loss) {
                best_loss = loss;
                best = std::move(candidate);
                chosen = j;
            }
        }
        x_adv = clip_box(best, 0.0, 1.0);
        if (hook && hook->on_select) hook->on_select(iter, losses, chosen);
    }
    return x_adv;
}

Vec temperature_softmax(const Vec& row, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("temperature must be positive");
    Vec scaled = row / tau;
    const double m = scaled.maxCoeff();
    Vec e = (scaled.array() - m).exp();
    return e / e.sum();
}

Mat softmax_rows(const Mat& c, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("temperature must be positive");
    Mat w(c.rows(), c.cols());
    for (Index i = 0; i < c.rows(); ++i) {
        const Vec row = c.row(i).transpose();
        w.row(i) = temperature_softmax(row, tau).transpose();
    }
    return w;
}

Vec mixed_perturbation(const Mat& c, const Mat& dirs, double tau) {
    if (c.rows() != dirs.rows() || c.cols() != dirs.cols())
        throw std::invalid_argument("coefficient/direction shape mismatch");
    const Mat w = softmax_rows(c, tau);
    return (w.array() * dirs.array()).rowwise().sum().matrix();
}

Mat coefficient_ascent_step(const MlpModel& model, const Vec& x_adv, const LabeledExample& ex,
                            const Mat& c, const Mat& dirs, const AttackConfig& cfg) {
    const Mat w = softmax_rows(c, cfg.temperature);
    const Vec mix = (w.array() * dirs.array()).rowwise().sum().matrix();
    const Vec x_tilde = x_adv + mix;
    const Vec gx = model.input_gradient(x_tilde, ex.label);
    // dL/dc(i,p) = gx_i * w(i,p) * (dirs(i,p) - mix_i) / tau  (softmax Jacobian)
    Mat grad = dirs;
    grad.colwise() -= mix;
    grad.array() *= w.array();
    grad.array().colwise() *= gx.array() / cfg.temperature;
    return c + cfg.coefficient_step * grad;
}

std::vector<int> norm_assignment(const Mat& c) {
    std::vector<int> assign(static_cast<std::size_t>(c.rows()));
    for (Index i = 0; i < c.rows(); ++i) {
        int best = 0;
        for (Index p = 1; p < c.cols(); ++p)
            if (c(i, p) > c(i, best)) best = static_cast<int>(p);
        assign[static_cast<std::size_t>(i)] = best;
    }
    return assign;
}

Vec combine_and_project(const Vec& x_adv, const Vec& x, const Mat& c, const Mat& dirs,
                        const AttackConfig& cfg) {
    if (c.cols() != static_cast<Index>(cfg.norms.size()))
        throw std::invalid_argument("coefficient tensor does not match config norms");
    const std::vector<int> assign = norm_assignment(c);
    Vec out = x_adv;
    for (std::size_t pi = 0; pi < cfg.norms.size(); ++pi) {
        std::vector<Index> set;
        for (Index i = 0; i < out.size(); ++i)
            if (assign[static_cast<std::size_t>(i)] == static_cast<int>(pi)) set.push_back(i);
        if (set.empty()) continue;
        const Index m = static_cast<Index>(set.size());
        Vec moved(m), anchor(m);
        for (Index j = 0; j < m; ++j) {
            moved[j] = out[set[static_cast<std::size_t>(j)]] + dirs(set[static_cast<std::size_t>(j)], static_cast<Index>(pi));
            anchor[j] = x[set[static_cast<std::size_t>(j)]];
        }
        Vec delta = moved - anchor;
        delta = project(delta, cfg.norms[pi].norm, cfg.norms[pi].epsilon);
        for (Index j = 0; j < m; ++j)
            out[set[static_cast<std::size_t>(j)]] = anchor[j] + delta[j];
    }
    return clip_box(std::move(out), 0.0, 1.0);
}

AttackReport mpa_attack(const MlpModel& model, const LabeledExample& ex, const AttackConfig& cfg,
                        const MpaHook* hook) {
    validate(cfg);
    const Index d = ex.x.size();
    const std::size_t np = cfg.norms.size();
    const Index k = topk_of(cfg, d);

    std::mt19937_64 gen(cfg.seed);
    const double bound = std::sqrt(6.0 / static_cast<double>(np));
    std::uniform_real_distribution<double> uni(-bound, bound);
    Mat c(d, static_cast<Index>(np));
    auto reinit = [&] {
        for (Index p = 0; p < c.cols(); ++p)
            for (Index i = 0; i < c.rows(); ++i) c(i, p) = uni(gen);
    };
    reinit();

    Vec x_adv = ex.x;
    auto report = [&](bool success, int used) {
        AttackReport r;
        r.success = success;
        r.iterations_used = used;
        r.x_adv = x_adv;
        r.assignment_counts.assign(np, 0);
        for (int p : norm_assignment(c)) ++r.assignment_counts[static_cast<std::size_t>(p)];
        r.final_loss = cross_entropy(model.forward(x_adv), ex.label);
        return r;
    };

    if (model.predict(x_adv) != ex.label) return report(true, 0);
    Mat dirs(d, static_cast<Index>(np));
    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        if (iter > 1 && !cfg.coefficient_reuse) reinit();
        const Vec g = model.input_gradient(x_adv, ex.label);
        for (std::size_t j = 0; j < np; ++j)
            dirs.col(static_cast<Index>(j)) =
                steepest_ascent(g, cfg.norms[j].norm, cfg.norms[j].step, k, x_adv);
        for (int inner = 0; inner < cfg.inner_iterations; ++inner)
            c = coefficient_ascent_step(model, x_adv, ex, c, dirs, cfg);
        x_adv = combine_and_project(x_adv, ex.x, c, dirs, cfg);
        if (hook && hook->after_combine) hook->after_combine(iter, x_adv, norm_assignment(c));
        if (model.predict(x_adv) != ex.label) return report(true, iter);
    }
    return report(false, cfg.iterations);
}

}  // namespace mpa

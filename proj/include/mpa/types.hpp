#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpa {

/// Flattened image / perturbation vector. Images live in [0,1]^d,
/// perturbations are zero-centered.
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// The three supported perturbation norms.
enum class Norm { L1, L2, LInf };

inline const char* norm_name(Norm p) {
    switch (p) {
        case Norm::L1: return "l1";
        case Norm::L2: return "l2";
        case Norm::LInf: return "linf";
    }
    return "?";
}

inline Norm parse_norm(const std::string& s) {
    if (s == "l1" || s == "1") return Norm::L1;
    if (s == "l2" || s == "2") return Norm::L2;
    if (s == "linf" || s == "inf") return Norm::LInf;
    throw std::invalid_argument("unknown norm: " + s);
}

/// Per-norm attack budget: the ball radius and the per-iteration ascent step.
struct NormBudget {
    Norm norm = Norm::LInf;
    double epsilon = 0.0;
    double step = 0.0;
};

struct LabeledExample {
    Vec x;
    int label = 0;
};

/// Configuration shared by the multi-norm attacks (MSD adversary and the
/// per-pixel mixing attack) and, with a single entry in `norms`, plain PGD.
struct AttackConfig {
    std::vector<NormBudget> norms;  // ordered, duplicate-free
    int iterations = 20;            // outer iterations n
    int inner_iterations = 17;      // coefficient optimization loops n'
    double coefficient_step = 1e-3;
    double temperature = 0.01;
    bool coefficient_reuse = true;
    Index l1_topk = 0;              // 0 selects max(1, ceil(0.01*d))
    std::uint64_t seed = 0;

    const NormBudget* find(Norm p) const {
        for (const auto& nb : norms)
            if (nb.norm == p) return &nb;
        return nullptr;
    }
};

}  // namespace mpa

#pragma once

#include "mpa/types.hpp"

namespace mpa {

/// Synthetic classification task: one prototype per class drawn uniformly
/// from [0.2, 0.8]^d, examples are prototypes plus Gaussian noise clipped to
/// the [0,1] box, labels assigned round-robin.
struct DatasetConfig {
    std::uint64_t seed = 0;
    int classes = 4;
    int dim = 64;
    int n_train = 2000;
    int n_test = 500;
    double noise = 0.15;
};

struct Dataset {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> test;
};

Dataset generate_dataset(const DatasetConfig& cfg);

}  // namespace mpa

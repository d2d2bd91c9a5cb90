#include "mpa/dataset.hpp"

#include "mpa/lp_geometry.hpp"

#include <random>

namespace mpa {

Dataset generate_dataset(const DatasetConfig& cfg) {
    if (cfg.classes < 2) throw std::invalid_argument("dataset needs at least two classes");
    if (cfg.dim < 4) throw std::invalid_argument("dataset dimension must be >= 4");

    std::mt19937_64 gen(cfg.seed);
    std::uniform_real_distribution<double> proto_dist(0.2, 0.8);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<Vec> prototypes(static_cast<std::size_t>(cfg.classes));
    for (auto& p : prototypes) {
        p = Vec(cfg.dim);
        for (Index i = 0; i < p.size(); ++i) p[i] = proto_dist(gen);
    }

    auto make_split = [&](int count) {
        std::vector<LabeledExample> out;
        out.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            const int label = i % cfg.classes;
            Vec x = prototypes[static_cast<std::size_t>(label)];
            if (cfg.noise > 0.0)
                for (Index j = 0; j < x.size(); ++j) x[j] += cfg.noise * noise(gen);
            out.push_back({clip_box(std::move(x), 0.0, 1.0), label});
        }
        return out;
    };

    Dataset ds;
    ds.train = make_split(cfg.n_train);
    ds.test = make_split(cfg.n_test);
    return ds;
}

}  // namespace mpa

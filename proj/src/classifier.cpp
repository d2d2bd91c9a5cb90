#include "mpa/classifier.hpp"

#include "mpa/attacks.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace mpa {

using json = nlohmann::json;

double learning_rate_at(const std::vector<LrPoint>& schedule, double fraction) {
    if (schedule.empty()) return 0.0;
    if (fraction <= schedule.front().fraction) return schedule.front().rate;
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        const auto& a = schedule[i - 1];
        const auto& b = schedule[i];
        if (fraction <= b.fraction) {
            const double span = b.fraction - a.fraction;
            if (span <= 0.0) return b.rate;
            const double t = (fraction - a.fraction) / span;
            return a.rate + t * (b.rate - a.rate);
        }
    }
    return schedule.back().rate;
}

MlpModel::MlpModel(int input_dim, const std::vector<int>& hidden, int class_count,
                   std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<int> dims;
    dims.push_back(input_dim);
    dims.insert(dims.end(), hidden.begin(), hidden.end());
    dims.push_back(class_count);
    for (std::size_t l = 1; l < dims.size(); ++l) {
        Layer layer;
        const int fan_in = dims[l - 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
        std::uniform_real_distribution<double> uni(-bound, bound);
        layer.weight = Mat(dims[l], dims[l - 1]);
        for (Index r = 0; r < layer.weight.rows(); ++r)
            for (Index c = 0; c < layer.weight.cols(); ++c) layer.weight(r, c) = uni(gen);
        layer.bias = Vec(dims[l]);
        for (Index r = 0; r < layer.bias.size(); ++r) layer.bias[r] = uni(gen);
        layers_.push_back(std::move(layer));
    }
}

namespace {

// Forward pass keeping pre-activations; shared by the gradient routines.
struct ForwardTrace {
    std::vector<Vec> activations;  // a_0 = x, ..., a_{L-1}
    std::vector<Vec> pre;          // z_1 ... z_L (z_L = logits)
};

ForwardTrace traced_forward(const std::vector<MlpModel::Layer>& layers, const Vec& x) {
    ForwardTrace t;
    t.activations.push_back(x);
    Vec a = x;
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Vec z = layers[l].weight * a + layers[l].bias;
        t.pre.push_back(z);
        if (l + 1 < layers.size()) {
            a = z.cwiseMax(0.0);
            t.activations.push_back(a);
        }
    }
    return t;
}

Vec softmax_of(const Vec& logits) {
    const double m = logits.maxCoeff();
    Vec e = (logits.array() - m).exp();
    return e / e.sum();
}

}  // namespace

Vec MlpModel::forward(const Vec& x) const {
    if (layers_.empty()) throw std::invalid_argument("model has no layers");
    if (x.size() != input_dim())
        throw std::invalid_argument("input dimension mismatch: got " +
                                    std::to_string(x.size()) + ", model expects " +
                                    std::to_string(input_dim()));
    Vec a = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        a = layers_[l].weight * a + layers_[l].bias;
        if (l + 1 < layers_.size()) a = a.cwiseMax(0.0);
    }
    return a;
}

int MlpModel::predict(const Vec& x) const {
    const Vec logits = forward(x);
    Index best = 0;
    for (Index i = 1; i < logits.size(); ++i)
        if (logits[i] > logits[best]) best = i;
    return static_cast<int>(best);
}

Vec MlpModel::input_gradient(const Vec& x, int label) const {
    const ForwardTrace t = traced_forward(layers_, x);
    Vec dz = softmax_of(t.pre.back());
    dz[label] -= 1.0;
    for (std::size_t l = layers_.size(); l-- > 0;) {
        Vec da = layers_[l].weight.transpose() * dz;
        if (l == 0) return da;
        // rectifier gate of the previous layer
        const Vec& z_prev = t.pre[l - 1];
        dz = da;
        for (Index i = 0; i < dz.size(); ++i)
            if (z_prev[i] <= 0.0) dz[i] = 0.0;
    }
    return Vec::Zero(x.size());
}

double cross_entropy(const Vec& logits, int label) {
    if (label < 0 || label >= logits.size())
        throw std::invalid_argument("label out of range");
    const double m = logits.maxCoeff();
    const double lse = std::log((logits.array() - m).exp().sum());
    return lse - (logits[label] - m);
}

double mean_loss(const MlpModel& model, std::span<const LabeledExample> batch) {
    double sum = 0.0;
    for (const auto& ex : batch) sum += cross_entropy(model.forward(ex.x), ex.label);
    return sum / static_cast<double>(batch.size());
}

std::vector<MlpModel::Layer> param_gradient(const MlpModel& model,
                                            std::span<const LabeledExample> batch) {
    if (batch.empty()) throw std::invalid_argument("param_gradient: empty batch");
    const auto& layers = model.layers();
    std::vector<MlpModel::Layer> grads(layers.size());
    for (std::size_t l = 0; l < layers.size(); ++l) {
        grads[l].weight = Mat::Zero(layers[l].weight.rows(), layers[l].weight.cols());
        grads[l].bias = Vec::Zero(layers[l].bias.size());
    }
    for (const auto& ex : batch) {
        const ForwardTrace t = traced_forward(layers, ex.x);
        Vec dz = softmax_of(t.pre.back());
        dz[ex.label] -= 1.0;
        for (std::size_t l = layers.size(); l-- > 0;) {
            grads[l].weight.noalias() += dz * t.activations[l].transpose();
            grads[l].bias += dz;
            if (l == 0) break;
            Vec da = layers[l].weight.transpose() * dz;
            const Vec& z_prev = t.pre[l - 1];
            dz = da;
            for (Index i = 0; i < dz.size(); ++i)
                if (z_prev[i] <= 0.0) dz[i] = 0.0;
        }
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& g : grads) {
        g.weight *= inv;
        g.bias *= inv;
    }
    return grads;
}

namespace {

int infer_class_count(const std::vector<LabeledExample>& data) {
    int c = 0;
    for (const auto& ex : data) c = std::max(c, ex.label + 1);
    return std::max(c, 2);
}

struct SgdState {
    std::vector<MlpModel::Layer> velocity;
};

void sgd_step(MlpModel& model, const std::vector<MlpModel::Layer>& grads, SgdState& state,
              double lr, double momentum, double weight_decay) {
    auto& layers = model.layers();
    if (state.velocity.empty()) {
        state.velocity.resize(layers.size());
        for (std::size_t l = 0; l < layers.size(); ++l) {
            state.velocity[l].weight = Mat::Zero(layers[l].weight.rows(), layers[l].weight.cols());
            state.velocity[l].bias = Vec::Zero(layers[l].bias.size());
        }
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& v = state.velocity[l];
        v.weight = momentum * v.weight + grads[l].weight + weight_decay * layers[l].weight;
        v.bias = momentum * v.bias + grads[l].bias + weight_decay * layers[l].bias;
        layers[l].weight -= lr * v.weight;
        layers[l].bias -= lr * v.bias;
    }
}

MlpModel train_loop(const std::vector<LabeledExample>& data, const TrainConfig& cfg,
                    const AttackConfig* atk, const TrainHooks* hooks) {
    if (data.empty()) throw std::invalid_argument("training data is empty");
    const int d = static_cast<int>(data.front().x.size());
    MlpModel model(d, cfg.hidden, infer_class_count(data), cfg.seed);
    std::mt19937_64 gen(cfg.seed);
    SgdState state;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), gen);
        const double fraction = (static_cast<double>(epoch) + 0.5) / static_cast<double>(cfg.epochs);
        const double lr = learning_rate_at(cfg.lr_schedule, fraction);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<LabeledExample> batch;
            batch.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) batch.push_back(data[order[i]]);
            if (atk) {
                for (auto& ex : batch) {
                    const LabeledExample clean = ex;
                    ex.x = msd_adversary(model, ex, *atk);
                    if (hooks && hooks->on_adversary) hooks->on_adversary(model, clean, ex.x);
                }
            }
            const auto grads = param_gradient(model, batch);
            sgd_step(model, grads, state, lr, cfg.momentum, cfg.weight_decay);
        }
    }
    return model;
}

}  // namespace

MlpModel train_standard(const std::vector<LabeledExample>& data, const TrainConfig& cfg) {
    return train_loop(data, cfg, nullptr, nullptr);
}

MlpModel train_msd(const std::vector<LabeledExample>& data, const TrainConfig& cfg,
                   const AttackConfig& atk, const TrainHooks* hooks) {
    return train_loop(data, cfg, &atk, hooks);
}

double clean_accuracy(const MlpModel& model, std::span<const LabeledExample> data) {
    if (data.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& ex : data)
        if (model.predict(ex.x) == ex.label) ++hits;
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

namespace {

json schedule_to_json(const std::vector<LrPoint>& sched) {
    json arr = json::array();
    for (const auto& p : sched) arr.push_back({{"fraction", p.fraction}, {"rate", p.rate}});
    return arr;
}

std::vector<LrPoint> schedule_from_json(const json& arr) {
    std::vector<LrPoint> out;
    for (const auto& p : arr) out.push_back({p.at("fraction").get<double>(), p.at("rate").get<double>()});
    return out;
}

}  // namespace

void save_checkpoint(const MlpModel& model, const TrainConfig& cfg,
                     const std::filesystem::path& path) {
    json j;
    j["format"] = "mpa-model";
    j["version"] = 1;
    j["input_dim"] = model.input_dim();
    j["class_count"] = model.class_count();
    json layers = json::array();
    for (const auto& layer : model.layers()) {
        json lj;
        lj["rows"] = layer.weight.rows();
        lj["cols"] = layer.weight.cols();
        std::vector<double> w(layer.weight.data(), layer.weight.data() + layer.weight.size());
        lj["weight"] = w;  // column-major
        std::vector<double> b(layer.bias.data(), layer.bias.data() + layer.bias.size());
        lj["bias"] = b;
        layers.push_back(std::move(lj));
    }
    j["layers"] = std::move(layers);
    j["train_config"] = {
        {"epochs", cfg.epochs},
        {"batch_size", cfg.batch_size},
        {"momentum", cfg.momentum},
        {"weight_decay", cfg.weight_decay},
        {"lr_schedule", schedule_to_json(cfg.lr_schedule)},
        {"hidden", cfg.hidden},
        {"seed", cfg.seed},
    };
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path.string());
    out << j.dump(2) << '\n';
}

std::pair<MlpModel, TrainConfig> load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint: " + path.string());
    json j = json::parse(in);
    if (j.value("format", "") != "mpa-model")
        throw std::runtime_error("not a model checkpoint: " + path.string());
    MlpModel model;
    for (const auto& lj : j.at("layers")) {
        MlpModel::Layer layer;
        const Index rows = lj.at("rows").get<Index>();
        const Index cols = lj.at("cols").get<Index>();
        const auto w = lj.at("weight").get<std::vector<double>>();
        const auto b = lj.at("bias").get<std::vector<double>>();
        if (static_cast<Index>(w.size()) != rows * cols || static_cast<Index>(b.size()) != rows)
            throw std::runtime_error("checkpoint layer shape mismatch");
        layer.weight = Eigen::Map<const Mat>(w.data(), rows, cols);
        layer.bias = Eigen::Map<const Vec>(b.data(), rows);
        model.layers().push_back(std::move(layer));
    }
    TrainConfig cfg;
    const json& tc = j.at("train_config");
    cfg.epochs = tc.at("epochs").get<int>();
    cfg.batch_size = tc.at("batch_size").get<int>();
    cfg.momentum = tc.at("momentum").get<double>();
    cfg.weight_decay = tc.at("weight_decay").get<double>();
    cfg.lr_schedule = schedule_from_json(tc.at("lr_schedule"));
    cfg.hidden = tc.at("hidden").get<std::vector<int>>();
    cfg.seed = tc.at("seed").get<std::uint64_t>();
    return {std::move(model), std::move(cfg)};
}

}  // namespace mpa

#include "fpmod/classify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "fpmod/qdsim.hpp"

namespace fpmod {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double sign_of(Label l) { return static_cast<double>(static_cast<int>(l)); }

std::size_t check_lengths(const std::vector<LabeledExample>& examples) {
    if (examples.empty()) {
        throw InputError("input: empty training set");
    }
    const std::size_t n = examples.front().features.size();
    bool has_real = false;
    bool has_synthetic = false;
    for (const auto& e : examples) {
        if (e.features.size() != n) {
            throw InputError("input: feature length mismatch");
        }
        (e.label == Label::Real ? has_real : has_synthetic) = true;
    }
    if (!has_real || !has_synthetic) {
        throw InputError("input: training set needs both classes");
    }
    return n;
}

}  // namespace

double dual_objective(const std::vector<LabeledExample>& examples, const std::vector<double>& alphas,
                      double bias_scale) {
    const std::size_t d = examples.empty() ? 0 : examples.front().features.size();
    std::vector<double> w(d, 0.0);
    double b = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const double ay = alphas[i] * sign_of(examples[i].label);
        for (std::size_t k = 0; k < d; ++k) {
            w[k] += ay * examples[i].features.values[k];
        }
        b += ay * bias_scale;
        sum += alphas[i];
    }
    return sum - 0.5 * (dot(w, w) + b * b);
}

double primal_objective(const std::vector<LabeledExample>& examples, const LinearModel& model) {
    double loss = 0.0;
    for (const auto& e : examples) {
        const double margin = sign_of(e.label) * (dot(model.weights, e.features.values) + model.bias);
        loss += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * (dot(model.weights, model.weights) + model.bias * model.bias) + model.C * loss;
}

LinearModel train(const std::vector<LabeledExample>& examples, const SvmOptions& options) {
    if (!(options.C > 0.0)) {
        throw InputError("input: C must be positive");
    }
    const std::size_t d = check_lengths(examples);
    const std::size_t n = examples.size();
    const double s = options.bias_scale;

    LinearModel model;
    model.C = options.C;
    model.weights.assign(d, 0.0);
    // augmented weight for the constant feature; the bias is s * wb
    double wb = 0.0;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> qii(n);
    for (std::size_t i = 0; i < n; ++i) {
        qii[i] = dot(examples[i].features.values, examples[i].features.values) + s * s;
    }

    const auto objectives = [&] {
        double loss = 0.0;
        double asum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double m = sign_of(examples[i].label) * (dot(model.weights, examples[i].features.values) + wb * s);
            loss += std::max(0.0, 1.0 - m);
            asum += alpha[i];
        }
        const double reg = 0.5 * (dot(model.weights, model.weights) + wb * wb);
        return std::pair{reg + options.C * loss, asum - reg};
    };

    long pass = 0;
    double primal = 0.0;
    double dual = 0.0;
    while (pass < options.max_passes) {
        for (std::size_t i = 0; i < n; ++i) {
            if (qii[i] <= 0.0) {
                continue;
            }
            const auto& x = examples[i].features.values;
            const double y = sign_of(examples[i].label);
            const double g = y * (dot(model.weights, x) + wb * s) - 1.0;
            const double next = std::clamp(alpha[i] - g / qii[i], 0.0, options.C);
            const double delta = (next - alpha[i]) * y;
            if (delta != 0.0) {
                for (std::size_t k = 0; k < d; ++k) {
                    model.weights[k] += delta * x[k];
                }
                wb += delta * s;
                alpha[i] = next;
            }
        }
        ++pass;
        std::tie(primal, dual) = objectives();
        if (primal - dual <= options.tolerance) {
            break;
        }
    }

    model.bias = wb * s;
    model.meta.passes = pass;
    model.meta.primal = primal;
    model.meta.dual = dual;
    model.meta.alphas = std::move(alpha);
    return model;
}

Prediction predict(const LinearModel& model, const FeatureVector& features) {
    if (features.size() != model.weights.size()) {
        throw InputError("input: feature length mismatch");
    }
    const double score = dot(model.weights, features.values) + model.bias;
    return {score >= 0.0 ? Label::Real : Label::Synthetic, score};
}

Evaluation evaluate(const LinearModel& model, const std::vector<LabeledExample>& test) {
    if (test.empty()) {
        throw InputError("input: empty test set");
    }
    Evaluation e;
    for (const auto& ex : test) {
        const bool predicted_real = predict(model, ex.features).label == Label::Real;
        if (ex.label == Label::Real) {
            ++(predicted_real ? e.tp : e.fn);
        } else {
            ++(predicted_real ? e.fp : e.tn);
        }
    }
    e.accuracy = static_cast<double>(e.tp + e.tn) / static_cast<double>(test.size());
    return e;
}

std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> split_by_finger(
    const std::vector<LabeledExample>& corpus, int train_fingers, std::uint64_t seed) {
    if (train_fingers < 1) {
        throw InputError("input: train finger count must be positive");
    }
    SeededRandom rng(seed);
    std::set<std::pair<int, std::string>> chosen;
    for (const Label cls : {Label::Real, Label::Synthetic}) {
        std::set<std::string> ids;
        for (const auto& e : corpus) {
            if (e.label == cls) {
                ids.insert(e.finger);
            }
        }
        if (ids.size() <= static_cast<std::size_t>(train_fingers)) {
            throw InputError("input: not enough fingers per class for a nonempty test set");
        }
        std::vector<std::string> order(ids.begin(), ids.end());
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            std::swap(order[i], order[rng.below(i + 1)]);
        }
        for (int k = 0; k < train_fingers; ++k) {
            chosen.insert({static_cast<int>(cls), order[k]});
        }
    }
    std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> out;
    for (const auto& e : corpus) {
        (chosen.count({static_cast<int>(e.label), e.finger}) ? out.first : out.second).push_back(e);
    }
    return out;
}

nlohmann::ordered_json to_json(const LinearModel& model) {
    nlohmann::ordered_json j;
    const int bins = static_cast<int>(std::lround(std::sqrt(static_cast<double>(model.weights.size()))));
    j["bins"] = bins;
    j["C"] = model.C;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["training_meta"] = {{"iterations", model.meta.passes},
                          {"objective", model.meta.primal},
                          {"dual_objective", model.meta.dual}};
    return j;
}

LinearModel model_from_json(const nlohmann::json& j) {
    try {
        LinearModel m;
        m.C = j.at("C").get<double>();
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        const int bins = j.at("bins").get<int>();
        if (static_cast<std::size_t>(bins) * bins != m.weights.size()) {
            throw InputError("input: model weight length does not match bins");
        }
        if (j.contains("training_meta")) {
            const auto& meta = j.at("training_meta");
            m.meta.passes = meta.value("iterations", 0L);
            m.meta.primal = meta.value("objective", 0.0);
            m.meta.dual = meta.value("dual_objective", 0.0);
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("input: malformed model JSON: ") + e.what());
    }
}

void write_model_json(const LinearModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("output: cannot open " + path.string());
    }
    out << to_json(model).dump(2) << '\n';
}

LinearModel read_model_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("input: unreadable");
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("input: malformed model JSON: ") + e.what());
    }
    return model_from_json(j);
}

nlohmann::ordered_json to_json(const Evaluation& eval) {
    nlohmann::ordered_json j;
    j["accuracy"] = eval.accuracy;
    j["tp"] = eval.tp;
    j["tn"] = eval.tn;
    j["fp"] = eval.fp;
    j["fn"] = eval.fn;
    return j;
}

}  // namespace fpmod

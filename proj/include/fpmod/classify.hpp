#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fpmod/features.hpp"

namespace fpmod {

enum class Label : int { Real = 1, Synthetic = -1 };

struct LabeledExample {
    FeatureVector features;
    Label label = Label::Real;
    std::string provenance;
    std::string finger;
};

struct TrainingMeta {
    long passes = 0;
    double primal = 0.0;
    double dual = 0.0;
    std::vector<double> alphas;  // one per training example, in [0, C]
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    double C = 1.0;
    TrainingMeta meta;
};

struct SvmOptions {
    double C = 1.0;
    double tolerance = 1e-6;   // duality gap
    long max_passes = 100000;
    double bias_scale = 1.0;   // value of the augmented constant feature
};

/// L2-regularized hinge-loss SVM by dual coordinate descent over the
/// augmented features (x, bias_scale), sweeping examples in input order.
/// The bias is therefore regularized together with w.
/// Throws InputError on an empty or single-class set or mixed lengths.
LinearModel train(const std::vector<LabeledExample>& examples, const SvmOptions& options = {});

/// Dual objective sum(a) - 1/2 a'Qa with Q_ij = y_i y_j (x_i.x_j + s^2).
double dual_objective(const std::vector<LabeledExample>& examples, const std::vector<double>& alphas,
                      double bias_scale = 1.0);

/// 1/2 (|w|^2 + b^2) + C sum hinge(y (w.x + b)).
double primal_objective(const std::vector<LabeledExample>& examples, const LinearModel& model);

struct Prediction {
    Label label = Label::Real;
    double score = 0.0;
};

/// score = w.x + b; a score of exactly 0 is labeled Real.
/// Throws InputError on a length mismatch.
Prediction predict(const LinearModel& model, const FeatureVector& features);

struct Evaluation {
    double accuracy = 0.0;
    int tp = 0;  // real predicted real
    int tn = 0;  // synthetic predicted synthetic
    int fp = 0;  // synthetic predicted real
    int fn = 0;  // real predicted synthetic
};

/// Throws InputError on an empty test set.
Evaluation evaluate(const LinearModel& model, const std::vector<LabeledExample>& test);

/// Per class, shuffles the distinct finger ids (sorted first, then a seeded
/// Fisher-Yates pass) and sends the first train_fingers of them to training.
/// All examples of a finger end up on one side. Throws InputError when a
/// class has no more than train_fingers fingers.
std::pair<std::vector<LabeledExample>, std::vector<LabeledExample>> split_by_finger(
    const std::vector<LabeledExample>& corpus, int train_fingers, std::uint64_t seed);

nlohmann::ordered_json to_json(const LinearModel& model);
LinearModel model_from_json(const nlohmann::json& j);
void write_model_json(const LinearModel& model, const std::filesystem::path& path);
LinearModel read_model_json(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const Evaluation& eval);

}  // namespace fpmod

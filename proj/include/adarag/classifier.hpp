#pragma once

// Three-way question-complexity classifier.
//
// The built-in model is tf-idf features (word 1-2 grams + character
// trigrams, no stopword removal) into a multinomial logistic regression
// trained by seeded mini-batch gradient descent with L2 regularization.
// Epoch-level backtracking (revert + halve the learning rate when the
// objective rises) keeps the recorded training loss non-increasing.
// Training is single-threaded and fully deterministic given (data, seed,
// epochs); a trained model is immutable and safe for concurrent predict.
//
// An externally fine-tuned transformer classifier is reachable through
// remote_predict (POST {endpoint}/classify). FineTuneRecipe documents the
// fixed hyperparameters that external model is trained with.

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "adarag/types.hpp"

namespace adarag::classifier {

/// Sparse tf-idf vector over the training vocabulary, sorted by feature
/// id. Weights are finite and >= 0. Unseen features are dropped at
/// predict time.
struct FeatureVector {
    std::vector<std::pair<uint32_t, double>> entries;

    bool empty() const { return entries.empty(); }
};

/// Vocabulary + idf table built from the training set. Feature ids are
/// assigned in first-seen order over the input so models are reproducible
/// across platforms.
struct Vectorizer {
    std::unordered_map<std::string, uint32_t> vocab;
    std::vector<double> idf;

    size_t size() const { return idf.size(); }
};

/// Raw n-gram features of a question: word unigrams ("w:"), word bigrams
/// ("b:") and character trigrams ("c:") of the tokenized, lowercased
/// text.
std::vector<std::string> extract_features(const std::string& question);

/// tf-idf weights against the vocabulary, L2-normalized.
FeatureVector featurize(const Vectorizer& vec, const std::string& question);

struct LinearModel {
    Vectorizer vectorizer;
    std::array<std::vector<double>, 3> weights;  // per class, vocab-sized
    std::array<double, 3> bias{};
    std::string trained_on;                      // dataset fingerprint
    std::vector<double> training_loss;           // objective after each epoch
};

struct TrainOptions {
    int batch_size = 32;
    double learning_rate = 0.5;
    double l2 = 1e-4;
};

/// Throws ContractError unless all three classes are present.
LinearModel train(const std::vector<QAExample>& labeled, int epochs, uint64_t seed,
                  const TrainOptions& opts = {});

struct Prediction {
    ComplexityLabel label;           // argmax, ties broken A < B < C
    std::array<double, 3> probs{};   // softmax, sums to 1
};

Prediction predict(const LinearModel& model, const std::string& question);

struct ClassifierReport {
    double loss = 0.0;       // mean cross-entropy
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::array<std::array<int, 3>, 3> confusion{};  // rows = true, cols = predicted
};

/// Macro-averaged metrics; undefined per-class precision/recall counts as
/// 0. Throws ContractError on empty or unlabeled input.
ClassifierReport evaluate_classifier(const LinearModel& model,
                                     const std::vector<QAExample>& test);

/// Renders the report in the Loss/Accuracy/Precision/Recall/F1 table
/// shape, with the confusion matrix below.
std::string format_report(const ClassifierReport& report, const std::string& model_name);

/// Versioned JSON persistence; load(save(m)) reproduces the model
/// exactly.
void save_model(const LinearModel& model, const std::string& path);
LinearModel load_model(const std::string& path);

/// POSTs {"question": ...} to {endpoint}/classify and expects
/// {"label": "A"|"B"|"C", "probs": {"A": p, "B": p, "C": p}}.
Prediction remote_predict(const std::string& endpoint, const std::string& question,
                          std::chrono::milliseconds timeout);

/// Hyperparameters of the externally fine-tuned transformer classifier,
/// recorded for whoever operates that service.
struct FineTuneRecipe {
    static constexpr int epochs = 10;
    static constexpr int effective_batch = 16;      // per-device 8 x grad accumulation 2
    static constexpr double learning_rate = 2e-5;
    static constexpr double weight_decay = 0.3;
    static constexpr int warmup_steps = 500;
    static constexpr double dropout = 0.1;          // hidden layers and attention
    static constexpr double grad_clip_norm = 1.0;
};

}  // namespace adarag::classifier

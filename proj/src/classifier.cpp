#include "adarag/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "adarag/bm25.hpp"
#include "adarag/gateway.hpp"
#include "adarag/kernels.hpp"
#include "adarag/rng.hpp"
#include "adarag/text.hpp"

namespace adarag::classifier {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

std::vector<std::string> extract_features(const std::string& question) {
    std::vector<std::string> feats;
    const auto tokens = bm25::tokenize(question);
    for (const auto& t : tokens) feats.push_back("w:" + t);
    for (size_t i = 0; i + 1 < tokens.size(); ++i) {
        feats.push_back("b:" + tokens[i] + " " + tokens[i + 1]);
    }
    // Character trigrams over the space-joined token stream (codepoints,
    // not bytes, so multibyte letters stay intact).
    std::string joined;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) joined.push_back(' ');
        joined += tokens[i];
    }
    std::vector<std::pair<size_t, size_t>> cps;  // byte offset, length
    size_t pos = 0;
    while (pos < joined.size()) {
        size_t begin = pos;
        text::decode_utf8(joined, pos);
        cps.emplace_back(begin, pos - begin);
    }
    for (size_t i = 0; i + 2 < cps.size(); ++i) {
        const size_t begin = cps[i].first;
        const size_t end = cps[i + 2].first + cps[i + 2].second;
        feats.push_back("c:" + joined.substr(begin, end - begin));
    }
    return feats;
}

FeatureVector featurize(const Vectorizer& vec, const std::string& question) {
    std::unordered_map<uint32_t, double> counts;
    for (const auto& f : extract_features(question)) {
        auto it = vec.vocab.find(f);
        if (it != vec.vocab.end()) counts[it->second] += 1.0;
    }
    FeatureVector fv;
    fv.entries.reserve(counts.size());
    for (const auto& [id, tf] : counts) {
        fv.entries.emplace_back(id, tf * vec.idf[id]);
    }
    std::sort(fv.entries.begin(), fv.entries.end());
    // L2 normalize so the learning rate is scale-free.
    std::vector<double> values;
    values.reserve(fv.entries.size());
    for (const auto& [id, w] : fv.entries) values.push_back(w);
    const double norm2 = kernels::squared_norm(values.data(), values.size());
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& [id, w] : fv.entries) w *= inv;
    }
    return fv;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

std::array<double, 3> softmax3(const std::array<double, 3>& logits) {
    const double m = std::max({logits[0], logits[1], logits[2]});
    std::array<double, 3> e{std::exp(logits[0] - m), std::exp(logits[1] - m),
                            std::exp(logits[2] - m)};
    const double sum = e[0] + e[1] + e[2];
    return {e[0] / sum, e[1] / sum, e[2] / sum};
}

std::array<double, 3> logits_of(const LinearModel& model, const FeatureVector& fv) {
    std::array<double, 3> logits = model.bias;
    for (const auto& [id, w] : fv.entries) {
        logits[0] += model.weights[0][id] * w;
        logits[1] += model.weights[1][id] * w;
        logits[2] += model.weights[2][id] * w;
    }
    return logits;
}

double objective(const LinearModel& model, const std::vector<FeatureVector>& features,
                 const std::vector<int>& labels, double l2) {
    double ce = 0.0;
    for (size_t i = 0; i < features.size(); ++i) {
        const auto probs = softmax3(logits_of(model, features[i]));
        ce += -std::log(std::max(probs[static_cast<size_t>(labels[i])], 1e-300));
    }
    ce /= static_cast<double>(features.size());
    double reg = 0.0;
    for (const auto& row : model.weights) {
        reg += kernels::squared_norm(row.data(), row.size());
    }
    return ce + 0.5 * l2 * reg;
}

std::string dataset_fingerprint(const std::vector<QAExample>& labeled) {
    uint64_t h = 0xcbf29ce484222325ULL;
    const auto absorb = [&](const std::string& s) {
        h ^= rng::fnv1a(s);
        h *= 0x100000001b3ULL;
    };
    for (const auto& ex : labeled) {
        absorb(ex.id);
        absorb(ex.question);
        absorb(ex.label ? std::string(1, label_to_char(*ex.label)) : "?");
    }
    std::ostringstream oss;
    oss << std::hex << h;
    return oss.str();
}

}  // namespace

LinearModel train(const std::vector<QAExample>& labeled, int epochs, uint64_t seed,
                  const TrainOptions& opts) {
    if (labeled.empty()) throw ContractError("train: labeled set is empty");
    if (epochs < 1) throw ContractError("train: epochs must be >= 1");

    std::array<size_t, 3> class_counts{};
    std::vector<int> labels;
    labels.reserve(labeled.size());
    for (const auto& ex : labeled) {
        if (!ex.label) throw ContractError("train: example " + ex.id + " has no label");
        const int y = static_cast<int>(*ex.label);
        ++class_counts[static_cast<size_t>(y)];
        labels.push_back(y);
    }
    for (size_t c = 0; c < 3; ++c) {
        if (class_counts[c] == 0) {
            throw ContractError(std::string("train: class ") +
                                label_to_char(static_cast<ComplexityLabel>(c)) +
                                " is missing from the training set");
        }
    }

    LinearModel model;
    model.trained_on = dataset_fingerprint(labeled);

    // Vocabulary in first-seen order; document frequency per feature.
    std::vector<uint64_t> df;
    std::vector<std::vector<std::string>> raw_features(labeled.size());
    for (size_t i = 0; i < labeled.size(); ++i) {
        raw_features[i] = extract_features(labeled[i].question);
        std::vector<std::string> uniq = raw_features[i];
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (const auto& f : raw_features[i]) {
            if (model.vectorizer.vocab.find(f) == model.vectorizer.vocab.end()) {
                model.vectorizer.vocab.emplace(f, static_cast<uint32_t>(df.size()));
                df.push_back(0);
            }
        }
        for (const auto& f : uniq) ++df[model.vectorizer.vocab.at(f)];
    }
    const double n_docs = static_cast<double>(labeled.size());
    model.vectorizer.idf.resize(df.size());
    for (size_t i = 0; i < df.size(); ++i) {
        model.vectorizer.idf[i] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[i]))) + 1.0;
    }

    std::vector<FeatureVector> features(labeled.size());
    for (size_t i = 0; i < labeled.size(); ++i) {
        features[i] = featurize(model.vectorizer, labeled[i].question);
    }

    const size_t vocab_size = model.vectorizer.size();
    for (auto& row : model.weights) row.assign(vocab_size, 0.0);
    model.bias.fill(0.0);

    rng::SplitMix64 gen(rng::derive(seed, 0x7261696EULL));
    double lr = opts.learning_rate;
    const int batch_size = std::max(1, opts.batch_size);

    double prev_loss = objective(model, features, labels, opts.l2);
    std::array<std::vector<double>, 3> snapshot_w;
    std::array<double, 3> snapshot_b{};

    int completed = 0;
    int halvings = 0;
    constexpr int kMaxHalvings = 40;
    std::vector<size_t> order(labeled.size());
    std::iota(order.begin(), order.end(), 0);

    while (completed < epochs && halvings <= kMaxHalvings) {
        snapshot_w = model.weights;
        snapshot_b = model.bias;

        rng::shuffle(order, gen);
        for (size_t batch_start = 0; batch_start < order.size(); batch_start += batch_size) {
            const size_t batch_end = std::min(order.size(), batch_start + batch_size);
            const double inv_batch = 1.0 / static_cast<double>(batch_end - batch_start);
            // L2 decay over the dense weight matrix.
            const double decay = 1.0 - lr * opts.l2;
            for (auto& row : model.weights) {
                kernels::scale(decay, row.data(), row.size());
            }
            for (size_t bi = batch_start; bi < batch_end; ++bi) {
                const size_t i = order[bi];
                const auto probs = softmax3(logits_of(model, features[i]));
                for (int c = 0; c < 3; ++c) {
                    const double g = probs[static_cast<size_t>(c)] - (c == labels[i] ? 1.0 : 0.0);
                    const double step = lr * inv_batch * g;
                    auto& row = model.weights[static_cast<size_t>(c)];
                    for (const auto& [id, w] : features[i].entries) {
                        row[id] -= step * w;
                    }
                    model.bias[static_cast<size_t>(c)] -= step;
                }
            }
        }

        const double loss = objective(model, features, labels, opts.l2);
        if (loss > prev_loss) {
            // Objective rose: revert the epoch and retry with a smaller step.
            model.weights = snapshot_w;
            model.bias = snapshot_b;
            lr *= 0.5;
            ++halvings;
            continue;
        }
        prev_loss = loss;
        model.training_loss.push_back(loss);
        ++completed;
    }
    return model;
}

// ---------------------------------------------------------------------------
// Prediction & evaluation
// ---------------------------------------------------------------------------

Prediction predict(const LinearModel& model, const std::string& question) {
    const auto fv = featurize(model.vectorizer, question);
    const auto probs = softmax3(logits_of(model, fv));
    Prediction p;
    p.probs = probs;
    size_t best = 0;
    for (size_t c = 1; c < 3; ++c) {
        if (probs[c] > probs[best]) best = c;  // strict: ties keep the earlier label
    }
    p.label = static_cast<ComplexityLabel>(best);
    return p;
}

ClassifierReport evaluate_classifier(const LinearModel& model,
                                     const std::vector<QAExample>& test) {
    if (test.empty()) throw ContractError("evaluate_classifier: test set is empty");
    ClassifierReport report;
    double ce = 0.0;
    for (const auto& ex : test) {
        if (!ex.label) throw ContractError("evaluate_classifier: example " + ex.id + " has no label");
        const auto pred = predict(model, ex.question);
        const size_t truth = static_cast<size_t>(*ex.label);
        const size_t guessed = static_cast<size_t>(pred.label);
        ++report.confusion[truth][guessed];
        ce += -std::log(std::max(pred.probs[truth], 1e-300));
    }
    const double n = static_cast<double>(test.size());
    report.loss = ce / n;

    int correct = 0;
    for (size_t c = 0; c < 3; ++c) correct += report.confusion[c][c];
    report.accuracy = static_cast<double>(correct) / n;

    double precision_sum = 0.0;
    double recall_sum = 0.0;
    double f1_sum = 0.0;
    for (size_t c = 0; c < 3; ++c) {
        int tp = report.confusion[c][c];
        int predicted = 0;
        int actual = 0;
        for (size_t r = 0; r < 3; ++r) {
            predicted += report.confusion[r][c];
            actual += report.confusion[c][r];
        }
        const double precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
        const double recall = actual > 0 ? static_cast<double>(tp) / actual : 0.0;
        const double f1 =
            (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        precision_sum += precision;
        recall_sum += recall;
        f1_sum += f1;
    }
    report.macro_precision = precision_sum / 3.0;
    report.macro_recall = recall_sum / 3.0;
    report.macro_f1 = f1_sum / 3.0;
    return report;
}

std::string format_report(const ClassifierReport& report, const std::string& model_name) {
    std::ostringstream oss;
    oss.setf(std::ios::fixed);
    oss.precision(3);
    oss << "| Model | Loss | Accuracy | Precision | Recall | F1 |\n";
    oss << "|---|---|---|---|---|---|\n";
    oss << "| " << model_name << " | " << report.loss << " | " << report.accuracy << " | "
        << report.macro_precision << " | " << report.macro_recall << " | " << report.macro_f1
        << " |\n\n";
    oss << "Confusion matrix (rows = true, cols = predicted):\n";
    oss << "      A     B     C\n";
    const char* names = "ABC";
    for (size_t r = 0; r < 3; ++r) {
        oss << names[r];
        for (size_t c = 0; c < 3; ++c) {
            oss << ' ' << std::setw(5) << report.confusion[r][c];
        }
        oss << '\n';
    }
    return oss.str();
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace {
constexpr const char* kModelFormat = "adarag-linear-model";
constexpr int kModelVersion = 1;
}  // namespace

void save_model(const LinearModel& model, const std::string& path) {
    json doc;
    doc["format"] = kModelFormat;
    doc["version"] = kModelVersion;
    doc["trained_on"] = model.trained_on;
    doc["labels"] = json::array({"A", "B", "C"});
    // Vocabulary serialized by id so load() restores identical ids.
    std::vector<const std::string*> terms(model.vectorizer.size(), nullptr);
    for (const auto& [term, id] : model.vectorizer.vocab) terms[id] = &term;
    json vocab = json::array();
    for (const auto* t : terms) vocab.push_back(*t);
    doc["vocabulary"] = std::move(vocab);
    doc["idf"] = model.vectorizer.idf;
    doc["bias"] = model.bias;
    doc["weights"] = json::array({model.weights[0], model.weights[1], model.weights[2]});
    doc["training_loss"] = model.training_loss;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open model file for write: " + path);
    out << doc.dump();
    if (!out) throw Error("I/O error while writing model: " + path);
}

LinearModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open model file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) throw Error("model file is not JSON: " + path);
    if (!doc.contains("format") || doc["format"] != kModelFormat) {
        throw Error("not a classifier model file: " + path);
    }
    if (!doc.contains("version") || doc["version"].get<int>() != kModelVersion) {
        throw Error("unsupported model version in: " + path);
    }
    LinearModel model;
    model.trained_on = doc.value("trained_on", std::string{});
    const auto& vocab = doc["vocabulary"];
    for (uint32_t id = 0; id < vocab.size(); ++id) {
        model.vectorizer.vocab.emplace(vocab[id].get<std::string>(), id);
    }
    model.vectorizer.idf = doc["idf"].get<std::vector<double>>();
    const auto bias = doc["bias"].get<std::vector<double>>();
    const auto& weights = doc["weights"];
    if (bias.size() != 3 || weights.size() != 3) throw Error("model file is malformed: " + path);
    for (size_t c = 0; c < 3; ++c) {
        model.bias[c] = bias[c];
        model.weights[c] = weights[c].get<std::vector<double>>();
        if (model.weights[c].size() != model.vectorizer.size()) {
            throw Error("model weight dimensions do not match the vocabulary: " + path);
        }
    }
    if (doc.contains("training_loss")) {
        model.training_loss = doc["training_loss"].get<std::vector<double>>();
    }
    return model;
}

// ---------------------------------------------------------------------------
// Remote classifier
// ---------------------------------------------------------------------------

Prediction remote_predict(const std::string& endpoint, const std::string& question,
                          std::chrono::milliseconds timeout) {
    std::string host = endpoint;
    std::string prefix;
    const size_t scheme_end = host.find("://");
    const size_t path_start = host.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start != std::string::npos) {
        prefix = host.substr(path_start);
        host = host.substr(0, path_start);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }

    httplib::Client cli(host);
    cli.set_connection_timeout(timeout);
    cli.set_read_timeout(timeout);
    cli.set_write_timeout(timeout);

    const json body{{"question", question}};
    auto res = cli.Post(prefix + "/classify", body.dump(), "application/json");
    if (!res) {
        if (res.error() == httplib::Error::ConnectionTimeout ||
            res.error() == httplib::Error::Read) {
            throw llm::TimeoutError("remote classifier timed out: " + endpoint);
        }
        throw llm::TransportError("remote classifier unreachable (" +
                                  httplib::to_string(res.error()) + "): " + endpoint);
    }
    if (res->status != 200) {
        throw llm::ProtocolError("remote classifier returned HTTP " + std::to_string(res->status));
    }
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("label") || !parsed["label"].is_string()) {
        throw llm::ProtocolError("remote classifier response lacks a string \"label\"");
    }
    const auto label = label_from_string(parsed["label"].get<std::string>());
    if (!label) {
        throw llm::ProtocolError("remote classifier returned invalid label \"" +
                                 parsed["label"].get<std::string>() + "\"");
    }
    Prediction p;
    p.label = *label;
    p.probs = {0.0, 0.0, 0.0};
    if (parsed.contains("probs") && parsed["probs"].is_object()) {
        const auto& probs = parsed["probs"];
        const char* keys[3] = {"A", "B", "C"};
        for (size_t c = 0; c < 3; ++c) {
            if (!probs.contains(keys[c]) || !probs[keys[c]].is_number()) {
                throw llm::ProtocolError("remote classifier probs lack \"" +
                                         std::string(keys[c]) + "\"");
            }
            p.probs[c] = probs[keys[c]].get<double>();
        }
    } else {
        p.probs[static_cast<size_t>(p.label)] = 1.0;
    }
    return p;
}

}  // namespace adarag::classifier

#include "adarag/labeler.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "adarag/metrics.hpp"
#include "adarag/rng.hpp"
#include "adarag/text.hpp"

namespace adarag::labeling {

using nlohmann::json;

ComplexityLabel decide_label(const LabelSignals& s) {
    if (s.em_non || s.f1_non > s.f1_single) return ComplexityLabel::A;
    if (s.em_single || s.f1_single > s.f1_multi) return ComplexityLabel::B;
    return ComplexityLabel::C;
}

// ---------------------------------------------------------------------------
// Labeling
// ---------------------------------------------------------------------------

namespace {

std::unordered_map<std::string, ComplexityLabel> read_checkpoint(const std::string& path) {
    std::unordered_map<std::string, ComplexityLabel> done;
    std::ifstream in(path, std::ios::binary);
    if (!in) return done;  // absent checkpoint = fresh run
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.contains("id") || !row.contains("label")) continue;
        auto label = label_from_string(row["label"].get<std::string>());
        if (label) done.emplace(row["id"].get<std::string>(), *label);
    }
    return done;
}

}  // namespace

LabelResult label_dataset(const std::vector<QAExample>& examples,
                          const bm25::InvertedIndex& index, const corpus::CorpusHandle& docs,
                          llm::Gateway& gateway, const LabelConfig& cfg) {
    LabelResult result;
    result.labeled = examples;
    if (examples.empty()) return result;

    std::unordered_map<std::string, ComplexityLabel> checkpoint;
    if (!cfg.checkpoint_path.empty()) checkpoint = read_checkpoint(cfg.checkpoint_path);

    std::mutex mu;  // guards diagnostics, checkpoint writes, pending buffer
    std::ofstream ckpt_out;
    if (!cfg.checkpoint_path.empty()) {
        ckpt_out.open(cfg.checkpoint_path, std::ios::binary | std::ios::app);
        if (!ckpt_out) throw Error("cannot open checkpoint file: " + cfg.checkpoint_path);
    }
    size_t since_flush = 0;
    std::vector<std::pair<std::string, ComplexityLabel>> pending;

    const auto record_done = [&](const std::string& id, ComplexityLabel label) {
        if (!ckpt_out.is_open()) return;
        std::lock_guard<std::mutex> lk(mu);
        pending.emplace_back(id, label);
        if (++since_flush >= static_cast<size_t>(std::max(1, cfg.checkpoint_every))) {
            for (const auto& [pid, plabel] : pending) {
                ckpt_out << json{{"id", pid}, {"label", std::string(1, label_to_char(plabel))}}.dump()
                         << '\n';
            }
            ckpt_out.flush();
            pending.clear();
            since_flush = 0;
        }
    };

    const auto label_one = [&](QAExample& ex) {
        if (ex.dataset == cfg.multi_hop_tag) {
            ex.label = ComplexityLabel::C;  // multi-hop by construction
            return;
        }
        if (auto it = checkpoint.find(ex.id); it != checkpoint.end()) {
            ex.label = it->second;
            std::lock_guard<std::mutex> lk(mu);
            ++result.resumed;
            return;
        }

        auto non = strategy::answer_non_retrieval(ex, gateway, cfg.params, cfg.prompt);
        auto single = strategy::answer_single_retrieval(ex, index, docs, gateway, cfg.single_k,
                                                        cfg.params, cfg.prompt);
        auto multi = strategy::answer_multi_retrieval(ex, index, docs, gateway, cfg.multi,
                                                      cfg.params, cfg.prompt);
        for (const auto* t : {&non, &single, &multi}) {
            if (t->error) {
                std::lock_guard<std::mutex> lk(mu);
                result.diagnostics.push_back("question " + ex.id + ": " +
                                             strategy_name(t->strategy) +
                                             " failed, scored as empty answer (" + *t->error + ")");
            }
        }

        LabelSignals s;
        s.em_non = metrics::exact_match(non.answer, ex.answers);
        s.em_single = metrics::exact_match(single.answer, ex.answers);
        s.em_multi = metrics::exact_match(multi.answer, ex.answers);
        s.f1_non = metrics::token_f1(non.answer, ex.answers);
        s.f1_single = metrics::token_f1(single.answer, ex.answers);
        s.f1_multi = metrics::token_f1(multi.answer, ex.answers);
        ex.label = decide_label(s);
        record_done(ex.id, *ex.label);
    };

    const int workers = std::max(1, cfg.parallelism);
    if (workers == 1) {
        for (auto& ex : result.labeled) label_one(ex);
    } else {
        std::atomic<size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mu;
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= result.labeled.size()) return;
                    {
                        std::lock_guard<std::mutex> lk(failure_mu);
                        if (failure) return;
                    }
                    try {
                        label_one(result.labeled[i]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(failure_mu);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
    }

    // Flush whatever the checkpoint interval left buffered.
    if (ckpt_out.is_open()) {
        std::lock_guard<std::mutex> lk(mu);
        for (const auto& [pid, plabel] : pending) {
            ckpt_out << json{{"id", pid}, {"label", std::string(1, label_to_char(plabel))}}.dump()
                     << '\n';
        }
        ckpt_out.flush();
        pending.clear();
    }
    return result;
}

// ---------------------------------------------------------------------------
// Synonym augmentation
// ---------------------------------------------------------------------------

SynonymMap load_synonyms(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open synonym file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error("synonym file must be a JSON object: " + path);
    }
    SynonymMap map;
    for (const auto& [word, value] : doc.items()) {
        if (!value.is_array()) throw Error("synonyms for \"" + word + "\" must be an array");
        std::vector<std::string> alternatives;
        bool any_distinct = false;
        for (const auto& syn : value) {
            if (!syn.is_string()) throw Error("synonyms for \"" + word + "\" must be strings");
            std::string s = syn.get<std::string>();
            if (s.empty()) continue;
            if (s != word) any_distinct = true;
            alternatives.push_back(std::move(s));
        }
        if (alternatives.empty() || !any_distinct) {
            throw Error("word \"" + word + "\" maps only to itself (or to nothing)");
        }
        map.entries.emplace(word, std::move(alternatives));
    }
    return map;
}

namespace {

struct WordSpan {
    size_t begin;  // byte offset
    size_t end;
    std::string lowered;
};

std::vector<WordSpan> word_spans(const std::string& s) {
    std::vector<WordSpan> spans;
    size_t pos = 0;
    size_t word_begin = std::string::npos;
    std::string lowered;
    while (pos < s.size()) {
        const size_t cp_begin = pos;
        uint32_t cp = text::decode_utf8(s, pos);
        const auto cls = text::classify_codepoint(cp);
        if (cls == text::CharClass::word || cls == text::CharClass::mark) {
            if (word_begin == std::string::npos) {
                word_begin = cp_begin;
                lowered.clear();
            }
            text::encode_utf8(text::to_lower(cp), lowered);
        } else if (word_begin != std::string::npos) {
            spans.push_back({word_begin, cp_begin, lowered});
            word_begin = std::string::npos;
        }
    }
    if (word_begin != std::string::npos) spans.push_back({word_begin, s.size(), lowered});
    return spans;
}

}  // namespace

AugmentResult synonym_augment(const std::string& question, const SynonymMap& synonyms,
                              uint64_t seed) {
    if (synonyms.empty()) throw ContractError("synonym_augment: synonym map is empty");

    AugmentResult result;
    const auto spans = word_spans(question);
    std::vector<size_t> candidates;
    for (size_t i = 0; i < spans.size(); ++i) {
        auto it = synonyms.entries.find(spans[i].lowered);
        if (it == synonyms.entries.end()) continue;
        // Need at least one alternative that differs from the word itself.
        for (const auto& alt : it->second) {
            if (alt != spans[i].lowered) {
                candidates.push_back(i);
                break;
            }
        }
    }
    if (candidates.empty()) {
        result.text = question;
        result.substituted = false;  // flagged: nothing to substitute
        return result;
    }

    rng::SplitMix64 gen(seed);
    const size_t picks = std::min<size_t>(2, candidates.size());
    // Partial Fisher-Yates over the candidate list.
    for (size_t i = 0; i < picks; ++i) {
        size_t j = i + gen.bounded(candidates.size() - i);
        std::swap(candidates[i], candidates[j]);
    }
    std::vector<size_t> chosen(candidates.begin(), candidates.begin() + picks);
    std::sort(chosen.begin(), chosen.end());

    std::string out;
    size_t cursor = 0;
    for (size_t idx : chosen) {
        const auto& span = spans[idx];
        const auto& alternatives = synonyms.entries.at(span.lowered);
        std::vector<std::string_view> usable;
        for (const auto& alt : alternatives) {
            if (alt != span.lowered) usable.emplace_back(alt);
        }
        const std::string_view replacement = usable[gen.bounded(usable.size())];
        out.append(question, cursor, span.begin - cursor);
        result.substituted_positions.push_back(out.size());
        out.append(replacement);
        cursor = span.end;
    }
    out.append(question, cursor, question.size() - cursor);
    result.text = std::move(out);
    result.substituted = true;
    return result;
}

// ---------------------------------------------------------------------------
// Balancing
// ---------------------------------------------------------------------------

std::vector<QAExample> balance_labeled(const std::vector<QAExample>& labeled,
                                       const SynonymMap& synonyms, uint64_t seed,
                                       std::vector<std::string>* diagnostics) {
    constexpr std::array<ComplexityLabel, 3> kOrder{ComplexityLabel::A, ComplexityLabel::B,
                                                    ComplexityLabel::C};
    std::array<std::vector<size_t>, 3> members;
    for (size_t i = 0; i < labeled.size(); ++i) {
        if (!labeled[i].label) {
            throw ContractError("balance_labeled: example " + labeled[i].id + " has no label");
        }
        members[static_cast<size_t>(*labeled[i].label)].push_back(i);
    }
    for (size_t c = 0; c < 3; ++c) {
        if (members[c].empty()) {
            throw ContractError(std::string("balance_labeled: class ") +
                                label_to_char(kOrder[c]) + " is empty");
        }
    }

    const size_t m = std::min({members[0].size(), members[1].size(), members[2].size()});
    if (members[0].size() == m && members[1].size() == m && members[2].size() == m) {
        return labeled;  // already balanced: no-op rather than destroying data
    }
    const size_t target = 2 * m;

    const auto augment_row = [&](const QAExample& src) {
        QAExample variant = src;
        variant.id = src.id + "-aug";
        auto augmented = synonym_augment(src.question, synonyms, rng::derive(seed, rng::fnv1a(src.id)));
        variant.question = augmented.text;
        if (!augmented.substituted && diagnostics != nullptr) {
            diagnostics->push_back("question " + src.id +
                                   ": no synonym-mappable word, augmented variant equals source");
        }
        return variant;
    };

    std::vector<QAExample> out;
    out.reserve(target * 3);
    for (size_t c = 0; c < 3; ++c) {
        auto rows = members[c];
        if (rows.size() > target) {
            // Undersample: seeded shuffle, keep the first `target`, restore
            // input order (the final shuffle randomizes placement anyway).
            rng::SplitMix64 gen(rng::derive(seed, 0x55AA00ULL + c));
            rng::shuffle(rows, gen);
            rows.resize(target);
            std::sort(rows.begin(), rows.end());
            for (size_t idx : rows) out.push_back(labeled[idx]);
        } else {
            for (size_t idx : rows) out.push_back(labeled[idx]);
            size_t deficit = target - rows.size();
            if (deficit == rows.size()) {
                // The smallest class: one augmented variant per original.
                for (size_t idx : rows) out.push_back(augment_row(labeled[idx]));
            } else if (deficit > 0) {
                // Between m and 2m: top up with variants of seeded-chosen rows.
                rng::SplitMix64 gen(rng::derive(seed, 0xAA5500ULL + c));
                auto pool = rows;
                rng::shuffle(pool, gen);
                for (size_t i = 0; i < deficit; ++i) {
                    out.push_back(augment_row(labeled[pool[i % pool.size()]]));
                }
            }
        }
    }

    rng::SplitMix64 final_gen(seed);
    rng::shuffle(out, final_gen);
    return out;
}

}  // namespace adarag::labeling

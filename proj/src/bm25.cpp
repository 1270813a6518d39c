#include "adarag/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "adarag/kernels.hpp"
#include "adarag/text.hpp"

namespace adarag::bm25 {

std::vector<std::string> tokenize(std::string_view txt) {
    std::vector<std::string> tokens;
    std::string current;
    size_t pos = 0;
    while (pos < txt.size()) {
        uint32_t cp = text::decode_utf8(txt, pos);
        auto cls = text::classify_codepoint(cp);
        if (cls == text::CharClass::word || cls == text::CharClass::mark) {
            text::encode_utf8(text::to_lower(cp), current);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string preprocess_query(std::string_view question) {
    static constexpr std::string_view kRemoved = "*!.\"`#";
    std::string kept;
    kept.reserve(question.size());
    for (char ch : question) {
        if (kRemoved.find(ch) == std::string_view::npos) kept.push_back(ch);
    }
    return text::collapse_whitespace(kept);
}

InvertedIndex::InvertedIndex(InvertedIndex&& other) noexcept
    : params_(other.params_),
      doc_ids_(std::move(other.doc_ids_)),
      slot_(std::move(other.slot_)),
      doc_lengths_(std::move(other.doc_lengths_)),
      avg_doc_length_(other.avg_doc_length_),
      postings_(std::move(other.postings_)),
      search_count_(other.search_count_.load(std::memory_order_relaxed)) {}

InvertedIndex& InvertedIndex::operator=(InvertedIndex&& other) noexcept {
    params_ = other.params_;
    doc_ids_ = std::move(other.doc_ids_);
    slot_ = std::move(other.slot_);
    doc_lengths_ = std::move(other.doc_lengths_);
    avg_doc_length_ = other.avg_doc_length_;
    postings_ = std::move(other.postings_);
    search_count_.store(other.search_count_.load(std::memory_order_relaxed),
                        std::memory_order_relaxed);
    return *this;
}

uint32_t InvertedIndex::doc_length(const std::string& doc_id) const {
    auto it = slot_.find(doc_id);
    if (it == slot_.end()) throw NotFoundError("document not in index: " + doc_id);
    return doc_lengths_[it->second];
}

size_t InvertedIndex::term_doc_frequency(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.slots.size();
}

uint32_t InvertedIndex::term_frequency(const std::string& term, const std::string& doc_id) const {
    auto sit = slot_.find(doc_id);
    if (sit == slot_.end()) return 0;
    auto pit = postings_.find(term);
    if (pit == postings_.end()) return 0;
    const auto& slots = pit->second.slots;
    auto lo = std::lower_bound(slots.begin(), slots.end(), sit->second);
    if (lo == slots.end() || *lo != sit->second) return 0;
    return static_cast<uint32_t>(pit->second.tf[lo - slots.begin()]);
}

double InvertedIndex::score(const std::vector<std::string>& query_tokens,
                            const std::string& doc_id) const {
    auto sit = slot_.find(doc_id);
    if (sit == slot_.end()) throw NotFoundError("document not in index: " + doc_id);
    const uint32_t slot = sit->second;
    const double n_docs = static_cast<double>(doc_count());
    double total = 0.0;
    for (const auto& tok : query_tokens) {
        auto pit = postings_.find(tok);
        if (pit == postings_.end()) continue;
        const auto& block = pit->second;
        auto lo = std::lower_bound(block.slots.begin(), block.slots.end(), slot);
        if (lo == block.slots.end() || *lo != slot) continue;
        const size_t i = static_cast<size_t>(lo - block.slots.begin());
        const double df = static_cast<double>(block.slots.size());
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        const double num = block.tf[i] * (params_.k1 + 1.0);
        const double den = block.tf[i] + block.norm[i];
        total += idf * (num / den);
    }
    return total;
}

std::vector<RetrievalHit> InvertedIndex::search(std::string_view query, int k) const {
    if (k < 1) throw ContractError("search: k must be >= 1");
    search_count_.fetch_add(1, std::memory_order_relaxed);

    const auto tokens = tokenize(preprocess_query(query));
    std::vector<RetrievalHit> hits;
    if (tokens.empty()) return hits;

    std::vector<double> acc(doc_count(), 0.0);
    std::vector<uint8_t> touched(doc_count(), 0);
    std::vector<uint32_t> touched_slots;
    std::vector<double> buf;
    const double n_docs = static_cast<double>(doc_count());

    for (const auto& tok : tokens) {
        auto pit = postings_.find(tok);
        if (pit == postings_.end()) continue;
        const auto& block = pit->second;
        const double df = static_cast<double>(block.slots.size());
        const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
        buf.resize(block.slots.size());
        kernels::bm25_term_scores(block.tf.data(), block.norm.data(), block.slots.size(), idf,
                                  params_.k1 + 1.0, buf.data());
        for (size_t i = 0; i < block.slots.size(); ++i) {
            const uint32_t slot = block.slots[i];
            acc[slot] += buf[i];
            if (!touched[slot]) {
                touched[slot] = 1;
                touched_slots.push_back(slot);
            }
        }
    }

    hits.reserve(touched_slots.size());
    for (uint32_t slot : touched_slots) {
        if (acc[slot] > 0.0) {
            hits.push_back({doc_ids_[slot], acc[slot], 0});
        }
    }
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (hits.size() > static_cast<size_t>(k)) hits.resize(static_cast<size_t>(k));
    for (size_t i = 0; i < hits.size(); ++i) hits[i].rank = static_cast<int>(i) + 1;
    return hits;
}

void InvertedIndex::finalize() {
    uint64_t total_len = 0;
    for (uint32_t len : doc_lengths_) total_len += len;
    avg_doc_length_ =
        doc_lengths_.empty() ? 0.0 : static_cast<double>(total_len) / static_cast<double>(doc_lengths_.size());
    for (auto& [term, block] : postings_) {
        block.norm.resize(block.slots.size());
        for (size_t i = 0; i < block.slots.size(); ++i) {
            const double dl = static_cast<double>(doc_lengths_[block.slots[i]]);
            block.norm[i] = params_.k1 * (1.0 - params_.b + params_.b * dl / avg_doc_length_);
        }
    }
}

InvertedIndex build_index(const corpus::CorpusHandle& corpus, const Bm25Params& params) {
    if (corpus.doc_count() == 0) throw ContractError("build_index: corpus is empty");
    if (!(params.k1 > 0.0)) throw ContractError("build_index: k1 must be > 0");
    if (params.b < 0.0 || params.b > 1.0) throw ContractError("build_index: b must be in [0,1]");

    InvertedIndex index;
    index.params_ = params;
    index.doc_ids_.reserve(corpus.doc_count());
    index.doc_lengths_.reserve(corpus.doc_count());

    for (const auto& doc : corpus.documents()) {
        const uint32_t slot = static_cast<uint32_t>(index.doc_ids_.size());
        index.slot_.emplace(doc.id, slot);
        index.doc_ids_.push_back(doc.id);

        auto tokens = tokenize(doc.title + " " + doc.text);
        index.doc_lengths_.push_back(static_cast<uint32_t>(tokens.size()));

        std::map<std::string, uint32_t> counts;
        for (auto& t : tokens) ++counts[t];
        for (auto& [term, tf] : counts) {
            auto& block = index.postings_[term];
            block.slots.push_back(slot);
            block.tf.push_back(static_cast<double>(tf));
        }
    }
    index.finalize();
    return index;
}

// ---------------------------------------------------------------------------
// Snapshot I/O (binary, version-tagged). Postings store integral counts
// only; norms and averages are recomputed on load so results are
// identical to a freshly built index.
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'A', 'D', 'R', 'I', 'X', '0', '0', '1'};

void put_u32(std::ostream& out, uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); }
void put_u64(std::ostream& out, uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_str(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t get_u32(std::istream& in) {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
uint64_t get_u64(std::istream& in) {
    uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
double get_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
std::string get_str(std::istream& in) {
    uint32_t n = get_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    return s;
}

}  // namespace

void InvertedIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open index file for write: " + path);
    out.write(kMagic, sizeof(kMagic));
    put_f64(out, params_.k1);
    put_f64(out, params_.b);
    put_u32(out, static_cast<uint32_t>(doc_ids_.size()));
    for (size_t i = 0; i < doc_ids_.size(); ++i) {
        put_str(out, doc_ids_[i]);
        put_u32(out, doc_lengths_[i]);
    }
    put_u64(out, postings_.size());
    // std::map iteration keeps the snapshot byte-stable across runs.
    std::map<std::string, const PostingBlock*> ordered;
    for (const auto& [term, block] : postings_) ordered.emplace(term, &block);
    for (const auto& [term, block] : ordered) {
        put_str(out, term);
        put_u32(out, static_cast<uint32_t>(block->slots.size()));
        for (size_t i = 0; i < block->slots.size(); ++i) {
            put_u32(out, block->slots[i]);
            put_u32(out, static_cast<uint32_t>(block->tf[i]));
        }
    }
    if (!out) throw Error("I/O error while writing index: " + path);
}

InvertedIndex InvertedIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open index file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw Error("not an index snapshot (bad magic): " + path);
    }
    InvertedIndex index;
    index.params_.k1 = get_f64(in);
    index.params_.b = get_f64(in);
    const uint32_t n_docs = get_u32(in);
    index.doc_ids_.reserve(n_docs);
    index.doc_lengths_.reserve(n_docs);
    for (uint32_t i = 0; i < n_docs; ++i) {
        std::string id = get_str(in);
        index.slot_.emplace(id, i);
        index.doc_ids_.push_back(std::move(id));
        index.doc_lengths_.push_back(get_u32(in));
    }
    const uint64_t n_terms = get_u64(in);
    for (uint64_t t = 0; t < n_terms; ++t) {
        std::string term = get_str(in);
        const uint32_t n_postings = get_u32(in);
        PostingBlock block;
        block.slots.reserve(n_postings);
        block.tf.reserve(n_postings);
        for (uint32_t i = 0; i < n_postings; ++i) {
            block.slots.push_back(get_u32(in));
            block.tf.push_back(static_cast<double>(get_u32(in)));
        }
        index.postings_.emplace(std::move(term), std::move(block));
    }
    if (!in) throw Error("truncated index snapshot: " + path);
    index.finalize();
    return index;
}

}  // namespace adarag::bm25

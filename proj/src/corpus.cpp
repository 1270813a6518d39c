#include "adarag/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "adarag/text.hpp"

namespace adarag::corpus {

using nlohmann::json;

const Document& CorpusHandle::get_document(const std::string& doc_id) const {
    auto it = index_.find(doc_id);
    if (it == index_.end()) {
        throw NotFoundError("document not found: " + doc_id);
    }
    return docs_[it->second];
}

namespace {

// Strips a trailing '\r' so CRLF files behave like LF files.
bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

bool blank(const std::string& line) {
    return text::trim(line).empty();
}

}  // namespace

CorpusHandle ingest_corpus(std::istream& in) {
    CorpusHandle handle;
    std::string line;
    size_t line_no = 0;
    while (next_line(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        if (!text::is_valid_utf8(line)) {
            handle.rejections_.push_back({line_no, "invalid UTF-8 byte sequence"});
            continue;
        }
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object()) {
            throw IngestError("corpus line " + std::to_string(line_no) + ": malformed JSON object");
        }
        if (!row.contains("id") || !row["id"].is_string() || row["id"].get<std::string>().empty()) {
            throw IngestError("corpus line " + std::to_string(line_no) + ": missing or empty \"id\"");
        }
        if (!row.contains("text") || !row["text"].is_string()) {
            throw IngestError("corpus line " + std::to_string(line_no) + ": missing \"text\"");
        }
        Document doc;
        doc.id = row["id"].get<std::string>();
        doc.text = row["text"].get<std::string>();
        if (row.contains("title")) {
            if (!row["title"].is_string()) {
                throw IngestError("corpus line " + std::to_string(line_no) + ": \"title\" must be a string");
            }
            doc.title = row["title"].get<std::string>();
        }
        if (text::trim(doc.text).empty()) {
            throw IngestError("corpus line " + std::to_string(line_no) + ": empty \"text\"");
        }
        if (handle.index_.count(doc.id) > 0) {
            throw IngestError("duplicate document id: " + doc.id);
        }
        handle.index_.emplace(doc.id, handle.docs_.size());
        handle.docs_.push_back(std::move(doc));
    }
    if (in.bad()) throw IngestError("I/O error while reading corpus stream");
    return handle;
}

CorpusHandle ingest_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open corpus file: " + path);
    return ingest_corpus(in);
}

QAIngestResult ingest_qa_dataset(std::istream& in, const std::string& dataset_name) {
    QAIngestResult result;
    std::unordered_map<std::string, size_t> seen_ids;
    std::string line;
    size_t line_no = 0;
    size_t row_count = 0;
    while (next_line(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        ++row_count;
        if (!text::is_valid_utf8(line)) {
            result.rejections.push_back({line_no, "invalid UTF-8 byte sequence"});
            continue;
        }
        json row = json::parse(line, nullptr, false);
        if (row.is_discarded() || !row.is_object()) {
            result.rejections.push_back({line_no, "malformed JSON object"});
            continue;
        }
        QAExample ex;
        if (row.contains("question") && row["question"].is_string()) {
            ex.question = row["question"].get<std::string>();
        }
        if (text::trim(ex.question).empty()) {
            result.rejections.push_back({line_no, "missing or empty \"question\""});
            continue;
        }
        if (row.contains("answers") && row["answers"].is_array()) {
            for (const auto& a : row["answers"]) {
                if (a.is_string() && !text::trim(a.get<std::string>()).empty()) {
                    ex.answers.push_back(a.get<std::string>());
                }
            }
        }
        if (ex.answers.empty()) {
            result.rejections.push_back({line_no, "no non-empty \"answers\" entry"});
            continue;
        }
        if (row.contains("id") && row["id"].is_string() && !row["id"].get<std::string>().empty()) {
            ex.id = row["id"].get<std::string>();
        } else {
            ex.id = (dataset_name.empty() ? std::string("row") : dataset_name) + "-" +
                    std::to_string(line_no);
        }
        if (seen_ids.count(ex.id) > 0) {
            result.rejections.push_back({line_no, "duplicate question id: " + ex.id});
            continue;
        }
        if (!dataset_name.empty()) {
            ex.dataset = dataset_name;
        } else if (row.contains("dataset") && row["dataset"].is_string()) {
            ex.dataset = row["dataset"].get<std::string>();
        }
        if (row.contains("label") && !row["label"].is_null()) {
            if (!row["label"].is_string()) {
                result.rejections.push_back({line_no, "\"label\" must be a string"});
                continue;
            }
            auto label = label_from_string(row["label"].get<std::string>());
            if (!label) {
                result.rejections.push_back(
                    {line_no, "invalid label \"" + row["label"].get<std::string>() + "\""});
                continue;
            }
            ex.label = *label;
        }
        seen_ids.emplace(ex.id, line_no);
        result.examples.push_back(std::move(ex));
    }
    if (in.bad()) throw IngestError("I/O error while reading QA stream");
    if (row_count > 0 && result.examples.empty()) {
        throw IngestError("QA dataset has no valid rows (" +
                          std::to_string(result.rejections.size()) + " rejected)");
    }
    if (row_count == 0) {
        throw IngestError("QA dataset is empty");
    }
    return result;
}

QAIngestResult ingest_qa_dataset_file(const std::string& path, const std::string& dataset_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open QA dataset file: " + path);
    return ingest_qa_dataset(in, dataset_name);
}

void write_qa_dataset(std::ostream& out, const std::vector<QAExample>& examples) {
    for (const auto& ex : examples) {
        json row;
        row["id"] = ex.id;
        row["question"] = ex.question;
        row["answers"] = ex.answers;
        row["dataset"] = ex.dataset;
        if (ex.label) row["label"] = std::string(1, label_to_char(*ex.label));
        out << row.dump() << '\n';
    }
}

void write_qa_dataset_file(const std::string& path, const std::vector<QAExample>& examples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot open output file: " + path);
    write_qa_dataset(out, examples);
    if (!out) throw IngestError("I/O error while writing: " + path);
}

}  // namespace adarag::corpus

#pragma once

// Ingestion and serving of documents and QA datasets from JSON Lines
// files.
//
// Corpus line:  {"id": str, "title": str, "text": str}
// QA line:      {"id": str, "question": str, "answers": [str, ...],
//                "dataset": str, "label": "A"|"B"|"C" (optional)}
//
// Corpus ingestion is strict: a structurally malformed line or a
// duplicate id fails the file, naming the line or id. Lines that are not
// valid UTF-8 are dropped with a diagnostic instead (machine-translated
// data occasionally carries mojibake). QA ingestion is lenient: rows
// violating the QAExample invariants are dropped with per-line
// diagnostics; only an unreadable source or zero valid rows is fatal.
//
// A completed CorpusHandle is immutable and safe for unlimited
// concurrent readers.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "adarag/types.hpp"

namespace adarag::corpus {

struct Rejection {
    size_t line;         // 1-based line number in the source
    std::string reason;
};

class CorpusHandle {
public:
    size_t doc_count() const { return docs_.size(); }
    const std::vector<Document>& documents() const { return docs_; }

    /// Throws NotFoundError for an unknown id.
    const Document& get_document(const std::string& doc_id) const;

    bool contains(const std::string& doc_id) const { return index_.count(doc_id) > 0; }

    const std::vector<Rejection>& rejections() const { return rejections_; }

private:
    friend CorpusHandle ingest_corpus(std::istream&);
    std::vector<Document> docs_;
    std::unordered_map<std::string, size_t> index_;
    std::vector<Rejection> rejections_;
};

/// Reads a JSONL corpus stream. Throws IngestError on a malformed line
/// (naming the line number) or a duplicate id (naming the id).
CorpusHandle ingest_corpus(std::istream& in);
CorpusHandle ingest_corpus_file(const std::string& path);

struct QAIngestResult {
    std::vector<QAExample> examples;
    std::vector<Rejection> rejections;
};

/// Reads a JSONL QA dataset. `dataset_name`, when non-empty, tags every
/// returned example (overriding any per-row dataset field). Rows missing
/// a question or answers are rejected with a per-line diagnostic. Throws
/// IngestError when no valid rows remain.
QAIngestResult ingest_qa_dataset(std::istream& in, const std::string& dataset_name);
QAIngestResult ingest_qa_dataset_file(const std::string& path, const std::string& dataset_name);

/// Writes examples back out in the QA JSONL format (label included when
/// set). Inverse of ingest_qa_dataset for valid rows.
void write_qa_dataset(std::ostream& out, const std::vector<QAExample>& examples);
void write_qa_dataset_file(const std::string& path, const std::vector<QAExample>& examples);

}  // namespace adarag::corpus

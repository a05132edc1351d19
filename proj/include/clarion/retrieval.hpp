#pragma once

#include "clarion/corpus.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace clarion {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

using TermId = std::uint32_t;

/// Inverted index over one domain's collection with BM25 statistics.
/// Immutable after construction.
class Index {
public:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    Index(const std::vector<Document>& documents, Bm25Params params = {});

    std::size_t size() const { return doc_ids_.size(); }
    double avgdl() const { return avgdl_; }
    const Bm25Params& params() const { return params_; }

    const std::string& doc_id(std::size_t doc) const { return doc_ids_[doc]; }
    std::size_t doc_length(std::size_t doc) const { return doc_len_[doc]; }
    /// Position of doc_id in the collection, or -1.
    std::ptrdiff_t position_of(const std::string& doc_id) const;

    std::size_t df(const std::string& term) const;
    double idf(TermId term) const { return idf_[term]; }
    std::ptrdiff_t term_id(const std::string& term) const;
    const std::string& term(TermId id) const { return terms_[id]; }
    const std::vector<Posting>& postings(TermId id) const { return postings_[id]; }

    /// Sorted distinct term ids with frequencies of one document.
    const std::vector<Posting>& doc_terms(std::size_t doc) const { return doc_terms_[doc]; }

    /// Distinct known query terms in first-occurrence order.
    std::vector<TermId> query_terms(const std::string& query_text) const;

    /// BM25 contribution of one term occurring tf times in `doc`.
    double term_score(TermId term, std::uint32_t tf, std::size_t doc) const;

private:
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::size_t> doc_len_;
    double avgdl_ = 0.0;
    std::unordered_map<std::string, std::size_t> doc_pos_;
    std::unordered_map<std::string, TermId> term_ids_;
    std::vector<std::string> terms_;
    std::vector<std::vector<Posting>> postings_;  // per term, doc-ascending; here Posting::doc is the doc index
    std::vector<std::vector<Posting>> doc_terms_;  // per doc, term-ascending; here Posting::doc is the term id
    std::vector<double> idf_;
};

Index build_index(const std::vector<Document>& documents, Bm25Params params = {});

struct ScoredDoc {
    std::string doc_id;
    std::size_t doc = 0;  // position in the index
    double score = 0.0;
};

struct RetrievalResult {
    std::vector<ScoredDoc> ranked;  // score descending, doc_id ascending on ties
    std::string query_text;
    int turn = 0;
    bool degenerate = false;  // query had no tokens; ranking is pure doc_id order
};

/// Scores every document against the query. Term-at-a-time over postings;
/// kept as the reference for the parallel kernel.
std::vector<double> score_all_serial(const Index& index, const std::string& query_text);
/// Same scores computed by OpenMP threads that each own a slice of the
/// collection. Bit-identical to score_all_serial.
std::vector<double> score_all(const Index& index, const std::string& query_text);

RetrievalResult retrieve(const Index& index, const std::string& query_text, std::size_t k_ret, int turn = 0);

/// 1-based rank of doc_id in the full ranking, same order as retrieve.
std::size_t full_rank_of(const Index& index, const std::string& query_text, const std::string& doc_id);

}  // namespace clarion

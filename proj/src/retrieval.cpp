#include "clarion/retrieval.hpp"

#include "clarion/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include <omp.h>

namespace clarion {

Index::Index(const std::vector<Document>& documents, Bm25Params params) : params_(params) {
    if (documents.empty()) throw DataError("cannot index an empty collection");
    doc_ids_.reserve(documents.size());
    std::size_t total_len = 0;
    for (std::size_t d = 0; d < documents.size(); ++d) {
        const auto& doc = documents[d];
        if (!doc_pos_.emplace(doc.doc_id, d).second) throw DataError("duplicate doc_id \"" + doc.doc_id + "\"");
        doc_ids_.push_back(doc.doc_id);
        const auto& toks = doc.tokens.empty() && !doc.text.empty() ? tokenize(doc.text) : doc.tokens;
        doc_len_.push_back(toks.size());
        total_len += toks.size();

        std::map<TermId, std::uint32_t> counts;
        for (const auto& t : toks) {
            auto [it, fresh] = term_ids_.emplace(t, static_cast<TermId>(terms_.size()));
            if (fresh) {
                terms_.push_back(t);
                postings_.emplace_back();
            }
            ++counts[it->second];
        }
        auto& dt = doc_terms_.emplace_back();
        for (auto [term, tf] : counts) {
            dt.push_back({term, tf});
            postings_[term].push_back({static_cast<std::uint32_t>(d), tf});
        }
    }
    avgdl_ = static_cast<double>(total_len) / static_cast<double>(documents.size());
    const double n = static_cast<double>(documents.size());
    idf_.reserve(terms_.size());
    for (const auto& plist : postings_) {
        const double df = static_cast<double>(plist.size());
        idf_.push_back(std::log(1.0 + (n - df + 0.5) / (df + 0.5)));
    }
}

Index build_index(const std::vector<Document>& documents, Bm25Params params) { return Index(documents, params); }

std::ptrdiff_t Index::position_of(const std::string& doc_id) const {
    auto it = doc_pos_.find(doc_id);
    return it == doc_pos_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::ptrdiff_t Index::term_id(const std::string& term) const {
    auto it = term_ids_.find(term);
    return it == term_ids_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::size_t Index::df(const std::string& term) const {
    auto id = term_id(term);
    return id < 0 ? 0 : postings_[static_cast<std::size_t>(id)].size();
}

std::vector<TermId> Index::query_terms(const std::string& query_text) const {
    std::vector<TermId> out;
    std::unordered_set<TermId> seen;
    for (const auto& t : tokenize(query_text)) {
        auto id = term_id(t);
        if (id >= 0 && seen.insert(static_cast<TermId>(id)).second) out.push_back(static_cast<TermId>(id));
    }
    return out;
}

double Index::term_score(TermId term, std::uint32_t tf, std::size_t doc) const {
    const double f = tf;
    const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_len_[doc]) / avgdl_;
    return idf_[term] * (f * (params_.k1 + 1.0)) / (f + params_.k1 * norm);
}

std::vector<double> score_all_serial(const Index& index, const std::string& query_text) {
    std::vector<double> scores(index.size(), 0.0);
    for (TermId term : index.query_terms(query_text))
        for (const auto& p : index.postings(term)) scores[p.doc] += index.term_score(term, p.tf, p.doc);
    return scores;
}

std::vector<double> score_all(const Index& index, const std::string& query_text) {
    const auto terms = index.query_terms(query_text);
    const std::size_t n = index.size();
    std::vector<double> scores(n, 0.0);
    // Each thread owns a contiguous slice of documents and walks every
    // posting list inside that slice, in query-term order.
#pragma omp parallel if (n >= 4096)
    {
        const std::size_t threads = static_cast<std::size_t>(omp_get_num_threads());
        const std::size_t tid = static_cast<std::size_t>(omp_get_thread_num());
        const auto lo = static_cast<std::uint32_t>(n * tid / threads);
        const auto hi = static_cast<std::uint32_t>(n * (tid + 1) / threads);
        for (TermId term : terms) {
            const auto& postings = index.postings(term);
            auto it = std::lower_bound(postings.begin(), postings.end(), lo,
                                       [](const Index::Posting& p, std::uint32_t d) { return p.doc < d; });
            for (; it != postings.end() && it->doc < hi; ++it) scores[it->doc] += index.term_score(term, it->tf, it->doc);
        }
    }
    return scores;
}

namespace {

struct RankOrder {
    const Index& index;
    const std::vector<double>& scores;
    bool operator()(std::size_t a, std::size_t b) const {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return index.doc_id(a) < index.doc_id(b);
    }
};

}  // namespace

RetrievalResult retrieve(const Index& index, const std::string& query_text, std::size_t k_ret, int turn) {
    if (k_ret == 0) throw std::invalid_argument("retrieve: k_ret must be >= 1");
    const auto scores = score_all(index, query_text);
    std::vector<std::size_t> order(index.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t k = std::min(k_ret, order.size());
    RankOrder cmp{index, scores};
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), cmp);

    RetrievalResult r;
    r.query_text = query_text;
    r.turn = turn;
    r.degenerate = tokenize(query_text).empty();
    r.ranked.reserve(k);
    for (std::size_t i = 0; i < k; ++i) r.ranked.push_back({index.doc_id(order[i]), order[i], scores[order[i]]});
    return r;
}

std::size_t full_rank_of(const Index& index, const std::string& query_text, const std::string& doc_id) {
    const auto pos = index.position_of(doc_id);
    if (pos < 0) throw DataError("full_rank_of: unknown doc_id \"" + doc_id + "\"");
    const auto scores = score_all(index, query_text);
    RankOrder cmp{index, scores};
    std::size_t rank = 1;
    for (std::size_t d = 0; d < index.size(); ++d)
        if (cmp(d, static_cast<std::size_t>(pos))) ++rank;
    return rank;
}

}  // namespace clarion

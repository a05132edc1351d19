#include "clarion/encoder.hpp"

#include "clarion/rng.hpp"
#include "clarion/text.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clarion {

namespace {

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

void l2_normalize(std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (sq == 0.0) return;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& x : v) x *= inv;
}

HashingEncoder::HashingEncoder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim == 0) throw std::invalid_argument("encoder dimension must be positive");
}

Embedding HashingEncoder::encode(std::string_view text) const {
    Embedding v(dim_, 0.0);
    for (const auto& tok : tokenize(text)) {
        const std::uint64_t h = derive_seed(fnv1a(tok), seed_);
        const std::size_t bucket = static_cast<std::size_t>(h % dim_);
        v[bucket] += (h >> 63) ? -1.0 : 1.0;
    }
    l2_normalize(v);
    return v;
}

Embedding encode_text(const TextEncoder& encoder, std::string_view text) { return encoder.encode(text); }

std::vector<double> State::concatenated() const {
    std::vector<double> out;
    out.reserve(dim());
    out.insert(out.end(), history_emb.begin(), history_emb.end());
    out.insert(out.end(), docs_emb.begin(), docs_emb.end());
    out.insert(out.end(), scores.begin(), scores.end());
    return out;
}

State build_state(const TextEncoder& encoder, const ConversationHistory& history, const RetrievalResult& retrieval,
                  const std::vector<Document>& documents, int k) {
    if (k <= 0) throw std::invalid_argument("build_state: k must be positive");
    const auto width = static_cast<std::size_t>(k);
    State s;
    s.history_emb = encoder.encode(history.full_text());

    const std::size_t top = std::min(width, retrieval.ranked.size());
    s.docs_emb.assign(encoder.dim(), 0.0);
    for (std::size_t i = 0; i < top; ++i) {
        const auto e = encoder.encode(documents.at(retrieval.ranked[i].doc).text);
        for (std::size_t j = 0; j < e.size(); ++j) s.docs_emb[j] += e[j];
    }
    if (top > 0) {
        for (double& x : s.docs_emb) x /= static_cast<double>(top);
        l2_normalize(s.docs_emb);
    }

    s.scores.assign(width, 0.0);
    if (top > 0) {
        double hi = retrieval.ranked[0].score;
        double lo = hi;
        for (std::size_t i = 0; i < top; ++i) {
            hi = std::max(hi, retrieval.ranked[i].score);
            lo = std::min(lo, retrieval.ranked[i].score);
        }
        for (std::size_t i = 0; i < top; ++i)
            s.scores[i] = hi == lo ? 1.0 : (retrieval.ranked[i].score - lo) / (hi - lo);
    }
    return s;
}

}  // namespace clarion

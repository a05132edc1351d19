#pragma once

#include "clarion/history.hpp"
#include "clarion/retrieval.hpp"

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

namespace clarion {

using Embedding = std::vector<double>;

/// Fixed (never trained) text featurizer.
class TextEncoder {
public:
    virtual ~TextEncoder() = default;
    virtual std::size_t dim() const = 0;
    /// Unit-norm embedding, or the zero vector when the text has no tokens.
    virtual Embedding encode(std::string_view text) const = 0;
};

/// Signed feature hashing: each token adds +-1 to one of `dim` buckets,
/// then the vector is L2-normalized.
class HashingEncoder final : public TextEncoder {
public:
    explicit HashingEncoder(std::size_t dim = 64, std::uint64_t seed = 0x5eedULL);
    std::size_t dim() const override { return dim_; }
    Embedding encode(std::string_view text) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

Embedding encode_text(const TextEncoder& encoder, std::string_view text);

/// Planner input: history embedding, retrieved-docs embedding and the
/// normalized top-k retrieval scores.
struct State {
    Embedding history_emb;
    Embedding docs_emb;
    std::vector<double> scores;

    std::size_t dim() const { return history_emb.size() + docs_emb.size() + scores.size(); }
    /// history_emb ++ docs_emb ++ scores.
    std::vector<double> concatenated() const;
};

State build_state(const TextEncoder& encoder, const ConversationHistory& history, const RetrievalResult& retrieval,
                  const std::vector<Document>& documents, int k);

void l2_normalize(std::vector<double>& v);

}  // namespace clarion

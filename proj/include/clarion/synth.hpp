#pragma once

#include "clarion/corpus.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace clarion {

enum class Helpfulness { AskHelps, AskHurts, Mixed };

const char* helpfulness_name(Helpfulness h);
std::optional<Helpfulness> parse_helpfulness(std::string_view name);

struct SynthProfile {
    std::string name = "synthetic";
    std::uint64_t vocabulary_seed = 0;
    std::size_t n_docs = 300;
    std::size_t n_cases = 200;
    std::size_t facet_count = 2;
    Helpfulness helpfulness = Helpfulness::AskHelps;
};

/// Smallest initial rank given to an ask-helps target. Targets start below
/// the presented top-5, so answering straight away always fails.
inline constexpr std::size_t kAmbiguousMinRank = 6;

/// Generates a synthetic domain with a 6:1:1 split.
///
/// Documents are grouped into topics. Every document has the same length and
/// holds its topic's two words, a few words found in no other document, and
/// filler. An ask-helps case queries only the topic words, which tie the
/// whole topic group, and its facets are the target's exclusive words, so one
/// answered question lifts the target to rank 1. An ask-hurts case adds two
/// exclusive words to the query, which already ranks the target first, and
/// has no facets. Mixed draws each case's kind with a fair coin.
///
/// The vocabulary block is keyed by (name, vocabulary_seed); distinct keys
/// give disjoint vocabularies.
DomainDataset synth_domain(const SynthProfile& profile, std::uint64_t seed);

}  // namespace clarion

#include "clarion/retrieval.hpp"
#include "clarion/synth.hpp"

#include <doctest.h>

#include <set>

using namespace clarion;

namespace {

SynthProfile profile(Helpfulness h, std::string name = "") {
    SynthProfile p;
    p.name = name.empty() ? helpfulness_name(h) : name;
    p.helpfulness = h;
    return p;
}

}  // namespace

TEST_CASE("synthesis is deterministic") {
    auto a = synth_domain(profile(Helpfulness::AskHelps), 3);
    auto b = synth_domain(profile(Helpfulness::AskHelps), 3);
    CHECK(serialize_domain(a) == serialize_domain(b));
    CHECK(serialize_domain(a) != serialize_domain(synth_domain(profile(Helpfulness::AskHelps), 4)));
    CHECK(a.documents().size() == 300);
    CHECK(a.cases().size() == 200);
    CHECK(a.splits().train.size() == 150);
    CHECK(a.splits().valid.size() == 25);
    CHECK(a.splits().test.size() == 25);
}

TEST_CASE("ask-hurts targets rank first at reset") {
    for (std::uint64_t seed : {1, 7, 99}) {
        auto d = synth_domain(profile(Helpfulness::AskHurts), seed);
        auto idx = build_index(d.documents());
        for (const auto& c : d.cases()) {
            CHECK(c.facets.empty());
            CHECK(full_rank_of(idx, c.initial_query, c.target_doc_id) == 1);
        }
    }
}

TEST_CASE("ask-helps facets strictly improve the target's rank") {
    for (std::uint64_t seed : {1, 7, 99}) {
        auto d = synth_domain(profile(Helpfulness::AskHelps), seed);
        auto idx = build_index(d.documents());
        for (const auto& c : d.cases()) {
            REQUIRE_FALSE(c.facets.empty());
            const auto before = full_rank_of(idx, c.initial_query, c.target_doc_id);
            CHECK(before >= kAmbiguousMinRank);
            std::string q = c.initial_query;
            for (const auto& f : c.facets)
                for (const auto& tok : f) {
                    q += " " + tok;
                    const auto now = full_rank_of(idx, q, c.target_doc_id);
                    CHECK(now < before);
                }
            // facet tokens are not in the query already
            for (const auto& f : c.facets)
                for (const auto& tok : f) CHECK(c.initial_query.find(tok) == std::string::npos);
        }
    }
}

TEST_CASE("mixed domains contain both kinds") {
    auto d = synth_domain(profile(Helpfulness::Mixed), 5);
    std::size_t ambiguous = 0;
    for (const auto& c : d.cases()) ambiguous += c.ambiguous;
    CHECK(ambiguous > 50);
    CHECK(ambiguous < 150);
}

TEST_CASE("different names give disjoint vocabularies") {
    auto a = synth_domain(profile(Helpfulness::Mixed, "alpha"), 1);
    auto b = synth_domain(profile(Helpfulness::Mixed, "beta"), 1);
    std::set<std::string> va;
    for (const auto& d : a.documents()) va.insert(d.tokens.begin(), d.tokens.end());
    for (const auto& d : b.documents())
        for (const auto& t : d.tokens) CHECK(va.count(t) == 0);
}

TEST_CASE("invalid profiles") {
    auto p = profile(Helpfulness::AskHelps);
    p.n_docs = 9;
    CHECK_THROWS(synth_domain(p, 1));
    p = profile(Helpfulness::AskHelps);
    p.n_cases = 5;
    CHECK_THROWS(synth_domain(p, 1));
    p = profile(Helpfulness::AskHelps);
    p.facet_count = 0;
    CHECK_THROWS(synth_domain(p, 1));
    CHECK(parse_helpfulness("ask-hurts") == Helpfulness::AskHurts);
    CHECK_FALSE(parse_helpfulness("hurts").has_value());
}

#include "clarion/encoder.hpp"
#include "clarion/rng.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace clarion;

namespace {

double norm(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

}  // namespace

TEST_CASE("empty text encodes to the zero vector") {
    HashingEncoder enc;
    auto e = enc.encode("");
    CHECK(e.size() == 64);
    CHECK(norm(e) == 0.0);
    CHECK(norm(enc.encode("  ;; ")) == 0.0);
}

TEST_CASE("nonempty text is unit norm and deterministic") {
    HashingEncoder enc;
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        std::string s;
        for (int w = 0; w < 1 + static_cast<int>(rng.uniform_index(12)); ++w) s += "w" + std::to_string(rng.uniform_index(500)) + " ";
        auto e = encode_text(enc, s);
        CHECK(std::abs(norm(e) - 1.0) < 1e-9);
        CHECK(e == enc.encode(s));
    }
    CHECK(HashingEncoder(16).encode("x").size() == 16);
    CHECK(HashingEncoder(64, 1).encode("red fish") != HashingEncoder(64, 2).encode("red fish"));
}

TEST_CASE("state scores are min-max normalized and padded") {
    HashingEncoder enc(8);
    ConversationHistory h("red");
    auto docs = testing::fish_domain().documents();

    RetrievalResult single;
    single.ranked = {{"d1", 0, 3.5}};
    auto s = build_state(enc, h, single, docs, 5);
    CHECK(s.scores == std::vector<double>{1.0, 0, 0, 0, 0});

    RetrievalResult two;
    two.ranked = {{"d1", 0, 4.0}, {"d2", 1, 2.0}};
    CHECK(build_state(enc, h, two, docs, 3).scores == std::vector<double>{1.0, 0.0, 0.0});

    RetrievalResult three;
    three.ranked = {{"d1", 0, 4.0}, {"d2", 1, 3.0}, {"d1", 0, 2.0}};
    CHECK(build_state(enc, h, three, docs, 3).scores == std::vector<double>{1.0, 0.5, 0.0});

    RetrievalResult tied;
    tied.ranked = {{"d1", 0, 0.0}, {"d2", 1, 0.0}};
    CHECK(build_state(enc, h, tied, docs, 3).scores == std::vector<double>{1.0, 1.0, 0.0});

    CHECK_THROWS(build_state(enc, h, two, docs, 0));
}

TEST_CASE("empty retrieval gives zero docs embedding and scores") {
    HashingEncoder enc(8);
    ConversationHistory h("red");
    auto s = build_state(enc, h, RetrievalResult{}, {}, 5);
    CHECK(norm(s.docs_emb) == 0.0);
    CHECK(s.scores == std::vector<double>(5, 0.0));
    CHECK(std::abs(norm(s.history_emb) - 1.0) < 1e-9);
}

TEST_CASE("concatenation order and docs embedding") {
    HashingEncoder enc(8);
    ConversationHistory h("red");
    h.exchange("which colour?", "fish");
    auto docs = testing::fish_domain().documents();
    auto idx = build_index(docs);
    auto r = retrieve(idx, query_from_history(h), 50);
    auto s = build_state(enc, h, r, docs, 5);
    CHECK(s.history_emb == enc.encode(h.full_text()));

    std::vector<double> mean(8, 0.0);
    for (const auto& d : docs) {
        auto e = enc.encode(d.text);
        for (int i = 0; i < 8; ++i) mean[i] += e[i] / 2.0;
    }
    l2_normalize(mean);
    for (int i = 0; i < 8; ++i) CHECK(s.docs_emb[i] == doctest::Approx(mean[i]).epsilon(1e-12));

    auto v = s.concatenated();
    REQUIRE(v.size() == s.dim());
    CHECK(v.size() == 21);
    CHECK(std::equal(s.history_emb.begin(), s.history_emb.end(), v.begin()));
    CHECK(std::equal(s.docs_emb.begin(), s.docs_emb.end(), v.begin() + 8));
    CHECK(std::equal(s.scores.begin(), s.scores.end(), v.begin() + 16));
}

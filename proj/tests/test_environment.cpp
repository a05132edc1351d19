#include "clarion/environment.hpp"
#include "clarion/policy.hpp"
#include "clarion/synth.hpp"
#include "clarion/text.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace clarion;

namespace {

struct Fixture {
    DomainDataset domain;
    Index index;
    HashingEncoder encoder{16};
    ScriptedQuestionGenerator questions;
    ScriptedUserSimulator user;
    EnvConfig config;

    explicit Fixture(Helpfulness h, EnvConfig cfg = {}) : domain(make(h)), index(domain.documents()), config(cfg) {}

    static DomainDataset make(Helpfulness h) {
        SynthProfile p;
        p.name = helpfulness_name(h);
        p.n_docs = 100;
        p.n_cases = 24;
        p.helpfulness = h;
        return synth_domain(p, 3);
    }
    Environment env() const { return {domain, index, encoder, questions, user, config}; }
};

}  // namespace

TEST_CASE("scripted question picks the most even split") {
    auto d = testing::fish_domain();
    auto idx = build_index(d.documents());
    CHECK(scripted_question(retrieve(idx, "fish", 10), idx) == "Are you interested in something related to blue?");
    CHECK(scripted_question(RetrievalResult{}, idx) == kGenericQuestion);

    auto same = build_index({Document::make("a", "x y"), Document::make("b", "y x")});
    CHECK(scripted_question(retrieve(same, "x", 10), same) == kGenericQuestion);
}

TEST_CASE("scripted user reveals facets in order") {
    SearchCase c;
    c.facets = {{"gaming", "laptop"}, {"cheap"}};
    auto r = scripted_user_reply(c, "q", 0);
    CHECK(r.text == "gaming laptop");
    CHECK(r.revealed_count == 1);
    r = scripted_user_reply(c, "q", 1);
    CHECK(r.text == "cheap");
    r = scripted_user_reply(c, "q", 2);
    CHECK(r.text == kNothingToAdd);
    CHECK(r.revealed_count == 2);
    CHECK(scripted_user_reply(SearchCase{}, "q", 0).text == kNothingToAdd);
}

TEST_CASE("ask then answer succeeds at turn two on ask-helps") {
    Fixture f(Helpfulness::AskHelps);
    auto env = f.env();
    const auto& c = f.domain.cases()[0];
    Episode ep(env, c);
    CHECK(ep.turn() == 1);
    CHECK(ep.target_rank() >= kAmbiguousMinRank);
    CHECK(ep.state_vector().size() == 2 * 16 + 5);

    auto t1 = ep.step(Action::Ask, 0.7);
    CHECK(t1.reward == 0.0);
    CHECK_FALSE(t1.terminal);
    CHECK(t1.next_state == ep.state_vector());
    CHECK(ep.history().turns().size() == 3);
    CHECK(ep.history().turns()[2].text == join(c.facets[0], " "));
    CHECK(ep.target_rank() == 1);

    auto t2 = ep.step(Action::Answer);
    CHECK(t2.reward == 1.0);
    CHECK(t2.terminal);
    CHECK(t2.next_state.empty());
    const auto& log = ep.log();
    CHECK(log.outcome == Outcome::Success);
    CHECK(log.success_turn == 2);
    CHECK(log.records[0].gain == static_cast<long long>(log.initial_rank) - 1);
    CHECK(log.records[0].ask_value == 0.7);
    CHECK_FALSE(log.records[1].gain.has_value());
    CHECK_THROWS_AS(ep.step(Action::Answer), EpisodeError);
}

TEST_CASE("failed answer continues with a rejection") {
    Fixture f(Helpfulness::AskHelps);
    auto env = f.env();
    Episode ep(env, f.domain.cases()[1]);
    auto t = ep.step(Action::Answer);
    CHECK(t.reward == 0.0);
    CHECK_FALSE(t.terminal);
    CHECK(ep.history().turns().size() == 3);
    CHECK(ep.history().turns()[2].text == kRejection);
    CHECK(ep.log().records[0].presented.size() == 5);
    CHECK(query_from_history(ep.history()).find("presented") == std::string::npos);
}

TEST_CASE("exceeding the turn limit is punished") {
    EnvConfig cfg;
    cfg.max_turns = 3;
    Fixture f(Helpfulness::AskHurts, cfg);
    auto env = f.env();
    Episode ep(env, f.domain.cases()[0]);
    CHECK(ep.step(Action::Ask).reward == 0.0);
    CHECK(ep.step(Action::Ask).reward == 0.0);
    auto last = ep.step(Action::Ask);
    CHECK(last.reward == -0.5);
    CHECK(last.terminal);
    CHECK(ep.log().outcome == Outcome::MaxTurns);
    CHECK(ep.log().turns() == 3);
    CHECK(ep.log().total_reward() == -0.5);
}

TEST_CASE("ask-hurts answers succeed immediately") {
    Fixture f(Helpfulness::AskHurts);
    auto env = f.env();
    for (const auto& c : f.domain.cases()) {
        Episode ep(env, c);
        CHECK(ep.target_rank() == 1);
        CHECK(ep.step(Action::Answer).reward == 1.0);
        CHECK(ep.log().success_turn == 1);
    }
}

TEST_CASE("episode invariants under mixed random play") {
    Fixture f(Helpfulness::Mixed);
    auto env = f.env();
    Rng rng(12);
    for (const auto& c : f.domain.cases()) {
        Episode ep(env, c);
        while (!ep.terminal()) ep.step(rng.bernoulli(0.6) ? Action::Ask : Action::Answer);
        const auto& log = ep.log();
        CHECK(log.turns() <= 10);
        const auto& h = ep.history().turns();
        for (std::size_t i = 0; i < h.size(); ++i) CHECK((h[i].speaker == Speaker::User) == (i % 2 == 0));
        if (log.outcome == Outcome::Success) {
            CHECK(log.total_reward() == 1.0);
            CHECK(log.records.back().action == Action::Answer);
            const auto& p = log.records.back().presented;
            CHECK(std::find(p.begin(), p.end(), c.target_doc_id) != p.end());
        } else {
            CHECK(log.total_reward() == -0.5);
            CHECK(log.turns() == 10);
        }
        for (std::size_t i = 1; i < log.records.size(); ++i)
            CHECK(log.records[i].rank_before == log.records[i - 1].rank_after);
    }
}

TEST_CASE("episodes reject targets outside the domain") {
    Fixture f(Helpfulness::AskHurts);
    auto env = f.env();
    SearchCase c = f.domain.cases()[0];
    c.target_doc_id = "missing";
    CHECK_THROWS_AS(Episode(env, c), EpisodeError);
}

TEST_CASE("baselines and parallel evaluation") {
    Fixture f(Helpfulness::Mixed);
    auto env = f.env();
    auto cases = f.domain.cases();
    for (std::string name : {"always-ask", "never-ask", "ask-first-n"}) {
        auto policy = make_baseline(name, 2);
        auto par = evaluate(env, cases, *policy);
        auto ser = evaluate_serial(env, cases, *policy);
        REQUIRE(par.size() == ser.size());
        for (std::size_t i = 0; i < par.size(); ++i) {
            CHECK(par[i].user_id == ser[i].user_id);
            CHECK(par[i].turns() == ser[i].turns());
            CHECK(par[i].success_turn == ser[i].success_turn);
        }
    }
    auto always = evaluate(env, cases, AlwaysAskPolicy{});
    for (const auto& log : always) CHECK(log.outcome == Outcome::MaxTurns);
    auto first2 = evaluate(env, cases, AskFirstNPolicy{2});
    for (const auto& log : first2) {
        CHECK(log.records[0].action == Action::Ask);
        CHECK(log.records[1].action == Action::Ask);
        CHECK(log.records[2].action == Action::Answer);
    }
    CHECK_THROWS(make_baseline("sometimes-ask"));
    CHECK(make_baseline("ask-first-n", 3)->name() == "ask-first-3");
}

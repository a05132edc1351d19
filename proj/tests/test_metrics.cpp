#include "clarion/metrics.hpp"
#include "clarion/rng.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace clarion;

namespace {

EpisodeLog success_at(int turn, int max_turns = 10) {
    EpisodeLog log;
    log.initial_rank = 3;
    for (int t = 1; t <= turn; ++t) {
        TurnRecord r;
        r.turn = t;
        r.action = t == turn ? Action::Answer : Action::Ask;
        r.rank_before = r.rank_after = 3;
        log.records.push_back(r);
    }
    log.outcome = Outcome::Success;
    log.success_turn = turn;
    (void)max_turns;
    return log;
}

EpisodeLog failure(int max_turns = 10) {
    EpisodeLog log = success_at(max_turns);
    log.outcome = Outcome::MaxTurns;
    log.success_turn.reset();
    return log;
}

EpisodeLog ask_once(std::size_t before, std::size_t after, int turn = 1) {
    EpisodeLog log;
    for (int t = 1; t < turn; ++t) {
        TurnRecord r;
        r.turn = t;
        r.action = Action::Answer;
        r.rank_before = r.rank_after = before;
        log.records.push_back(r);
    }
    TurnRecord r;
    r.turn = turn;
    r.action = Action::Ask;
    r.rank_before = before;
    r.rank_after = after;
    r.gain = static_cast<long long>(before) - static_cast<long long>(after);
    log.records.push_back(r);
    return log;
}

}  // namespace

TEST_CASE("success rate") {
    std::vector<EpisodeLog> logs{success_at(2), success_at(4), success_at(7)};
    CHECK(sr_at_k(logs, 5) == doctest::Approx(2.0 / 3.0));
    CHECK(sr_at_k(logs, 10) == 1.0);
    CHECK(sr_at_k(logs, 1) == 0.0);
    for (int k = 1; k < 10; ++k) CHECK(sr_at_k(logs, k) <= sr_at_k(logs, k + 1));
    CHECK_THROWS(sr_at_k(std::vector<EpisodeLog>{}, 5));
}

TEST_CASE("average turns") {
    std::vector<EpisodeLog> ones{success_at(1), success_at(1)};
    CHECK(avg_turns(ones, 10) == 1.0);
    std::vector<EpisodeLog> mixed{success_at(2), failure()};
    CHECK(avg_turns(mixed, 10) == 6.0);
}

TEST_CASE("recall at 5 uses the first-turn rank") {
    std::vector<EpisodeLog> logs(3);
    logs[0].initial_rank = 1;
    logs[1].initial_rank = 6;
    logs[2].initial_rank = 3;
    CHECK(recall_at_k(logs, 5) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("ask trajectory counts active episodes") {
    std::vector<EpisodeLog> logs{success_at(2), success_at(1)};
    auto tr = ask_trajectory(logs, 10);
    CHECK(tr.ask_prob == std::vector<double>{0.5, 0.0});
    CHECK(tr.counts == std::vector<std::size_t>{2, 1});

    std::vector<EpisodeLog> answers{success_at(1), success_at(1)};
    CHECK(ask_trajectory(answers, 10).ask_prob == std::vector<double>{0.0});

    std::vector<EpisodeLog> asks{failure(), failure()};
    for (auto& l : asks)
        for (auto& r : l.records) r.action = Action::Ask;
    auto all = ask_trajectory(asks, 10);
    CHECK(all.ask_prob == std::vector<double>(10, 1.0));
}

TEST_CASE("dtw hand cases") {
    std::vector<double> x{0.2, 0.7, 0.1};
    CHECK(dtw(x, x) == 0.0);
    CHECK(dtw(std::vector<double>{1}, std::vector<double>{0}) == 1.0);
    CHECK(dtw(std::vector<double>{0, 1}, std::vector<double>{1}) == 1.0);
    CHECK(dtw(std::vector<double>{0, 0.5, 1}, std::vector<double>{1, 0}) == 2.5);
    CHECK(dtw(std::vector<double>{1, 1, 0}, std::vector<double>{1, 0, 0, 0}) == 0.0);
    CHECK_THROWS(dtw(std::vector<double>{}, x));
}

TEST_CASE("dtw matches exhaustive alignment") {
    Rng rng(77);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> a(1 + rng.uniform_index(5)), b(1 + rng.uniform_index(5));
        for (auto& v : a) v = 0.5 * static_cast<double>(rng.uniform_index(3));
        for (auto& v : b) v = rng.uniform01();
        CHECK(dtw(a, b) == doctest::Approx(testing::dtw_brute(a, b)).epsilon(1e-12));
        CHECK(dtw(a, b) == doctest::Approx(dtw(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("diversity") {
    StrategyTrajectory t{{1, 0.5, 0}, {4, 4, 4}};
    std::vector<StrategyTrajectory> same(4, t);
    CHECK(strategy_diversity(same) == 0.0);
    CHECK(dtw_to_reference(t, t) == 0.0);

    std::vector<StrategyTrajectory> ts{{{1, 1}, {}}, {{0, 0}, {}}, {{0.5, 0.5}, {}}};
    // pairs: 2, 1, 1
    CHECK(strategy_diversity(ts) == doctest::Approx(4.0 / 3.0));
    for (auto& s : ts)
        for (auto& v : s.ask_prob) v *= 0.5;
    CHECK(strategy_diversity(ts) == doctest::Approx(2.0 / 3.0));
    CHECK_THROWS(strategy_diversity(std::vector<StrategyTrajectory>{t}));
}

TEST_CASE("asking benefit") {
    CHECK(asking_benefit(ask_once(7, 2))[0].gain == 5);
    CHECK(asking_benefit(ask_once(4, 4))[0].gain == 0);
    CHECK(asking_benefit(ask_once(3, 9))[0].gain == -6);
    CHECK(asking_benefit(ask_once(3, 9, 3))[0].turn == 3);
    CHECK(asking_benefit(success_at(1)).empty());

    std::vector<EpisodeLog> one{ask_once(7, 2)};
    auto g = mean_gain_per_turn(one, 10);
    CHECK(g.size() == 10);
    CHECK(g[0] == 5.0);
    for (std::size_t t = 1; t < 10; ++t) CHECK_FALSE(g[t].has_value());

    std::vector<EpisodeLog> never{success_at(1), success_at(1)};
    for (auto& v : mean_gain_per_turn(never, 10)) CHECK_FALSE(v.has_value());

    std::vector<EpisodeLog> two{ask_once(7, 2), ask_once(3, 9)};
    CHECK(mean_gain_per_turn(two, 10)[0] == -0.5);
}

TEST_CASE("pearson") {
    CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) == doctest::Approx(1.0));
    CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(pearson(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}) == doctest::Approx(0.8));
    CHECK_THROWS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}));
    CHECK_THROWS(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2, 3}));
}

TEST_CASE("report") {
    std::vector<EpisodeLog> logs{success_at(2), failure()};
    auto r = build_report(logs, 10);
    CHECK(r.episodes == 2);
    CHECK(r.avg_turns == 6.0);
    CHECK(r.sr_at.at(5) == 0.5);
    CHECK(r.sr_at.size() == 10);
    CHECK(r.trajectory.ask_prob.size() == 10);
    CHECK(r.gain_per_turn[0] == 0.0);
}

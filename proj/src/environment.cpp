#include "clarion/environment.hpp"

#include "clarion/text.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

namespace clarion {

const char* outcome_name(Outcome o) { return o == Outcome::Success ? "success" : "max_turns"; }

double EpisodeLog::total_reward() const {
    double r = 0.0;
    for (const auto& rec : records) r += rec.reward;
    return r;
}

std::string scripted_question(const RetrievalResult& retrieval, const Index& index) {
    const std::size_t n = retrieval.ranked.size();
    if (n == 0) return kGenericQuestion;
    std::map<std::string, std::size_t> doc_freq;  // ordered, so ties resolve lexicographically
    for (const auto& sd : retrieval.ranked)
        for (const auto& p : index.doc_terms(sd.doc)) ++doc_freq[index.term(p.doc)];
    const std::string* best = nullptr;
    std::size_t best_imbalance = 0;
    for (const auto& [term, count] : doc_freq) {
        if (count == 0 || count == n) continue;
        const std::size_t imbalance = 2 * count > n ? 2 * count - n : n - 2 * count;
        if (!best || imbalance < best_imbalance) {
            best = &term;
            best_imbalance = imbalance;
        }
    }
    if (!best) return kGenericQuestion;
    return "Are you interested in something related to " + *best + "?";
}

UserReply scripted_user_reply(const SearchCase& search_case, const std::string&, std::size_t revealed_count) {
    if (revealed_count < search_case.facets.size())
        return {join(search_case.facets[revealed_count], " "), revealed_count + 1};
    return {kNothingToAdd, revealed_count};
}

Episode::Episode(const Environment& env, const SearchCase& search_case)
    : env_(env), case_(search_case), history_(search_case.initial_query) {
    if (env.index.position_of(search_case.target_doc_id) < 0)
        throw EpisodeError("case " + search_case.user_id + " targets \"" + search_case.target_doc_id +
                           "\" which is not in domain " + env.domain.name());
    log_.domain = env.domain.name();
    log_.user_id = search_case.user_id;
    log_.target_doc_id = search_case.target_doc_id;
    refresh();
    log_.initial_rank = target_rank_;
}

void Episode::refresh() {
    const auto query = query_from_history(history_);
    retrieval_ = retrieve(env_.index, query, env_.config.k_ret, history_.turn_index());
    state_ = build_state(env_.encoder, history_, retrieval_, env_.domain.documents(), env_.config.score_width);
    state_vec_ = state_.concatenated();
    target_rank_ = full_rank_of(env_.index, query, case_.target_doc_id);
}

Transition Episode::step(Action action, std::optional<double> ask_value) {
    if (terminal_) throw EpisodeError("step called on a finished episode");
    const auto& cfg = env_.config;
    const int t = history_.turn_index();

    Transition tr;
    tr.state = state_vec_;
    tr.action = action;

    TurnRecord rec;
    rec.turn = t;
    rec.action = action;
    rec.ask_value = ask_value;
    rec.rank_before = target_rank_;

    if (action == Action::Ask) {
        rec.question = env_.questions.question(history_, retrieval_, case_, env_.index, env_.domain.documents());
        auto reply = env_.user.reply(case_, history_, rec.question, revealed_);
        revealed_ = reply.revealed_count;
        history_.exchange(rec.question, std::move(reply.text));
        refresh();
        rec.rank_after = target_rank_;
        rec.gain = static_cast<long long>(rec.rank_before) - static_cast<long long>(rec.rank_after);
        tr.reward = cfg.step_penalty;
    } else {
        const std::size_t x = std::min<std::size_t>(static_cast<std::size_t>(cfg.presented), retrieval_.ranked.size());
        for (std::size_t i = 0; i < x; ++i) rec.presented.push_back(retrieval_.ranked[i].doc_id);
        const bool hit =
            std::find(rec.presented.begin(), rec.presented.end(), case_.target_doc_id) != rec.presented.end();
        if (hit) {
            rec.rank_after = target_rank_;
            tr.reward = cfg.reward_success;
            tr.terminal = true;
            terminal_ = true;
            log_.outcome = Outcome::Success;
            log_.success_turn = t;
        } else {
            history_.exchange("presented: " + join(rec.presented, " "), kRejection);
            refresh();
            rec.rank_after = target_rank_;
            tr.reward = cfg.step_penalty;
        }
    }

    if (!terminal_ && t + 1 > cfg.max_turns) {
        tr.reward = cfg.reward_timeout;
        tr.terminal = true;
        terminal_ = true;
        log_.outcome = Outcome::MaxTurns;
    }
    if (!tr.terminal) tr.next_state = state_vec_;
    rec.reward = tr.reward;
    log_.records.push_back(std::move(rec));
    return tr;
}

}  // namespace clarion

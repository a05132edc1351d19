#pragma once

#include "clarion/corpus.hpp"
#include "clarion/encoder.hpp"
#include "clarion/history.hpp"
#include "clarion/planner.hpp"
#include "clarion/retrieval.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clarion {

inline constexpr const char* kGenericQuestion = "Could you tell me more about what you need?";
inline constexpr const char* kNothingToAdd = "I have nothing to add";
inline constexpr const char* kRejection = "none of these match";

struct EnvConfig {
    int max_turns = 10;           // T
    int presented = 5;            // x
    int score_width = 5;          // k
    std::size_t k_ret = 50;
    double reward_success = 1.0;
    double reward_timeout = -0.5;
    double step_penalty = 0.0;
};

/// Produces the clarification question for the current turn.
class QuestionGenerator {
public:
    virtual ~QuestionGenerator() = default;
    virtual std::string question(const ConversationHistory& history, const RetrievalResult& retrieval,
                                 const SearchCase& search_case, const Index& index,
                                 const std::vector<Document>& documents) const = 0;
};

struct UserReply {
    std::string text;
    std::size_t revealed_count = 0;
};

/// Answers a clarification question on behalf of the user. Conditions on the
/// case's intent payload only, never on the target document.
class UserSimulator {
public:
    virtual ~UserSimulator() = default;
    virtual UserReply reply(const SearchCase& search_case, const ConversationHistory& history,
                            const std::string& question, std::size_t revealed_count) const = 0;
};

/// Picks the term that most evenly splits the retrieved documents.
std::string scripted_question(const RetrievalResult& retrieval, const Index& index);

/// Reveals the next unrevealed facet, or says there is nothing to add.
UserReply scripted_user_reply(const SearchCase& search_case, const std::string& question,
                              std::size_t revealed_count);

class ScriptedQuestionGenerator final : public QuestionGenerator {
public:
    std::string question(const ConversationHistory&, const RetrievalResult& retrieval, const SearchCase&,
                         const Index& index, const std::vector<Document>&) const override {
        return scripted_question(retrieval, index);
    }
};

class ScriptedUserSimulator final : public UserSimulator {
public:
    UserReply reply(const SearchCase& search_case, const ConversationHistory&, const std::string& question,
                    std::size_t revealed_count) const override {
        return scripted_user_reply(search_case, question, revealed_count);
    }
};

/// Read-only pieces shared by all episodes of one domain.
struct Environment {
    const DomainDataset& domain;
    const Index& index;
    const TextEncoder& encoder;
    const QuestionGenerator& questions;
    const UserSimulator& user;
    EnvConfig config;
};

struct Transition {
    std::vector<double> state;
    Action action = Action::Ask;
    double reward = 0.0;
    std::vector<double> next_state;  // empty when terminal
    bool terminal = false;
};

struct TurnRecord {
    int turn = 0;
    Action action = Action::Ask;
    double reward = 0.0;
    std::size_t rank_before = 0;  // target's full-collection rank, 1-based
    std::size_t rank_after = 0;
    std::optional<double> ask_value;
    std::string question;                // Ask turns
    std::vector<std::string> presented;  // Answer turns
    std::optional<long long> gain;       // Ask turns: rank_before - rank_after, recorded during the episode
};

enum class Outcome { Success, MaxTurns };

const char* outcome_name(Outcome o);

struct EpisodeLog {
    std::string domain;
    std::string user_id;
    std::string target_doc_id;
    std::size_t initial_rank = 0;
    std::vector<TurnRecord> records;
    Outcome outcome = Outcome::MaxTurns;
    std::optional<int> success_turn;

    int turns() const { return static_cast<int>(records.size()); }
    double total_reward() const;
};

class EpisodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One conversational-search episode. Construction performs the reset:
/// the history holds the initial query, retrieval and state are computed.
class Episode {
public:
    Episode(const Environment& env, const SearchCase& search_case);

    const ConversationHistory& history() const { return history_; }
    const RetrievalResult& retrieval() const { return retrieval_; }
    const State& state() const { return state_; }
    const std::vector<double>& state_vector() const { return state_vec_; }
    int turn() const { return history_.turn_index(); }
    bool terminal() const { return terminal_; }
    std::size_t target_rank() const { return target_rank_; }
    const EpisodeLog& log() const { return log_; }
    EpisodeLog take_log() && { return std::move(log_); }

    Transition step(Action action, std::optional<double> ask_value = std::nullopt);

private:
    void refresh();

    const Environment& env_;
    const SearchCase& case_;
    ConversationHistory history_;
    RetrievalResult retrieval_;
    State state_;
    std::vector<double> state_vec_;
    std::size_t target_rank_ = 0;
    std::size_t revealed_ = 0;
    bool terminal_ = false;
    EpisodeLog log_;
};

}  // namespace clarion

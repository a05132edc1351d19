#pragma once

#include <string>
#include <vector>

namespace clarion {

enum class Speaker { User, System };

struct Turn {
    Speaker speaker;
    std::string text;
};

/// Alternating user/system dialogue that starts with the user's query.
class ConversationHistory {
public:
    explicit ConversationHistory(std::string initial_query);

    const std::vector<Turn>& turns() const { return turns_; }
    /// Number of system decisions taken so far, plus one.
    int turn_index() const { return turn_index_; }

    /// Appends one system message and the user's reply to it.
    void exchange(std::string system_text, std::string user_text);

    /// All turns joined in order with a separator token between them.
    std::string full_text() const;

private:
    std::vector<Turn> turns_;
    int turn_index_ = 1;
};

/// User utterances only, in order, joined by single spaces.
std::string query_from_history(const ConversationHistory& history);

}  // namespace clarion

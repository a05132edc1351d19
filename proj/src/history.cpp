#include "clarion/history.hpp"

#include <stdexcept>

namespace clarion {

namespace {
constexpr const char* kTurnSeparator = " [SEP] ";
}

ConversationHistory::ConversationHistory(std::string initial_query) {
    turns_.push_back({Speaker::User, std::move(initial_query)});
}

void ConversationHistory::exchange(std::string system_text, std::string user_text) {
    turns_.push_back({Speaker::System, std::move(system_text)});
    turns_.push_back({Speaker::User, std::move(user_text)});
    ++turn_index_;
}

std::string ConversationHistory::full_text() const {
    std::string out;
    for (std::size_t i = 0; i < turns_.size(); ++i) {
        if (i) out += kTurnSeparator;
        out += turns_[i].text;
    }
    return out;
}

std::string query_from_history(const ConversationHistory& history) {
    std::string out;
    bool any = false;
    for (const auto& t : history.turns()) {
        if (t.speaker != Speaker::User) continue;
        if (any) out += ' ';
        out += t.text;
        any = true;
    }
    if (!any) throw std::invalid_argument("query_from_history: no user turns");
    return out;
}

}  // namespace clarion

#include "clarion/adapter.hpp"

#include <algorithm>
#include <stdexcept>

namespace clarion {

using nlohmann::json;

const char* const kUserSimulationTemplate =
    "You play a user of a search engine. You are looking for the following item:\n"
    "{intent}\n"
    "Conversation so far:\n"
    "{history}\n"
    "The search system now says: \"{system_message}\"\n"
    "Reply in one short sentence. Only use information from the item you are looking for. "
    "If the system's question does not apply, say so briefly.";

const char* const kQuestionGenerationTemplate =
    "You are the clarification component of a search system.\n"
    "Conversation so far:\n"
    "{history}\n"
    "Top retrieved documents:\n"
    "{documents}\n"
    "First reason step by step about which aspect separates these documents best, "
    "then write one clarification question for the user on the final line, prefixed with \"Question:\".";

std::string fill_template(const std::string& tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find('{', pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        const auto close = tmpl.find('}', open);
        if (close == std::string::npos) throw std::invalid_argument("unterminated template placeholder");
        out.append(tmpl, pos, open - pos);
        const auto key = tmpl.substr(open + 1, close - open - 1);
        auto it = values.find(key);
        if (it == values.end()) throw std::invalid_argument("no value for template placeholder {" + key + "}");
        out += it->second;
        pos = close + 1;
    }
    return out;
}

json history_to_json(const ConversationHistory& history) {
    json a = json::array();
    for (const auto& t : history.turns())
        a.push_back({{"speaker", t.speaker == Speaker::User ? "user" : "system"}, {"text", t.text}});
    return a;
}

namespace {
std::string history_lines(const ConversationHistory& history) {
    std::string out;
    for (const auto& t : history.turns()) {
        out += t.speaker == Speaker::User ? "User: " : "System: ";
        out += t.text;
        out += '\n';
    }
    return out;
}
}  // namespace

json user_simulation_request(const SearchCase& search_case, const ConversationHistory& history,
                             const std::string& system_message, const std::string& tmpl) {
    return {{"task", "user_simulation"},
            {"intent_text", search_case.intent_text},
            {"history", history_to_json(history)},
            {"system_message", system_message},
            {"prompt", fill_template(tmpl, {{"intent", search_case.intent_text},
                                            {"history", history_lines(history)},
                                            {"system_message", system_message}})}};
}

json question_generation_request(const ConversationHistory& history, const std::vector<std::string>& top_docs,
                                 const std::string& tmpl) {
    std::string docs;
    for (std::size_t i = 0; i < top_docs.size(); ++i) docs += "[" + std::to_string(i + 1) + "] " + top_docs[i] + "\n";
    return {{"task", "question_generation"},
            {"history", history_to_json(history)},
            {"top_docs", top_docs},
            {"prompt", fill_template(tmpl, {{"history", history_lines(history)}, {"documents", docs}})}};
}

std::string call_with_retry(const ChatTransport& transport, const json& request, const AdapterOptions& options) {
    if (!transport) throw AdapterError("no chat transport configured");
    std::string last_error = "unknown failure";
    for (int attempt = 0; attempt <= std::max(0, options.retries); ++attempt) {
        try {
            auto reply = transport(request, options.timeout_ms);
            if (!reply.empty()) return reply;
            last_error = "empty completion";
        } catch (const std::exception& e) {
            last_error = e.what();
        }
    }
    throw AdapterError("chat request \"" + request.value("task", std::string("?")) + "\" failed after " +
                       std::to_string(std::max(0, options.retries) + 1) + " attempts: " + last_error);
}

UserReply ChatUserSimulator::reply(const SearchCase& search_case, const ConversationHistory& history,
                                   const std::string& question, std::size_t revealed_count) const {
    return {call_with_retry(transport_, user_simulation_request(search_case, history, question, template_), options_),
            revealed_count};
}

std::string ChatQuestionGenerator::question(const ConversationHistory& history, const RetrievalResult& retrieval,
                                            const SearchCase&, const Index&,
                                            const std::vector<Document>& documents) const {
    std::vector<std::string> top;
    for (std::size_t i = 0; i < std::min(top_docs_, retrieval.ranked.size()); ++i)
        top.push_back(documents.at(retrieval.ranked[i].doc).text);
    auto text = call_with_retry(transport_, question_generation_request(history, top, template_), options_);
    // Keep only the final question when the completion includes its reasoning.
    if (auto pos = text.rfind("Question:"); pos != std::string::npos) {
        text = text.substr(pos + 9);
        text.erase(0, text.find_first_not_of(" \t\n"));
    }
    return text;
}

}  // namespace clarion

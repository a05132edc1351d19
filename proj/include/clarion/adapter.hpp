#pragma once

// Bridges the episode loop to an external chat-completion service. Nothing
// here runs during training or the test suite unless a transport is supplied.

#include "clarion/environment.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <string>

namespace clarion {

struct AdapterOptions {
    int timeout_ms = 30000;
    int retries = 2;  // extra attempts after the first failure
};

/// Sends one request and returns the completion text. Must honour the
/// timeout it is given and throw on any failure.
using ChatTransport = std::function<std::string(const nlohmann::json& request, int timeout_ms)>;

class AdapterError : public EpisodeError {
public:
    using EpisodeError::EpisodeError;
};

extern const char* const kUserSimulationTemplate;
extern const char* const kQuestionGenerationTemplate;

/// Replaces every `{name}` with its value; unknown placeholders throw.
std::string fill_template(const std::string& tmpl, const std::map<std::string, std::string>& values);

nlohmann::json history_to_json(const ConversationHistory& history);

/// {task, intent_text, history, system_message, prompt}
nlohmann::json user_simulation_request(const SearchCase& search_case, const ConversationHistory& history,
                                       const std::string& system_message,
                                       const std::string& tmpl = kUserSimulationTemplate);
/// {task, history, top_docs, prompt}
nlohmann::json question_generation_request(const ConversationHistory& history,
                                           const std::vector<std::string>& top_docs,
                                           const std::string& tmpl = kQuestionGenerationTemplate);

/// Calls the transport, retrying on failure; the final failure is rethrown
/// as AdapterError. Empty completions count as failures.
std::string call_with_retry(const ChatTransport& transport, const nlohmann::json& request,
                            const AdapterOptions& options);

class ChatUserSimulator final : public UserSimulator {
public:
    ChatUserSimulator(ChatTransport transport, AdapterOptions options = {},
                      std::string tmpl = kUserSimulationTemplate)
        : transport_(std::move(transport)), options_(options), template_(std::move(tmpl)) {}

    UserReply reply(const SearchCase& search_case, const ConversationHistory& history, const std::string& question,
                    std::size_t revealed_count) const override;

private:
    ChatTransport transport_;
    AdapterOptions options_;
    std::string template_;
};

class ChatQuestionGenerator final : public QuestionGenerator {
public:
    ChatQuestionGenerator(ChatTransport transport, AdapterOptions options = {}, std::size_t top_docs = 5,
                          std::string tmpl = kQuestionGenerationTemplate)
        : transport_(std::move(transport)), options_(options), top_docs_(top_docs), template_(std::move(tmpl)) {}

    std::string question(const ConversationHistory& history, const RetrievalResult& retrieval,
                         const SearchCase& search_case, const Index& index,
                         const std::vector<Document>& documents) const override;

private:
    ChatTransport transport_;
    AdapterOptions options_;
    std::size_t top_docs_;
    std::string template_;
};

}  // namespace clarion

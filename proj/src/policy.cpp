#include "clarion/policy.hpp"

#include <exception>
#include <stdexcept>

namespace clarion {

Decision PlannerPolicy::decide(const std::vector<double>& state, int) const {
    const double v = ask_value(net_, state);
    return {v >= 0.5 ? Action::Ask : Action::Answer, v};
}

std::unique_ptr<Policy> make_baseline(const std::string& name, int n) {
    if (name == "always-ask") return std::make_unique<AlwaysAskPolicy>();
    if (name == "never-ask") return std::make_unique<NeverAskPolicy>();
    if (name == "ask-first-n") {
        if (n < 0) throw std::invalid_argument("ask-first-n needs n >= 0");
        return std::make_unique<AskFirstNPolicy>(n);
    }
    throw std::invalid_argument("unknown baseline \"" + name + "\"");
}

EpisodeLog run_episode(const Environment& env, const SearchCase& search_case, const Policy& policy) {
    Episode ep(env, search_case);
    while (!ep.terminal()) {
        const auto d = policy.decide(ep.state_vector(), ep.turn());
        ep.step(d.action, d.ask_value);
    }
    return std::move(ep).take_log();
}

std::vector<EpisodeLog> evaluate_serial(const Environment& env, const std::vector<SearchCase>& cases,
                                        const Policy& policy) {
    std::vector<EpisodeLog> logs;
    logs.reserve(cases.size());
    for (const auto& c : cases) logs.push_back(run_episode(env, c, policy));
    return logs;
}

std::vector<EpisodeLog> evaluate(const Environment& env, const std::vector<SearchCase>& cases, const Policy& policy) {
    std::vector<EpisodeLog> logs(cases.size());
    std::exception_ptr failure;
    const auto n = static_cast<std::ptrdiff_t>(cases.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            logs[static_cast<std::size_t>(i)] = run_episode(env, cases[static_cast<std::size_t>(i)], policy);
        } catch (...) {
#pragma omp critical(clarion_eval_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return logs;
}

}  // namespace clarion

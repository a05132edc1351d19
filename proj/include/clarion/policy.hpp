#pragma once

#include "clarion/environment.hpp"
#include "clarion/planner.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace clarion {

struct Decision {
    Action action = Action::Ask;
    std::optional<double> ask_value;  // set by learned policies
};

/// Frozen decision rule used during evaluation. Implementations must be
/// safe to call concurrently.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual Decision decide(const std::vector<double>& state, int turn) const = 0;
};

/// Thresholds ask_value at 0.5 (equivalently, greedy on Q).
class PlannerPolicy final : public Policy {
public:
    explicit PlannerPolicy(QNetwork net) : net_(std::move(net)) {}
    std::string name() const override { return "planner"; }
    Decision decide(const std::vector<double>& state, int turn) const override;
    const QNetwork& network() const { return net_; }

private:
    QNetwork net_;
};

class AlwaysAskPolicy final : public Policy {
public:
    std::string name() const override { return "always-ask"; }
    Decision decide(const std::vector<double>&, int) const override { return {Action::Ask, std::nullopt}; }
};

class NeverAskPolicy final : public Policy {
public:
    std::string name() const override { return "never-ask"; }
    Decision decide(const std::vector<double>&, int) const override { return {Action::Answer, std::nullopt}; }
};

/// Asks during the first n turns, then answers.
class AskFirstNPolicy final : public Policy {
public:
    explicit AskFirstNPolicy(int n) : n_(n) {}
    std::string name() const override { return "ask-first-" + std::to_string(n_); }
    Decision decide(const std::vector<double>&, int turn) const override {
        return {turn <= n_ ? Action::Ask : Action::Answer, std::nullopt};
    }

private:
    int n_;
};

/// Parses "always-ask", "never-ask" or "ask-first-n" (n defaults to 1).
std::unique_ptr<Policy> make_baseline(const std::string& name, int n = 1);

EpisodeLog run_episode(const Environment& env, const SearchCase& search_case, const Policy& policy);

/// Episodes in case order, one thread. Reference for evaluate().
std::vector<EpisodeLog> evaluate_serial(const Environment& env, const std::vector<SearchCase>& cases,
                                        const Policy& policy);
/// Episodes rolled out in parallel with OpenMP; results are stored by case
/// index, so the output matches evaluate_serial exactly.
std::vector<EpisodeLog> evaluate(const Environment& env, const std::vector<SearchCase>& cases, const Policy& policy);

}  // namespace clarion

#pragma once

#include "clarion/environment.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace clarion {

class MetricsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Per-turn ask probability over the episodes still active at that turn.
struct StrategyTrajectory {
    std::vector<double> ask_prob;     // index 0 is turn 1
    std::vector<std::size_t> counts;  // active episodes per turn
};

/// Fraction of episodes that succeeded at or before turn k.
double sr_at_k(std::span<const EpisodeLog> logs, int k);
/// Mean of the success turn, counting failures as max_turns.
double avg_turns(std::span<const EpisodeLog> logs, int max_turns);
/// Fraction of episodes whose target ranked within k before any action.
double recall_at_k(std::span<const EpisodeLog> logs, std::size_t k = 5);

StrategyTrajectory ask_trajectory(std::span<const EpisodeLog> logs, int max_turns);

/// Unwindowed dynamic time warping with |a_i - b_j| local cost.
double dtw(std::span<const double> a, std::span<const double> b);
/// Mean DTW over all unordered pairs of trajectories.
double strategy_diversity(std::span<const StrategyTrajectory> trajectories);
double dtw_to_reference(const StrategyTrajectory& trajectory, const StrategyTrajectory& reference);

struct AskGain {
    int turn = 0;
    long long gain = 0;  // positive when the target moved up
};

/// Rank change of the target across every Ask turn, recomputed from the
/// logged ranks.
std::vector<AskGain> asking_benefit(const EpisodeLog& log);
/// Mean gain per turn (index 0 is turn 1); turns without any Ask are empty.
std::vector<std::optional<double>> mean_gain_per_turn(std::span<const EpisodeLog> logs, int max_turns);

/// Sample Pearson correlation.
double pearson(std::span<const double> x, std::span<const double> y);

struct MetricsReport {
    std::size_t episodes = 0;
    double recall_at_5 = 0.0;
    std::map<int, double> sr_at;
    double avg_turns = 0.0;
    std::optional<double> diversity;
    std::optional<double> dtw_to_reference;
    std::vector<std::optional<double>> gain_per_turn;
    StrategyTrajectory trajectory;
};

/// Search metrics, trajectory and per-turn gains for one evaluation run.
MetricsReport build_report(std::span<const EpisodeLog> logs, int max_turns);

}  // namespace clarion

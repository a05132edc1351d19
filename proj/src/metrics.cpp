#include "clarion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clarion {

namespace {
void require_logs(std::span<const EpisodeLog> logs, const char* op) {
    if (logs.empty()) throw MetricsError(std::string(op) + ": no episodes");
}
}  // namespace

double sr_at_k(std::span<const EpisodeLog> logs, int k) {
    require_logs(logs, "sr_at_k");
    if (k < 1) throw MetricsError("sr_at_k: k must be >= 1");
    const auto hits = std::count_if(logs.begin(), logs.end(), [k](const EpisodeLog& l) {
        return l.outcome == Outcome::Success && l.success_turn && *l.success_turn <= k;
    });
    return static_cast<double>(hits) / static_cast<double>(logs.size());
}

double avg_turns(std::span<const EpisodeLog> logs, int max_turns) {
    require_logs(logs, "avg_turns");
    double sum = 0.0;
    for (const auto& l : logs)
        sum += (l.outcome == Outcome::Success && l.success_turn) ? *l.success_turn : max_turns;
    return sum / static_cast<double>(logs.size());
}

double recall_at_k(std::span<const EpisodeLog> logs, std::size_t k) {
    require_logs(logs, "recall_at_k");
    std::size_t hits = 0;
    for (const auto& l : logs) {
        if (l.initial_rank == 0) throw MetricsError("recall_at_k: episode without an initial rank");
        if (l.initial_rank <= k) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(logs.size());
}

StrategyTrajectory ask_trajectory(std::span<const EpisodeLog> logs, int max_turns) {
    require_logs(logs, "ask_trajectory");
    const auto T = static_cast<std::size_t>(std::max(max_turns, 0));
    std::vector<std::size_t> asks(T, 0), active(T, 0);
    for (const auto& l : logs) {
        for (const auto& r : l.records) {
            if (r.turn < 1 || static_cast<std::size_t>(r.turn) > T) throw MetricsError("turn outside [1, T]");
            const auto t = static_cast<std::size_t>(r.turn - 1);
            ++active[t];
            if (r.action == Action::Ask) ++asks[t];
        }
    }
    std::size_t last = 0;
    for (std::size_t t = 0; t < T; ++t)
        if (active[t] > 0) last = t + 1;
    StrategyTrajectory traj;
    for (std::size_t t = 0; t < last; ++t) {
        traj.counts.push_back(active[t]);
        traj.ask_prob.push_back(active[t] ? static_cast<double>(asks[t]) / static_cast<double>(active[t]) : 0.0);
    }
    return traj;
}

double dtw(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw MetricsError("dtw: empty sequence");
    const std::size_t m = b.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = inf;
        for (std::size_t j = 1; j <= m; ++j)
            cur[j] = std::abs(a[i - 1] - b[j - 1]) + std::min({prev[j], cur[j - 1], prev[j - 1]});
        std::swap(prev, cur);
    }
    return prev[m];
}

double strategy_diversity(std::span<const StrategyTrajectory> trajectories) {
    if (trajectories.size() < 2) throw MetricsError("strategy_diversity needs at least 2 trajectories");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < trajectories.size(); ++i)
        for (std::size_t j = i + 1; j < trajectories.size(); ++j, ++pairs)
            sum += dtw(trajectories[i].ask_prob, trajectories[j].ask_prob);
    return sum / static_cast<double>(pairs);
}

double dtw_to_reference(const StrategyTrajectory& trajectory, const StrategyTrajectory& reference) {
    return dtw(trajectory.ask_prob, reference.ask_prob);
}

std::vector<AskGain> asking_benefit(const EpisodeLog& log) {
    std::vector<AskGain> out;
    for (const auto& r : log.records) {
        if (r.action != Action::Ask) continue;
        if (r.rank_before == 0 || r.rank_after == 0)
            throw MetricsError("asking_benefit: missing rank record at turn " + std::to_string(r.turn));
        out.push_back({r.turn, static_cast<long long>(r.rank_before) - static_cast<long long>(r.rank_after)});
    }
    return out;
}

std::vector<std::optional<double>> mean_gain_per_turn(std::span<const EpisodeLog> logs, int max_turns) {
    require_logs(logs, "mean_gain_per_turn");
    const auto T = static_cast<std::size_t>(std::max(max_turns, 0));
    std::vector<double> sum(T, 0.0);
    std::vector<std::size_t> n(T, 0);
    for (const auto& l : logs) {
        for (const auto& g : asking_benefit(l)) {
            if (g.turn < 1 || static_cast<std::size_t>(g.turn) > T) throw MetricsError("turn outside [1, T]");
            sum[static_cast<std::size_t>(g.turn - 1)] += static_cast<double>(g.gain);
            ++n[static_cast<std::size_t>(g.turn - 1)];
        }
    }
    std::vector<std::optional<double>> out(T);
    for (std::size_t t = 0; t < T; ++t)
        if (n[t]) out[t] = sum[t] / static_cast<double>(n[t]);
    return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw MetricsError("pearson: length mismatch");
    if (x.size() < 2) throw MetricsError("pearson: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw MetricsError("pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

MetricsReport build_report(std::span<const EpisodeLog> logs, int max_turns) {
    MetricsReport r;
    r.episodes = logs.size();
    r.recall_at_5 = recall_at_k(logs, 5);
    for (int k = 1; k <= max_turns; ++k) r.sr_at[k] = sr_at_k(logs, k);
    r.avg_turns = avg_turns(logs, max_turns);
    r.gain_per_turn = mean_gain_per_turn(logs, max_turns);
    r.trajectory = ask_trajectory(logs, max_turns);
    return r;
}

}  // namespace clarion

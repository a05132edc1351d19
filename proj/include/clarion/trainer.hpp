#pragma once

#include "clarion/corpus.hpp"
#include "clarion/environment.hpp"
#include "clarion/planner.hpp"
#include "clarion/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace clarion {

enum class MdtScheme { PerEpisode, PerEpoch };

struct TrainConfig {
    int max_turns = 10;              // T
    std::size_t episodes = 1800;
    std::size_t buffer_capacity = 10000;
    std::size_t batch_size = 32;
    double lr = 1e-4;
    double gamma = 0.99;
    double reward_success = 1.0;
    double reward_timeout = -0.5;
    double step_penalty = 0.0;
    int presented = 5;               // x
    int score_width = 5;             // k
    std::size_t k_ret = 50;
    double epsilon_start = 1.0;
    double epsilon_end = 0.1;
    double epsilon_decay_fraction = 0.5;
    std::size_t target_sync_every = 20;  // gradient steps
    std::size_t updates_per_step = 1;    // gradient steps per environment step
    std::size_t encoder_dim = 64;
    std::size_t hidden = 128;
    double bm25_k1 = 1.2;
    double bm25_b = 0.75;
    MdtScheme mdt_scheme = MdtScheme::PerEpisode;
    std::size_t mdt_epoch_episodes = 60;
    std::uint64_t seed = 0;

    EnvConfig env() const;
    Bm25Params bm25() const { return {bm25_k1, bm25_b}; }
    /// Throws std::invalid_argument naming the offending key.
    void validate() const;
    /// Linear decay over the first decay fraction of episodes, then flat.
    double epsilon_at(std::size_t episode) const;
};

/// Applies one `key=value` assignment. Unknown keys and bad values throw.
void apply_config_entry(TrainConfig& config, const std::string& key, const std::string& value);
/// Flat key=value text; '#' starts a comment.
TrainConfig parse_config(const std::string& text, TrainConfig base = {});
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
/// Every key with its resolved value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& config);
std::string format_config(const TrainConfig& config);

/// Fixed-capacity FIFO ring of transitions with uniform sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return storage_.size(); }
    std::uint64_t inserted() const { return inserted_; }

    void push(Transition t);
    /// Oldest-first position i in [0, size()).
    const Transition& at(std::size_t i) const;
    /// Uniform with replacement. Returns oldest-first positions.
    std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;
    std::vector<Transition> sample(std::size_t batch_size, Rng& rng) const;

private:
    std::size_t capacity_;
    std::vector<Transition> storage_;
    std::size_t head_ = 0;  // slot of the oldest item once full
    std::uint64_t inserted_ = 0;
};

/// r + gamma * max_a Q_target(s', a), or r when terminal.
double bellman_target(double reward, double next_q_max, bool terminal, double gamma);

struct EpisodeSummary {
    std::size_t episode = 0;
    std::string domain;
    std::string user_id;
    Outcome outcome = Outcome::MaxTurns;
    int turns = 0;
    double total_reward = 0.0;
    std::optional<double> mean_loss;  // none before the buffer holds a batch
    double epsilon = 0.0;
};

struct TrainingLog {
    std::vector<EpisodeSummary> episodes;
    std::size_t gradient_steps = 0;
    std::size_t target_syncs = 0;
};

struct TrainResult {
    QNetwork network;
    TrainingLog log;
};

class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, std::size_t episode) : std::runtime_error(what), episode_(episode) {}
    std::size_t episode() const { return episode_; }

private:
    std::size_t episode_;
};

/// Multi-domain training. Domains are sampled with a dedicated RNG stream so
/// the domain sequence depends only on (seed, number of domains, scheme).
TrainResult train_mdt(const std::vector<DomainDataset>& domains, const TrainConfig& config,
                      const std::function<void(const EpisodeSummary&)>& on_episode = {});

/// The domain index drawn for each episode by train_mdt.
std::vector<std::size_t> domain_schedule(std::size_t n_domains, const TrainConfig& config);

}  // namespace clarion

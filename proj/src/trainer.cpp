#include "clarion/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace clarion {

namespace {
enum Stream : std::uint64_t { kDomainStream = 10, kCaseStream, kExploreStream, kReplayStream, kInitStream };
}

EnvConfig TrainConfig::env() const {
    EnvConfig e;
    e.max_turns = max_turns;
    e.presented = presented;
    e.score_width = score_width;
    e.k_ret = k_ret;
    e.reward_success = reward_success;
    e.reward_timeout = reward_timeout;
    e.step_penalty = step_penalty;
    return e;
}

void TrainConfig::validate() const {
    auto fail = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument("config " + key + ": " + why);
    };
    if (max_turns <= 0) fail("T", "must be positive");
    if (episodes == 0) fail("episodes", "must be positive");
    if (buffer_capacity == 0) fail("buffer_capacity", "must be positive");
    if (batch_size == 0) fail("batch_size", "must be positive");
    if (batch_size > buffer_capacity) fail("batch_size", "exceeds buffer_capacity");
    if (!(lr > 0.0)) fail("lr", "must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma", "must lie in (0, 1]");
    if (presented <= 0) fail("x", "must be positive");
    if (score_width <= 0) fail("state.k", "must be positive");
    if (k_ret == 0) fail("retrieve.k_ret", "must be positive");
    if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) fail("epsilon_start", "must lie in [0, 1]");
    if (!(epsilon_end >= 0.0 && epsilon_end <= 1.0)) fail("epsilon_end", "must lie in [0, 1]");
    if (epsilon_end > epsilon_start) fail("epsilon_end", "must not exceed epsilon_start");
    if (!(epsilon_decay_fraction >= 0.0 && epsilon_decay_fraction <= 1.0))
        fail("epsilon_decay_fraction", "must lie in [0, 1]");
    if (target_sync_every == 0) fail("target_sync_every", "must be positive");
    if (updates_per_step == 0) fail("updates_per_step", "must be positive");
    if (encoder_dim == 0) fail("encoder.dim", "must be positive");
    if (hidden == 0) fail("hidden", "must be positive");
    if (!(bm25_k1 >= 0.0)) fail("bm25.k1", "must be non-negative");
    if (!(bm25_b >= 0.0 && bm25_b <= 1.0)) fail("bm25.b", "must lie in [0, 1]");
    if (mdt_epoch_episodes == 0) fail("mdt.epoch_episodes", "must be positive");
}

double TrainConfig::epsilon_at(std::size_t episode) const {
    const double horizon = epsilon_decay_fraction * static_cast<double>(episodes);
    if (horizon <= 0.0) return epsilon_end;
    const double frac = std::min(1.0, static_cast<double>(episode) / horizon);
    return epsilon_start + (epsilon_end - epsilon_start) * frac;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    if constexpr (std::is_floating_point_v<T>) {
        char* end = nullptr;
        out = std::strtod(first, &end);
        if (value.empty() || end != last || !std::isfinite(out))
            throw std::invalid_argument("config " + key + ": not a number: \"" + value + "\"");
    } else {
        auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec != std::errc() || ptr != last)
            throw std::invalid_argument("config " + key + ": not an integer: \"" + value + "\"");
    }
    return out;
}

std::string format_double(double x) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

}  // namespace

void apply_config_entry(TrainConfig& c, const std::string& key, const std::string& value) {
    if (key == "T" || key == "max_turns") c.max_turns = parse_number<int>(key, value);
    else if (key == "episodes") c.episodes = parse_number<std::size_t>(key, value);
    else if (key == "buffer_capacity") c.buffer_capacity = parse_number<std::size_t>(key, value);
    else if (key == "batch_size") c.batch_size = parse_number<std::size_t>(key, value);
    else if (key == "lr") c.lr = parse_number<double>(key, value);
    else if (key == "gamma") c.gamma = parse_number<double>(key, value);
    else if (key == "reward_success") c.reward_success = parse_number<double>(key, value);
    else if (key == "reward_timeout") c.reward_timeout = parse_number<double>(key, value);
    else if (key == "step_penalty") c.step_penalty = parse_number<double>(key, value);
    else if (key == "x") c.presented = parse_number<int>(key, value);
    else if (key == "k" || key == "state.k") c.score_width = parse_number<int>(key, value);
    else if (key == "k_ret" || key == "retrieve.k_ret") c.k_ret = parse_number<std::size_t>(key, value);
    else if (key == "epsilon_start") c.epsilon_start = parse_number<double>(key, value);
    else if (key == "epsilon_end") c.epsilon_end = parse_number<double>(key, value);
    else if (key == "epsilon_decay_fraction") c.epsilon_decay_fraction = parse_number<double>(key, value);
    else if (key == "target_sync_every") c.target_sync_every = parse_number<std::size_t>(key, value);
    else if (key == "updates_per_step") c.updates_per_step = parse_number<std::size_t>(key, value);
    else if (key == "encoder.dim") c.encoder_dim = parse_number<std::size_t>(key, value);
    else if (key == "hidden") c.hidden = parse_number<std::size_t>(key, value);
    else if (key == "bm25.k1") c.bm25_k1 = parse_number<double>(key, value);
    else if (key == "bm25.b") c.bm25_b = parse_number<double>(key, value);
    else if (key == "mdt.epoch_episodes") c.mdt_epoch_episodes = parse_number<std::size_t>(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "mdt.scheme") {
        if (value == "per-episode") c.mdt_scheme = MdtScheme::PerEpisode;
        else if (value == "per-epoch") c.mdt_scheme = MdtScheme::PerEpoch;
        else throw std::invalid_argument("config mdt.scheme: expected per-episode or per-epoch, got \"" + value + "\"");
    } else {
        throw std::invalid_argument("unknown config key \"" + key + "\"");
    }
}

TrainConfig parse_config(const std::string& text, TrainConfig base) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
        apply_config_entry(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    base.validate();
    return base;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), base);
}

std::vector<std::pair<std::string, std::string>> config_entries(const TrainConfig& c) {
    return {
        {"T", std::to_string(c.max_turns)},
        {"episodes", std::to_string(c.episodes)},
        {"buffer_capacity", std::to_string(c.buffer_capacity)},
        {"batch_size", std::to_string(c.batch_size)},
        {"lr", format_double(c.lr)},
        {"gamma", format_double(c.gamma)},
        {"reward_success", format_double(c.reward_success)},
        {"reward_timeout", format_double(c.reward_timeout)},
        {"step_penalty", format_double(c.step_penalty)},
        {"x", std::to_string(c.presented)},
        {"state.k", std::to_string(c.score_width)},
        {"retrieve.k_ret", std::to_string(c.k_ret)},
        {"epsilon_start", format_double(c.epsilon_start)},
        {"epsilon_end", format_double(c.epsilon_end)},
        {"epsilon_decay_fraction", format_double(c.epsilon_decay_fraction)},
        {"target_sync_every", std::to_string(c.target_sync_every)},
        {"updates_per_step", std::to_string(c.updates_per_step)},
        {"encoder.dim", std::to_string(c.encoder_dim)},
        {"hidden", std::to_string(c.hidden)},
        {"bm25.k1", format_double(c.bm25_k1)},
        {"bm25.b", format_double(c.bm25_b)},
        {"mdt.scheme", c.mdt_scheme == MdtScheme::PerEpisode ? "per-episode" : "per-epoch"},
        {"mdt.epoch_episodes", std::to_string(c.mdt_epoch_episodes)},
        {"seed", std::to_string(c.seed)},
    };
}

std::string format_config(const TrainConfig& config) {
    std::string out;
    for (const auto& [k, v] : config_entries(config)) out += k + "=" + v + "\n";
    return out;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    storage_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[head_] = std::move(t);
        head_ = (head_ + 1) % capacity_;
    }
    ++inserted_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= storage_.size()) throw std::out_of_range("replay position out of range");
    return storage_[(head_ + i) % storage_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
    if (storage_.size() < batch_size)
        throw std::logic_error("cannot sample " + std::to_string(batch_size) + " from a buffer of " +
                               std::to_string(storage_.size()));
    std::vector<std::size_t> idx(batch_size);
    for (auto& i : idx) i = static_cast<std::size_t>(rng.uniform_index(storage_.size()));
    return idx;
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
    std::vector<Transition> out;
    out.reserve(batch_size);
    for (auto i : sample_indices(batch_size, rng)) out.push_back(at(i));
    return out;
}

double bellman_target(double reward, double next_q_max, bool terminal, double gamma) {
    if (!std::isfinite(reward) || !std::isfinite(gamma) || (!terminal && !std::isfinite(next_q_max)))
        throw std::invalid_argument("bellman_target: non-finite input");
    return terminal ? reward : reward + gamma * next_q_max;
}

std::vector<std::size_t> domain_schedule(std::size_t n_domains, const TrainConfig& config) {
    if (n_domains == 0) throw std::invalid_argument("no training domains");
    Rng rng(derive_seed(config.seed, kDomainStream));
    std::vector<std::size_t> out;
    out.reserve(config.episodes);
    std::vector<std::size_t> subset;
    for (std::size_t e = 0; e < config.episodes; ++e) {
        if (config.mdt_scheme == MdtScheme::PerEpisode) {
            out.push_back(static_cast<std::size_t>(rng.uniform_index(n_domains)));
            continue;
        }
        if (e % config.mdt_epoch_episodes == 0) {
            subset.clear();
            for (std::size_t d = 0; d < n_domains; ++d)
                if (rng.bernoulli(0.5)) subset.push_back(d);
            if (subset.empty()) subset.push_back(static_cast<std::size_t>(rng.uniform_index(n_domains)));
        }
        out.push_back(subset[rng.uniform_index(subset.size())]);
    }
    return out;
}

TrainResult train_mdt(const std::vector<DomainDataset>& domains, const TrainConfig& config,
                      const std::function<void(const EpisodeSummary&)>& on_episode) {
    config.validate();
    if (domains.empty()) throw std::invalid_argument("train_mdt needs at least one domain");

    struct DomainRuntime {
        const DomainDataset* data;
        Index index;
        std::vector<SearchCase> train;
    };
    std::vector<DomainRuntime> runtimes;
    runtimes.reserve(domains.size());
    for (const auto& d : domains) {
        auto train = d.cases_in(Split::Train);
        if (train.empty()) throw std::invalid_argument("domain " + d.name() + " has no training cases");
        runtimes.push_back({&d, build_index(d.documents(), config.bm25()), std::move(train)});
    }

    const HashingEncoder encoder(config.encoder_dim);
    const ScriptedQuestionGenerator questions;
    const ScriptedUserSimulator user;
    std::vector<Environment> envs;
    envs.reserve(runtimes.size());
    for (const auto& r : runtimes) envs.push_back({*r.data, r.index, encoder, questions, user, config.env()});

    TrainResult result{init_network(config.encoder_dim, static_cast<std::size_t>(config.score_width), config.hidden,
                                    derive_seed(config.seed, kInitStream)),
                       {}};
    QNetwork& online = result.network;
    QNetwork target = online;
    AdamOptimizer adam(config.lr);
    ReplayBuffer buffer(config.buffer_capacity);

    Rng case_rng(derive_seed(config.seed, kCaseStream));
    Rng explore_rng(derive_seed(config.seed, kExploreStream));
    Rng replay_rng(derive_seed(config.seed, kReplayStream));
    const auto schedule = domain_schedule(domains.size(), config);

    std::vector<TrainingSample> batch(config.batch_size);
    for (std::size_t e = 0; e < config.episodes; ++e) {
        const auto& rt = runtimes[schedule[e]];
        const auto& search_case = rt.train[case_rng.uniform_index(rt.train.size())];
        const double epsilon = config.epsilon_at(e);

        Episode episode(envs[schedule[e]], search_case);
        double loss_sum = 0.0;
        std::size_t loss_count = 0;
        try {
            while (!episode.terminal()) {
                const Action a = select_action(online, episode.state_vector(), epsilon, explore_rng);
                buffer.push(episode.step(a));
                if (buffer.size() < config.batch_size) continue;

                for (std::size_t u = 0; u < config.updates_per_step; ++u) {
                const auto idx = buffer.sample_indices(config.batch_size, replay_rng);
                for (std::size_t b = 0; b < idx.size(); ++b) {
                    const auto& tr = buffer.at(idx[b]);
                    const double next_max = tr.terminal ? 0.0 : q_values(target, tr.next_state).max();
                    batch[b].state = tr.state;
                    batch[b].action = tr.action;
                    batch[b].target = bellman_target(tr.reward, next_max, tr.terminal, config.gamma);
                }
                loss_sum += gradient_step(online, adam, batch);
                ++loss_count;
                if (++result.log.gradient_steps % config.target_sync_every == 0) {
                    target = online;
                    ++result.log.target_syncs;
                }
                }
            }
        } catch (const DivergenceError& err) {
            throw TrainingError(std::string("training diverged: ") + err.what(), e);
        }

        const auto& log = episode.log();
        EpisodeSummary s;
        s.episode = e;
        s.domain = rt.data->name();
        s.user_id = search_case.user_id;
        s.outcome = log.outcome;
        s.turns = log.turns();
        s.total_reward = log.total_reward();
        if (loss_count) s.mean_loss = loss_sum / static_cast<double>(loss_count);
        s.epsilon = epsilon;
        if (on_episode) on_episode(s);
        result.log.episodes.push_back(std::move(s));
    }
    return result;
}

}  // namespace clarion

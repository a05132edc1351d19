#pragma once

#include "clarion/encoder.hpp"
#include "clarion/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clarion {

enum class Action : int { Ask = 0, Answer = 1 };

const char* action_name(Action a);

/// Dueling Q-network: one shared ReLU hidden layer feeding a state-value
/// head and a two-action advantage head. Q = V + A - mean(A).
///
/// Parameters live in one flat vector, laid out as
///   trunk      W1 (hidden x input, row-major), b1 (hidden)
///   value      wv (hidden), bv (1)
///   advantage  Wa (2 x hidden, row-major), ba (2)
class QNetwork {
public:
    QNetwork() = default;
    /// Zero-initialized network (every weight and bias 0).
    QNetwork(std::size_t embed_dim, std::size_t score_width, std::size_t hidden);

    std::size_t embed_dim() const { return embed_dim_; }
    std::size_t score_width() const { return score_width_; }
    std::size_t input_dim() const { return 2 * embed_dim_ + score_width_; }
    std::size_t hidden() const { return hidden_; }
    std::size_t parameter_count() const { return params_.size(); }

    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    // Offsets into the flat parameter vector.
    std::size_t w1_offset() const { return 0; }
    std::size_t b1_offset() const { return hidden_ * input_dim(); }
    std::size_t wv_offset() const { return b1_offset() + hidden_; }
    std::size_t bv_offset() const { return wv_offset() + hidden_; }
    std::size_t wa_offset() const { return bv_offset() + 1; }
    std::size_t ba_offset() const { return wa_offset() + 2 * hidden_; }

    friend bool operator==(const QNetwork&, const QNetwork&) = default;

private:
    std::size_t embed_dim_ = 0;
    std::size_t score_width_ = 0;
    std::size_t hidden_ = 0;
    std::vector<double> params_;
};

/// Glorot-uniform weights, zero biases, deterministic per seed.
QNetwork init_network(std::size_t embed_dim, std::size_t score_width, std::size_t hidden, std::uint64_t seed);

struct QValues {
    double ask = 0.0;
    double answer = 0.0;
    double value = 0.0;  // V(s)

    double of(Action a) const { return a == Action::Ask ? ask : answer; }
    double max() const { return ask >= answer ? ask : answer; }
};

QValues q_values(const QNetwork& net, std::span<const double> state);
inline QValues q_values(const QNetwork& net, const State& state) { return q_values(net, state.concatenated()); }

/// sigmoid(Q(ask) - Q(answer)); >= 0.5 exactly when Ask is greedy.
double ask_value(const QNetwork& net, std::span<const double> state);
inline double ask_value(const QNetwork& net, const State& state) { return ask_value(net, state.concatenated()); }

/// Greedy choice with ties resolved to Ask.
Action greedy_action(const QValues& q);

/// Epsilon-greedy. The exploration coin is always drawn; a second draw picks
/// the random action only when exploring.
Action select_action(const QNetwork& net, std::span<const double> state, double epsilon, Rng& rng);

struct TrainingSample {
    std::vector<double> state;
    Action action = Action::Ask;
    double target = 0.0;
};

class AdamOptimizer {
public:
    explicit AdamOptimizer(double lr = 1e-4, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    double lr() const { return lr_; }
    std::uint64_t steps() const { return t_; }
    void step(std::span<double> params, std::span<const double> grad);

private:
    double lr_, beta1_, beta2_, eps_;
    std::uint64_t t_ = 0;
    std::vector<double> m_, v_;
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mean squared TD error over the batch and its exact gradient, without
/// touching the network.
double loss_and_gradient(const QNetwork& net, std::span<const TrainingSample> batch, std::vector<double>& grad);

/// One Adam step on the mean squared error between Q(s,a) and the targets.
/// Returns the loss measured before the update.
double gradient_step(QNetwork& net, AdamOptimizer& optimizer, std::span<const TrainingSample> batch);

void save_network(const QNetwork& net, std::ostream& out);
QNetwork load_network(std::istream& in);
void save_network(const QNetwork& net, const std::filesystem::path& path);
QNetwork load_network(const std::filesystem::path& path);

}  // namespace clarion

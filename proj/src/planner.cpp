#include "clarion/planner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace clarion {

const char* action_name(Action a) { return a == Action::Ask ? "ask" : "answer"; }

QNetwork::QNetwork(std::size_t embed_dim, std::size_t score_width, std::size_t hidden)
    : embed_dim_(embed_dim), score_width_(score_width), hidden_(hidden) {
    if (embed_dim == 0 || score_width == 0 || hidden == 0)
        throw std::invalid_argument("network dimensions must be positive");
    params_.assign(hidden * input_dim() + hidden + hidden + 1 + 2 * hidden + 2, 0.0);
}

QNetwork init_network(std::size_t embed_dim, std::size_t score_width, std::size_t hidden, std::uint64_t seed) {
    QNetwork net(embed_dim, score_width, hidden);
    Rng rng(seed);
    auto p = net.parameters();
    auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in, std::size_t fan_out) {
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (std::size_t i = 0; i < count; ++i) p[offset + i] = rng.uniform(-limit, limit);
    };
    const std::size_t in = net.input_dim();
    fill(net.w1_offset(), hidden * in, in, hidden);
    fill(net.wv_offset(), hidden, hidden, 1);
    fill(net.wa_offset(), 2 * hidden, hidden, 2);
    return net;
}

namespace {

struct Forward {
    std::vector<double> pre;  // hidden pre-activations
    std::vector<double> act;  // ReLU outputs
    double value = 0.0;
    double adv[2] = {0.0, 0.0};
};

void forward(const QNetwork& net, std::span<const double> state, Forward& f) {
    if (state.size() != net.input_dim())
        throw std::invalid_argument("state dimension " + std::to_string(state.size()) + " does not match network " +
                                    std::to_string(net.input_dim()));
    const auto p = net.parameters();
    const std::size_t h = net.hidden();
    const std::size_t in = net.input_dim();
    f.pre.assign(h, 0.0);
    f.act.assign(h, 0.0);
    const double* w1 = p.data() + net.w1_offset();
    const double* b1 = p.data() + net.b1_offset();
    for (std::size_t j = 0; j < h; ++j) {
        double z = b1[j];
        const double* row = w1 + j * in;
        for (std::size_t i = 0; i < in; ++i) z += row[i] * state[i];
        f.pre[j] = z;
        f.act[j] = z > 0.0 ? z : 0.0;
    }
    const double* wv = p.data() + net.wv_offset();
    const double* wa = p.data() + net.wa_offset();
    const double* ba = p.data() + net.ba_offset();
    double v = p[net.bv_offset()];
    double a0 = ba[0];
    double a1 = ba[1];
    for (std::size_t j = 0; j < h; ++j) {
        v += wv[j] * f.act[j];
        a0 += wa[j] * f.act[j];
        a1 += wa[h + j] * f.act[j];
    }
    f.value = v;
    f.adv[0] = a0;
    f.adv[1] = a1;
}

QValues combine(const Forward& f) {
    const double mean_adv = 0.5 * (f.adv[0] + f.adv[1]);
    return {f.value + f.adv[0] - mean_adv, f.value + f.adv[1] - mean_adv, f.value};
}

}  // namespace

QValues q_values(const QNetwork& net, std::span<const double> state) {
    Forward f;
    forward(net, state, f);
    return combine(f);
}

double ask_value(const QNetwork& net, std::span<const double> state) {
    const auto q = q_values(net, state);
    return 1.0 / (1.0 + std::exp(-(q.ask - q.answer)));
}

Action greedy_action(const QValues& q) { return q.ask >= q.answer ? Action::Ask : Action::Answer; }

Action select_action(const QNetwork& net, std::span<const double> state, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (rng.uniform01() < epsilon) return rng.uniform_index(2) == 0 ? Action::Ask : Action::Answer;
    return greedy_action(q_values(net, state));
}

void AdamOptimizer::step(std::span<double> params, std::span<const double> grad) {
    if (m_.size() != params.size()) {
        m_.assign(params.size(), 0.0);
        v_.assign(params.size(), 0.0);
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
        const double mhat = m_[i] / c1;
        const double vhat = v_[i] / c2;
        params[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
}

double loss_and_gradient(const QNetwork& net, std::span<const TrainingSample> batch, std::vector<double>& grad) {
    if (batch.empty()) throw std::invalid_argument("gradient step on an empty batch");
    grad.assign(net.parameter_count(), 0.0);
    const auto p = net.parameters();
    const std::size_t h = net.hidden();
    const std::size_t in = net.input_dim();
    const double scale = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    Forward f;
    std::vector<double> dact(h);
    for (const auto& sample : batch) {
        if (!std::isfinite(sample.target)) throw DivergenceError("non-finite training target");
        forward(net, sample.state, f);
        const auto q = combine(f);
        const double err = q.of(sample.action) - sample.target;
        loss += err * err * scale;

        // dQ_a/dV = 1, dQ_a/dA_a = 1/2, dQ_a/dA_other = -1/2.
        const double g = 2.0 * err * scale;
        const int a = static_cast<int>(sample.action);
        const double dv = g;
        double da[2];
        da[a] = 0.5 * g;
        da[1 - a] = -0.5 * g;

        double* gwv = grad.data() + net.wv_offset();
        double* gwa = grad.data() + net.wa_offset();
        double* gba = grad.data() + net.ba_offset();
        grad[net.bv_offset()] += dv;
        gba[0] += da[0];
        gba[1] += da[1];
        const double* wv = p.data() + net.wv_offset();
        const double* wa = p.data() + net.wa_offset();
        for (std::size_t j = 0; j < h; ++j) {
            gwv[j] += dv * f.act[j];
            gwa[j] += da[0] * f.act[j];
            gwa[h + j] += da[1] * f.act[j];
            dact[j] = f.pre[j] > 0.0 ? dv * wv[j] + da[0] * wa[j] + da[1] * wa[h + j] : 0.0;
        }
        double* gw1 = grad.data() + net.w1_offset();
        double* gb1 = grad.data() + net.b1_offset();
        for (std::size_t j = 0; j < h; ++j) {
            if (dact[j] == 0.0) continue;
            gb1[j] += dact[j];
            double* row = gw1 + j * in;
            for (std::size_t i = 0; i < in; ++i) row[i] += dact[j] * sample.state[i];
        }
    }
    return loss;
}

double gradient_step(QNetwork& net, AdamOptimizer& optimizer, std::span<const TrainingSample> batch) {
    std::vector<double> grad;
    const double loss = loss_and_gradient(net, batch, grad);
    if (!std::isfinite(loss)) throw DivergenceError("non-finite loss");
    optimizer.step(net.parameters(), grad);
    return loss;
}

namespace {
constexpr const char* kCheckpointMagic = "clarion-qnet";
}

void save_network(const QNetwork& net, std::ostream& out) {
    out << kCheckpointMagic << " v1 " << net.embed_dim() << ' ' << net.score_width() << ' ' << net.hidden() << '\n';
    char buf[40];
    for (double x : net.parameters()) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        out << buf;
    }
}

QNetwork load_network(std::istream& in) {
    std::string magic, version;
    std::size_t d = 0, k = 0, h = 0;
    if (!(in >> magic >> version >> d >> k >> h) || magic != kCheckpointMagic || version != "v1")
        throw std::runtime_error("not a clarion-qnet v1 checkpoint");
    QNetwork net(d, k, h);
    auto p = net.parameters();
    std::string tok;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(in >> tok)) throw std::runtime_error("checkpoint truncated at parameter " + std::to_string(i));
        char* end = nullptr;
        p[i] = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw std::runtime_error("bad checkpoint number \"" + tok + "\"");
    }
    if (in >> tok) throw std::runtime_error("trailing data in checkpoint");
    return net;
}

void save_network(const QNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
    save_network(net, out);
}

QNetwork load_network(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
    return load_network(in);
}

}  // namespace clarion

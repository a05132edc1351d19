#include "clarion/io.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace clarion {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_number(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    if (ec != std::errc()) throw std::runtime_error("cannot format number");
    return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string episode_to_json(const EpisodeLog& log) {
    ordered_json records = ordered_json::array();
    for (const auto& r : log.records) {
        ordered_json rec{{"turn", r.turn},
                         {"action", action_name(r.action)},
                         {"reward", r.reward},
                         {"rank_before", r.rank_before},
                         {"rank_after", r.rank_after}};
        rec["ask_value"] = r.ask_value ? ordered_json(*r.ask_value) : ordered_json(nullptr);
        if (r.action == Action::Ask) {
            rec["question"] = r.question;
            rec["gain"] = r.gain ? ordered_json(*r.gain) : ordered_json(nullptr);
        } else {
            rec["presented"] = r.presented;
        }
        records.push_back(std::move(rec));
    }
    ordered_json j{{"domain", log.domain},
                   {"user_id", log.user_id},
                   {"target_doc_id", log.target_doc_id},
                   {"initial_rank", log.initial_rank},
                   {"outcome", outcome_name(log.outcome)}};
    j["success_turn"] = log.success_turn ? ordered_json(*log.success_turn) : ordered_json(nullptr);
    j["records"] = std::move(records);
    return j.dump();
}

EpisodeLog episode_from_json(const std::string& line) {
    const auto j = json::parse(line);
    EpisodeLog log;
    log.domain = j.at("domain").get<std::string>();
    log.user_id = j.at("user_id").get<std::string>();
    log.target_doc_id = j.at("target_doc_id").get<std::string>();
    log.initial_rank = j.at("initial_rank").get<std::size_t>();
    const auto outcome = j.at("outcome").get<std::string>();
    if (outcome == "success") log.outcome = Outcome::Success;
    else if (outcome == "max_turns") log.outcome = Outcome::MaxTurns;
    else throw std::runtime_error("unknown outcome \"" + outcome + "\"");
    if (!j.at("success_turn").is_null()) log.success_turn = j.at("success_turn").get<int>();
    for (const auto& rj : j.at("records")) {
        TurnRecord r;
        r.turn = rj.at("turn").get<int>();
        const auto a = rj.at("action").get<std::string>();
        if (a == "ask") r.action = Action::Ask;
        else if (a == "answer") r.action = Action::Answer;
        else throw std::runtime_error("unknown action \"" + a + "\"");
        r.reward = rj.at("reward").get<double>();
        r.rank_before = rj.at("rank_before").get<std::size_t>();
        r.rank_after = rj.at("rank_after").get<std::size_t>();
        if (auto it = rj.find("ask_value"); it != rj.end() && !it->is_null()) r.ask_value = it->get<double>();
        if (auto it = rj.find("question"); it != rj.end()) r.question = it->get<std::string>();
        if (auto it = rj.find("gain"); it != rj.end() && !it->is_null()) r.gain = it->get<long long>();
        if (auto it = rj.find("presented"); it != rj.end()) r.presented = it->get<std::vector<std::string>>();
        log.records.push_back(std::move(r));
    }
    return log;
}

void write_episodes(const std::vector<EpisodeLog>& logs, const std::filesystem::path& path) {
    std::string out;
    for (const auto& l : logs) out += episode_to_json(l) + "\n";
    write_text(path, out);
}

std::vector<EpisodeLog> read_episodes(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::vector<EpisodeLog> logs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            logs.push_back(episode_from_json(line));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return logs;
}

std::string summary_to_json(const EpisodeSummary& s) {
    ordered_json j{{"episode", s.episode},       {"domain", s.domain},
                   {"user_id", s.user_id},       {"outcome", outcome_name(s.outcome)},
                   {"turns", s.turns},           {"total_reward", s.total_reward}};
    j["mean_loss"] = s.mean_loss ? ordered_json(*s.mean_loss) : ordered_json(nullptr);
    j["epsilon"] = s.epsilon;
    return j.dump();
}

void write_training_log(const TrainingLog& log, const std::filesystem::path& path) {
    std::string out;
    for (const auto& s : log.episodes) out += summary_to_json(s) + "\n";
    write_text(path, out);
}

std::vector<EpisodeSummary> read_training_log(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::vector<EpisodeSummary> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = json::parse(line);
        EpisodeSummary s;
        s.episode = j.at("episode").get<std::size_t>();
        s.domain = j.at("domain").get<std::string>();
        s.user_id = j.at("user_id").get<std::string>();
        s.outcome = j.at("outcome").get<std::string>() == "success" ? Outcome::Success : Outcome::MaxTurns;
        s.turns = j.at("turns").get<int>();
        s.total_reward = j.at("total_reward").get<double>();
        if (!j.at("mean_loss").is_null()) s.mean_loss = j.at("mean_loss").get<double>();
        s.epsilon = j.at("epsilon").get<double>();
        out.push_back(std::move(s));
    }
    return out;
}

namespace {
ordered_json optional_series(const std::vector<std::optional<double>>& v) {
    ordered_json a = ordered_json::array();
    for (const auto& x : v) a.push_back(x ? ordered_json(*x) : ordered_json(nullptr));
    return a;
}
}  // namespace

std::string report_to_json(const MetricsReport& r) {
    ordered_json sr = ordered_json::object();
    for (const auto& [k, v] : r.sr_at) sr[std::to_string(k)] = v;
    ordered_json j{{"episodes", r.episodes}, {"recall_at_5", r.recall_at_5}, {"sr_at", sr}, {"avg_turns", r.avg_turns}};
    j["diversity"] = r.diversity ? ordered_json(*r.diversity) : ordered_json(nullptr);
    j["dtw_to_reference"] = r.dtw_to_reference ? ordered_json(*r.dtw_to_reference) : ordered_json(nullptr);
    j["gain_per_turn"] = optional_series(r.gain_per_turn);
    j["ask_prob"] = r.trajectory.ask_prob;
    j["active_counts"] = r.trajectory.counts;
    return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
    const auto j = json::parse(text);
    MetricsReport r;
    r.episodes = j.at("episodes").get<std::size_t>();
    r.recall_at_5 = j.at("recall_at_5").get<double>();
    for (const auto& [k, v] : j.at("sr_at").items()) r.sr_at[std::stoi(k)] = v.get<double>();
    r.avg_turns = j.at("avg_turns").get<double>();
    if (!j.at("diversity").is_null()) r.diversity = j.at("diversity").get<double>();
    if (!j.at("dtw_to_reference").is_null()) r.dtw_to_reference = j.at("dtw_to_reference").get<double>();
    for (const auto& g : j.at("gain_per_turn"))
        r.gain_per_turn.push_back(g.is_null() ? std::nullopt : std::optional<double>(g.get<double>()));
    r.trajectory.ask_prob = j.at("ask_prob").get<std::vector<double>>();
    r.trajectory.counts = j.at("active_counts").get<std::vector<std::size_t>>();
    return r;
}

void write_series_csv(const std::vector<RunSeries>& series, const std::string& value_column,
                      const std::filesystem::path& path) {
    std::string out = "run,turn," + value_column + "\n";
    for (const auto& s : series) {
        if (s.run.find_first_of(",\n\"") != std::string::npos)
            throw std::invalid_argument("run name \"" + s.run + "\" cannot be written to CSV");
        for (std::size_t t = 0; t < s.values.size(); ++t) {
            out += s.run + "," + std::to_string(t + 1) + ",";
            if (s.values[t]) out += format_number(*s.values[t]);
            out += "\n";
        }
    }
    write_text(path, out);
}

std::vector<RunSeries> read_series_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text(path));
    std::string line;
    std::getline(in, line);  // header
    std::vector<RunSeries> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error(path.string() + ": malformed CSV row \"" + line + "\"");
        const auto run = line.substr(0, c1);
        const auto turn = std::stoul(line.substr(c1 + 1, c2 - c1 - 1));
        const auto cell = line.substr(c2 + 1);
        if (out.empty() || out.back().run != run) out.push_back({run, {}});
        auto& values = out.back().values;
        if (values.size() < turn) values.resize(turn);
        if (!cell.empty()) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc() || ptr != cell.data() + cell.size())
                throw std::runtime_error(path.string() + ": bad number \"" + cell + "\"");
            values[turn - 1] = v;
        }
    }
    return out;
}

std::string sha256_hex(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

}  // namespace clarion

// clarion: synthesize domains, train the ask/answer planner across domains,
// evaluate checkpoints or fixed baselines, and analyze strategy trajectories.
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include "clarion/corpus.hpp"
#include "clarion/encoder.hpp"
#include "clarion/io.hpp"
#include "clarion/metrics.hpp"
#include "clarion/policy.hpp"
#include "clarion/synth.hpp"
#include "clarion/trainer.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace clarion;
using ordered_json = nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Collects what a run did and writes manifest.json on scope exit, whether
/// the command succeeded or not.
class Manifest {
public:
    Manifest(std::string command, std::vector<std::string> argv)
        : start_(std::chrono::steady_clock::now()) {
        doc_["command"] = std::move(command);
        doc_["argv"] = std::move(argv);
        doc_["datasets"] = ordered_json::array();
        doc_["outputs"] = ordered_json::array();
    }

    void set_out(const fs::path& dir) { out_ = dir; }
    void set(const std::string& key, ordered_json value) { doc_[key] = std::move(value); }
    void dataset(const fs::path& path) { doc_["datasets"].push_back({{"path", path.string()}, {"sha256", sha256_file(path)}}); }
    void output(const fs::path& path) { doc_["outputs"].push_back(path.filename().string()); }
    void config(const TrainConfig& cfg) {
        ordered_json c = ordered_json::object();
        for (const auto& [k, v] : config_entries(cfg)) c[k] = v;
        doc_["config"] = std::move(c);
    }
    void fail(const std::string& why) {
        doc_["status"] = "failed";
        doc_["error"] = why;
    }

    void write() {
        if (out_.empty()) return;
        if (!doc_.contains("status")) doc_["status"] = "ok";
        doc_["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::error_code ec;
        fs::create_directories(out_, ec);
        try {
            write_text(out_ / "manifest.json", doc_.dump(2) + "\n");
        } catch (const std::exception& e) {
            std::cerr << "warning: could not write manifest: " << e.what() << "\n";
        }
    }

private:
    ordered_json doc_;
    fs::path out_;
    std::chrono::steady_clock::time_point start_;
};

TrainConfig resolve_config(const std::optional<fs::path>& config_path, const std::vector<std::string>& overrides,
                           std::optional<std::uint64_t> seed) {
    TrainConfig cfg;
    if (config_path) cfg = load_config(*config_path);
    for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got \"" + kv + "\"");
        apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
}

DomainDataset load_checked(const fs::path& path, Manifest& manifest) {
    if (!fs::exists(path)) throw DataError("dataset file not found: " + path.string());
    auto d = load_domain(path);
    manifest.dataset(path);
    return d;
}

struct SynthOptions {
    std::string profile;
    std::string name;
    std::size_t docs = 300;
    std::size_t cases = 200;
    std::size_t facets = 2;
    std::optional<std::uint64_t> vocab_seed;
    std::uint64_t seed = 0;
    fs::path out;
};

int run_synth(const SynthOptions& o) {
    SynthProfile p;
    p.helpfulness = *parse_helpfulness(o.profile);
    p.name = o.name.empty() ? o.profile : o.name;
    p.vocabulary_seed = o.vocab_seed.value_or(o.seed);
    p.n_docs = o.docs;
    p.n_cases = o.cases;
    p.facet_count = o.facets;
    const auto d = synth_domain(p, o.seed);
    if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
    save_domain(d, o.out);
    std::cout << "wrote " << o.out.string() << ": " << d.documents().size() << " documents, " << d.cases().size()
              << " cases (" << d.splits().train.size() << "/" << d.splits().valid.size() << "/"
              << d.splits().test.size() << "), ambiguous " << ambiguity_proportion(d) << "\n";
    return 0;
}

struct TrainOptions {
    std::vector<fs::path> domains;
    std::optional<fs::path> config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    fs::path out;
    bool quiet = false;
};

int run_train(const TrainOptions& o, Manifest& manifest) {
    manifest.set_out(o.out);
    const auto cfg = resolve_config(o.config, o.overrides, o.seed);
    manifest.config(cfg);
    manifest.set("seed", cfg.seed);
    std::vector<DomainDataset> domains;
    for (const auto& p : o.domains) domains.push_back(load_checked(p, manifest));
    fs::create_directories(o.out);

    std::size_t successes = 0;
    auto progress = [&](const EpisodeSummary& s) {
        if (s.outcome == Outcome::Success) ++successes;
        if (!o.quiet && (s.episode + 1) % 200 == 0)
            std::cerr << "episode " << s.episode + 1 << "/" << cfg.episodes << " success rate so far "
                      << static_cast<double>(successes) / static_cast<double>(s.episode + 1) << "\n";
    };
    const auto result = train_mdt(domains, cfg, progress);

    const auto ckpt = o.out / "checkpoint.qnet";
    save_network(result.network, ckpt);
    write_training_log(result.log, o.out / "train.log.jsonl");
    write_text(o.out / "config.txt", format_config(cfg));
    manifest.set("checkpoint", ckpt.string());
    manifest.set("gradient_steps", result.log.gradient_steps);
    for (const char* f : {"checkpoint.qnet", "train.log.jsonl", "config.txt"}) manifest.output(o.out / f);
    std::cout << "trained " << cfg.episodes << " episodes over " << domains.size() << " domain(s), "
              << result.log.gradient_steps << " gradient steps; checkpoint " << ckpt.string() << "\n";
    return 0;
}

struct EvalOptions {
    std::optional<fs::path> checkpoint;
    std::optional<std::string> baseline;
    int ask_first_n = 1;
    fs::path domain;
    std::string split = "test";
    std::optional<fs::path> config;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    fs::path out;
    bool serial = false;
};

int run_eval(const EvalOptions& o, Manifest& manifest) {
    manifest.set_out(o.out);
    if (o.checkpoint.has_value() == o.baseline.has_value())
        throw UsageError("eval needs exactly one of --checkpoint or --baseline");

    auto config_path = o.config;
    if (!config_path && o.checkpoint && fs::exists(o.checkpoint->parent_path() / "config.txt"))
        config_path = o.checkpoint->parent_path() / "config.txt";
    auto cfg = resolve_config(config_path, o.overrides, o.seed);

    std::unique_ptr<Policy> policy;
    if (o.checkpoint) {
        if (!fs::exists(*o.checkpoint)) throw std::runtime_error("checkpoint not found: " + o.checkpoint->string());
        auto net = load_network(*o.checkpoint);
        cfg.encoder_dim = net.embed_dim();
        cfg.score_width = static_cast<int>(net.score_width());
        cfg.hidden = net.hidden();
        manifest.set("checkpoint", o.checkpoint->string());
        manifest.set("checkpoint_sha256", sha256_file(*o.checkpoint));
        policy = std::make_unique<PlannerPolicy>(std::move(net));
    } else {
        policy = make_baseline(*o.baseline, o.ask_first_n);
    }
    manifest.config(cfg);
    manifest.set("seed", cfg.seed);
    manifest.set("policy", policy->name());

    const auto domain = load_checked(o.domain, manifest);
    std::vector<SearchCase> cases;
    if (o.split == "all") {
        cases = domain.cases();
    } else {
        cases = domain.cases_in(*parse_split(o.split));
        if (cases.empty()) throw DataError("domain " + domain.name() + " has no cases in split " + o.split);
    }

    const auto index = build_index(domain.documents(), cfg.bm25());
    const HashingEncoder encoder(cfg.encoder_dim);
    const ScriptedQuestionGenerator questions;
    const ScriptedUserSimulator user;
    const Environment env{domain, index, encoder, questions, user, cfg.env()};
    const auto logs = o.serial ? evaluate_serial(env, cases, *policy) : evaluate(env, cases, *policy);

    const auto report = build_report(logs, cfg.max_turns);
    fs::create_directories(o.out);
    write_episodes(logs, o.out / "episodes.jsonl");
    write_text(o.out / "metrics.json", report_to_json(report));
    const std::string run = policy->name() + "@" + domain.name() + "/" + o.split;
    std::vector<std::optional<double>> traj(report.trajectory.ask_prob.begin(), report.trajectory.ask_prob.end());
    write_series_csv({{run, traj}}, "ask_prob", o.out / "trajectory.csv");
    write_series_csv({{run, report.gain_per_turn}}, "mean_gain", o.out / "gains.csv");
    write_text(o.out / "config.txt", format_config(cfg));
    for (const char* f : {"episodes.jsonl", "metrics.json", "trajectory.csv", "gains.csv", "config.txt"})
        manifest.output(o.out / f);

    std::cout << policy->name() << " on " << domain.name() << "/" << o.split << " (" << logs.size()
              << " episodes): Recall@5 " << report.recall_at_5 << ", SR@3 " << report.sr_at.at(std::min(3, cfg.max_turns))
              << ", SR@5 " << report.sr_at.at(std::min(5, cfg.max_turns)) << ", AvgT " << report.avg_turns << "\n";
    return 0;
}

struct AnalyzeOptions {
    std::vector<fs::path> runs;
    std::optional<fs::path> reference;
    fs::path out;
};

struct LoadedRun {
    std::string name;
    std::vector<EpisodeLog> logs;
    int max_turns = 10;
};

LoadedRun load_run(const fs::path& dir) {
    LoadedRun r;
    r.name = dir.filename().string();
    if (r.name.empty()) r.name = dir.parent_path().filename().string();
    if (!fs::exists(dir / "episodes.jsonl")) throw DataError("no episodes.jsonl in run directory " + dir.string());
    r.logs = read_episodes(dir / "episodes.jsonl");
    if (r.logs.empty()) throw DataError("run " + dir.string() + " has no episodes");
    if (fs::exists(dir / "config.txt")) r.max_turns = load_config(dir / "config.txt").max_turns;
    return r;
}

int run_analyze(const AnalyzeOptions& o, Manifest& manifest) {
    manifest.set_out(o.out);
    if (o.runs.empty() || (o.runs.size() < 2 && !o.reference))
        throw UsageError("analyze needs at least 2 runs, or --reference");

    std::vector<LoadedRun> runs;
    for (const auto& dir : o.runs) runs.push_back(load_run(dir));
    std::optional<LoadedRun> reference;
    if (o.reference) reference = load_run(*o.reference);

    std::vector<StrategyTrajectory> trajectories;
    std::vector<RunSeries> traj_csv, gain_csv;
    ordered_json per_run = ordered_json::array();
    std::optional<StrategyTrajectory> ref_traj;
    if (reference) ref_traj = ask_trajectory(reference->logs, reference->max_turns);

    for (const auto& r : runs) {
        auto traj = ask_trajectory(r.logs, r.max_turns);
        auto gains = mean_gain_per_turn(r.logs, r.max_turns);
        ordered_json entry{{"run", r.name},
                           {"episodes", r.logs.size()},
                           {"sr_at_5", sr_at_k(r.logs, 5)},
                           {"avg_turns", avg_turns(r.logs, r.max_turns)},
                           {"ask_prob", traj.ask_prob}};
        if (ref_traj) entry["dtw_to_reference"] = dtw_to_reference(traj, *ref_traj);
        per_run.push_back(std::move(entry));
        traj_csv.push_back({r.name, {traj.ask_prob.begin(), traj.ask_prob.end()}});
        gain_csv.push_back({r.name, gains});
        trajectories.push_back(std::move(traj));
    }

    ordered_json doc{{"runs", per_run}};
    doc["diversity"] = trajectories.size() >= 2 ? ordered_json(strategy_diversity(trajectories)) : ordered_json(nullptr);
    doc["pairs"] = trajectories.size() * (trajectories.size() - 1) / 2;
    if (reference) doc["reference"] = reference->name;

    fs::create_directories(o.out);
    write_text(o.out / "analysis.json", doc.dump(2) + "\n");
    write_series_csv(traj_csv, "ask_prob", o.out / "trajectory.csv");
    write_series_csv(gain_csv, "mean_gain", o.out / "gains.csv");
    for (const char* f : {"analysis.json", "trajectory.csv", "gains.csv"}) manifest.output(o.out / f);

    if (!doc["diversity"].is_null()) std::cout << "strategy diversity " << doc["diversity"].get<double>() << "\n";
    for (const auto& e : per_run) {
        std::cout << e["run"].get<std::string>() << ": SR@5 " << e["sr_at_5"].get<double>();
        if (e.contains("dtw_to_reference")) std::cout << ", DTW to reference " << e["dtw_to_reference"].get<double>();
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Train and evaluate clarification-question policies for conversational search"};
    app.require_subcommand(1);
    std::vector<std::string> args(argv, argv + argc);

    SynthOptions so;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic domain dataset");
    synth->add_option("--profile", so.profile, "ask-helps | ask-hurts | mixed")
        ->required()
        ->check(CLI::IsMember({"ask-helps", "ask-hurts", "mixed"}));
    synth->add_option("--name", so.name, "Domain name (defaults to the profile)");
    synth->add_option("--docs", so.docs, "Number of documents")->capture_default_str();
    synth->add_option("--cases", so.cases, "Number of search cases")->capture_default_str();
    synth->add_option("--facets", so.facets, "Facets per ambiguous case")->capture_default_str();
    synth->add_option("--vocab-seed", so.vocab_seed, "Vocabulary block seed (defaults to --seed)");
    synth->add_option("--seed", so.seed, "Generation seed")->capture_default_str();
    synth->add_option("--out", so.out, "Output dataset file")->required();

    TrainOptions to;
    auto* train = app.add_subcommand("train", "Multi-domain training of the planner");
    train->add_option("--domains", to.domains, "Domain dataset files")->required();
    train->add_option("--config", to.config, "key=value config file");
    train->add_option("--set", to.overrides, "Config override key=value (repeatable)");
    train->add_option("--seed", to.seed, "Seed (overrides the config)");
    train->add_option("--out", to.out, "Run directory")->required();
    train->add_flag("--quiet", to.quiet, "No progress output");

    EvalOptions eo;
    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or a fixed baseline on one domain");
    auto* ck = eval->add_option("--checkpoint", eo.checkpoint, "Planner checkpoint");
    auto* bl = eval->add_option("--baseline", eo.baseline, "always-ask | never-ask | ask-first-n")
                   ->check(CLI::IsMember({"always-ask", "never-ask", "ask-first-n"}));
    ck->excludes(bl);
    eval->add_option("--n", eo.ask_first_n, "Turns to ask for ask-first-n")->capture_default_str();
    eval->add_option("--domain", eo.domain, "Domain dataset file")->required();
    eval->add_option("--split", eo.split, "train | valid | test | all")
        ->check(CLI::IsMember({"train", "valid", "test", "all"}))
        ->capture_default_str();
    eval->add_option("--config", eo.config, "key=value config file");
    eval->add_option("--set", eo.overrides, "Config override key=value (repeatable)");
    eval->add_option("--seed", eo.seed, "Seed recorded with the run");
    eval->add_option("--out", eo.out, "Output directory")->required();
    eval->add_flag("--serial", eo.serial, "Roll out episodes on one thread");

    AnalyzeOptions ao;
    auto* analyze = app.add_subcommand("analyze", "Strategy diversity, DTW to a reference and per-turn gains");
    analyze->add_option("--runs", ao.runs, "Evaluation run directories")->required();
    analyze->add_option("--reference", ao.reference, "Reference run directory (e.g. in-domain)");
    analyze->add_option("--out", ao.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    auto* sub = app.get_subcommands().front();
    Manifest manifest(sub->get_name(), args);
    try {
        int rc = 0;
        if (sub == synth) rc = run_synth(so);
        else if (sub == train) rc = run_train(to, manifest);
        else if (sub == eval) rc = run_eval(eo, manifest);
        else rc = run_analyze(ao, manifest);
        manifest.write();
        return rc;
    } catch (const UsageError& e) {
        manifest.fail(e.what());
        manifest.write();
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        manifest.fail(e.what());
        manifest.write();
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#pragma once

#include "clarion/environment.hpp"
#include "clarion/metrics.hpp"
#include "clarion/trainer.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace clarion {

std::string episode_to_json(const EpisodeLog& log);
EpisodeLog episode_from_json(const std::string& line);

void write_episodes(const std::vector<EpisodeLog>& logs, const std::filesystem::path& path);
std::vector<EpisodeLog> read_episodes(const std::filesystem::path& path);

std::string summary_to_json(const EpisodeSummary& s);
void write_training_log(const TrainingLog& log, const std::filesystem::path& path);
std::vector<EpisodeSummary> read_training_log(const std::filesystem::path& path);

std::string report_to_json(const MetricsReport& report);
MetricsReport report_from_json(const std::string& text);

/// One named series per run, written as long-format CSV rows
/// `run,turn,value`; empty values stand for turns with no data.
struct RunSeries {
    std::string run;
    std::vector<std::optional<double>> values;  // index 0 is turn 1
};

void write_series_csv(const std::vector<RunSeries>& series, const std::string& value_column,
                      const std::filesystem::path& path);
std::vector<RunSeries> read_series_csv(const std::filesystem::path& path);

/// Shortest decimal text that round-trips the double.
std::string format_number(double x);

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(const std::string& bytes);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace clarion

#pragma once

#include "clarion/corpus.hpp"
#include "clarion/environment.hpp"
#include "clarion/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

namespace testing {

inline clarion::DomainDataset fish_domain() {
    using clarion::Document;
    clarion::SearchCase c;
    c.user_id = "u1";
    c.target_doc_id = "d1";
    c.intent_text = "a red fish";
    c.initial_query = "fish";
    c.facets = {{"red"}};
    return clarion::DomainDataset("fish", {Document::make("d1", "red fish"), Document::make("d2", "blue fish")}, {c});
}

// Exhaustive search over monotone alignments. Exponential; short inputs only.
inline double dtw_brute(std::span<const double> a, std::span<const double> b, std::size_t i = 0, std::size_t j = 0) {
    const double here = std::abs(a[i] - b[j]);
    if (i + 1 == a.size() && j + 1 == b.size()) return here;
    double best = std::numeric_limits<double>::infinity();
    if (i + 1 < a.size()) best = std::min(best, dtw_brute(a, b, i + 1, j));
    if (j + 1 < b.size()) best = std::min(best, dtw_brute(a, b, i, j + 1));
    if (i + 1 < a.size() && j + 1 < b.size()) best = std::min(best, dtw_brute(a, b, i + 1, j + 1));
    return here + best;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("clarion-test-" + tag + "-" + std::to_string(::getpid()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
};

}  // namespace testing

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace clarion {

/// Raised for malformed or inconsistent dataset content. `line()` is the
/// 1-based source line when the error came from a file, 0 otherwise.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Document {
    std::string doc_id;
    std::string text;
    std::vector<std::string> tokens;  // derived from text

    static Document make(std::string doc_id, std::string text);
};

struct SearchCase {
    std::string user_id;
    std::string target_doc_id;
    std::string intent_text;
    std::string initial_query;
    std::vector<std::vector<std::string>> facets;
    bool ambiguous = false;
};

enum class Split { Train, Valid, Test };

const char* split_name(Split s);
std::optional<Split> parse_split(std::string_view name);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> valid;
    std::vector<std::size_t> test;

    bool empty() const { return train.empty() && valid.empty() && test.empty(); }
    const std::vector<std::size_t>& of(Split s) const;
};

class DomainDataset {
public:
    DomainDataset() = default;
    /// Validates referential integrity, id uniqueness and the split partition.
    DomainDataset(std::string name, std::vector<Document> documents, std::vector<SearchCase> cases,
                  SplitIndices splits = {});

    const std::string& name() const { return name_; }
    const std::vector<Document>& documents() const { return documents_; }
    const std::vector<SearchCase>& cases() const { return cases_; }
    const SplitIndices& splits() const { return splits_; }

    const Document* find_document(const std::string& doc_id) const;
    /// Cases of one split in index order.
    std::vector<SearchCase> cases_in(Split s) const;

    DomainDataset with_splits(SplitIndices splits) const;

private:
    std::string name_;
    std::vector<Document> documents_;
    std::vector<SearchCase> cases_;
    SplitIndices splits_;
    std::unordered_map<std::string, std::size_t> doc_pos_;
};

/// Reads a line-delimited dataset file. The domain name comes from a "meta"
/// record when present, otherwise from the file stem.
DomainDataset load_domain(const std::filesystem::path& path);
/// Parses dataset records from text; `source` is used in error messages.
DomainDataset parse_domain(const std::string& content, const std::string& default_name,
                           const std::string& source = "<memory>");
/// Serializes to the same line format load_domain reads.
std::string serialize_domain(const DomainDataset& dataset);
void save_domain(const DomainDataset& dataset, const std::filesystem::path& path);

/// Seeded 6:1:1 split; the remainder goes to train.
DomainDataset split_dataset(const DomainDataset& dataset, std::uint64_t seed);

double ambiguity_proportion(const DomainDataset& dataset);

}  // namespace clarion

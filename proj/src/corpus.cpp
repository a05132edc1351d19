#include "clarion/corpus.hpp"

#include "clarion/rng.hpp"
#include "clarion/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace clarion {

using nlohmann::json;

Document Document::make(std::string doc_id, std::string text) {
    Document d{std::move(doc_id), std::move(text), {}};
    d.tokens = tokenize(d.text);
    return d;
}

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Valid: return "valid";
        case Split::Test: return "test";
    }
    return "?";
}

std::optional<Split> parse_split(std::string_view name) {
    if (name == "train") return Split::Train;
    if (name == "valid") return Split::Valid;
    if (name == "test") return Split::Test;
    return std::nullopt;
}

const std::vector<std::size_t>& SplitIndices::of(Split s) const {
    switch (s) {
        case Split::Train: return train;
        case Split::Valid: return valid;
        case Split::Test: return test;
    }
    throw std::logic_error("bad split");
}

DomainDataset::DomainDataset(std::string name, std::vector<Document> documents, std::vector<SearchCase> cases,
                             SplitIndices splits)
    : name_(std::move(name)), documents_(std::move(documents)), cases_(std::move(cases)), splits_(std::move(splits)) {
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        if (!doc_pos_.emplace(documents_[i].doc_id, i).second)
            throw DataError("duplicate doc_id \"" + documents_[i].doc_id + "\"");
    }
    for (const auto& c : cases_) {
        if (!doc_pos_.count(c.target_doc_id))
            throw DataError("case " + c.user_id + " references unknown doc_id \"" + c.target_doc_id + "\"");
        if (tokenize(c.initial_query).empty())
            throw DataError("case " + c.user_id + " has an empty initial_query");
        for (const auto& f : c.facets)
            if (f.empty()) throw DataError("case " + c.user_id + " has an empty facet");
    }
    if (!splits_.empty()) {
        std::vector<int> seen(cases_.size(), 0);
        for (const auto* part : {&splits_.train, &splits_.valid, &splits_.test}) {
            for (auto idx : *part) {
                if (idx >= cases_.size()) throw DataError("split index out of range");
                if (seen[idx]++) throw DataError("split index assigned twice");
            }
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw DataError("splits do not cover every case");
    }
}

const Document* DomainDataset::find_document(const std::string& doc_id) const {
    auto it = doc_pos_.find(doc_id);
    return it == doc_pos_.end() ? nullptr : &documents_[it->second];
}

std::vector<SearchCase> DomainDataset::cases_in(Split s) const {
    std::vector<SearchCase> out;
    for (auto idx : splits_.of(s)) out.push_back(cases_[idx]);
    return out;
}

DomainDataset DomainDataset::with_splits(SplitIndices splits) const {
    return DomainDataset(name_, documents_, cases_, std::move(splits));
}

namespace {

std::string require_string(const json& rec, const char* key, std::size_t line) {
    auto it = rec.find(key);
    if (it == rec.end() || !it->is_string())
        throw DataError("line " + std::to_string(line) + ": missing string field \"" + key + "\"", line);
    return it->get<std::string>();
}

}  // namespace

DomainDataset parse_domain(const std::string& content, const std::string& default_name, const std::string& source) {
    std::string name = default_name;
    std::vector<Document> docs;
    std::vector<SearchCase> cases;
    std::vector<std::optional<Split>> labels;
    std::unordered_set<std::string> ids;

    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(source + ":" + std::to_string(lineno) + ": malformed record: " + e.what(), lineno);
        }
        if (!rec.is_object())
            throw DataError(source + ":" + std::to_string(lineno) + ": record is not an object", lineno);
        const std::string kind = require_string(rec, "kind", lineno);
        try {
            if (kind == "meta") {
                name = require_string(rec, "name", lineno);
            } else if (kind == "doc") {
                auto id = require_string(rec, "doc_id", lineno);
                if (!ids.insert(id).second)
                    throw DataError("line " + std::to_string(lineno) + ": duplicate doc_id \"" + id + "\"", lineno);
                docs.push_back(Document::make(std::move(id), require_string(rec, "text", lineno)));
            } else if (kind == "case") {
                SearchCase c;
                c.user_id = require_string(rec, "user_id", lineno);
                c.target_doc_id = require_string(rec, "target_doc_id", lineno);
                c.intent_text = require_string(rec, "intent_text", lineno);
                c.initial_query = require_string(rec, "initial_query", lineno);
                if (auto it = rec.find("facets"); it != rec.end())
                    c.facets = it->get<std::vector<std::vector<std::string>>>();
                if (auto it = rec.find("ambiguous"); it != rec.end()) c.ambiguous = it->get<bool>();
                std::optional<Split> label;
                if (auto it = rec.find("split"); it != rec.end() && !it->is_null()) {
                    label = parse_split(it->get<std::string>());
                    if (!label)
                        throw DataError("line " + std::to_string(lineno) + ": unknown split \"" +
                                            it->get<std::string>() + "\"",
                                        lineno);
                }
                cases.push_back(std::move(c));
                labels.push_back(label);
            } else {
                throw DataError("line " + std::to_string(lineno) + ": unknown record kind \"" + kind + "\"", lineno);
            }
        } catch (const json::exception& e) {
            throw DataError(source + ":" + std::to_string(lineno) + ": bad field: " + e.what(), lineno);
        }
    }

    SplitIndices splits;
    const auto labelled = std::count_if(labels.begin(), labels.end(), [](auto& l) { return l.has_value(); });
    if (labelled != 0 && static_cast<std::size_t>(labelled) != labels.size())
        throw DataError(source + ": split labels present on only some cases");
    for (std::size_t i = 0; i < labels.size() && labelled; ++i) {
        switch (*labels[i]) {
            case Split::Train: splits.train.push_back(i); break;
            case Split::Valid: splits.valid.push_back(i); break;
            case Split::Test: splits.test.push_back(i); break;
        }
    }
    try {
        return DomainDataset(std::move(name), std::move(docs), std::move(cases), std::move(splits));
    } catch (const DataError& e) {
        throw DataError(source + ": " + e.what());
    }
}

DomainDataset load_domain(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_domain(buf.str(), path.stem().string(), path.string());
}

std::string serialize_domain(const DomainDataset& dataset) {
    std::vector<std::optional<Split>> labels(dataset.cases().size());
    for (Split s : {Split::Train, Split::Valid, Split::Test})
        for (auto idx : dataset.splits().of(s)) labels[idx] = s;

    std::string out;
    out += json{{"kind", "meta"}, {"name", dataset.name()}}.dump() + "\n";
    for (const auto& d : dataset.documents())
        out += json{{"kind", "doc"}, {"doc_id", d.doc_id}, {"text", d.text}}.dump() + "\n";
    for (std::size_t i = 0; i < dataset.cases().size(); ++i) {
        const auto& c = dataset.cases()[i];
        json rec{{"kind", "case"},          {"user_id", c.user_id},   {"target_doc_id", c.target_doc_id},
                 {"intent_text", c.intent_text}, {"initial_query", c.initial_query}, {"facets", c.facets},
                 {"ambiguous", c.ambiguous}};
        if (labels[i]) rec["split"] = split_name(*labels[i]);
        out += rec.dump() + "\n";
    }
    return out;
}

void save_domain(const DomainDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write dataset file " + path.string());
    out << serialize_domain(dataset);
}

DomainDataset split_dataset(const DomainDataset& dataset, std::uint64_t seed) {
    const std::size_t n = dataset.cases().size();
    if (n < 8) throw DataError("split_dataset needs at least 8 cases, got " + std::to_string(n));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order.begin(), order.end());

    const std::size_t n_valid = n / 8;
    const std::size_t n_test = n / 8;
    SplitIndices s;
    s.valid.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_valid));
    s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_valid),
                  order.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test));
    s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test), order.end());
    for (auto* part : {&s.train, &s.valid, &s.test}) std::sort(part->begin(), part->end());
    return dataset.with_splits(std::move(s));
}

double ambiguity_proportion(const DomainDataset& dataset) {
    const auto& cases = dataset.cases();
    if (cases.empty()) throw DataError("ambiguity_proportion of an empty dataset");
    const auto n = std::count_if(cases.begin(), cases.end(), [](const SearchCase& c) { return c.ambiguous; });
    return static_cast<double>(n) / static_cast<double>(cases.size());
}

}  // namespace clarion

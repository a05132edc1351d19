#include "clarion/synth.hpp"

#include "clarion/rng.hpp"
#include "clarion/text.hpp"

#include <algorithm>
#include <cstdio>
#include <string_view>

namespace clarion {

const char* helpfulness_name(Helpfulness h) {
    switch (h) {
        case Helpfulness::AskHelps: return "ask-helps";
        case Helpfulness::AskHurts: return "ask-hurts";
        case Helpfulness::Mixed: return "mixed";
    }
    return "?";
}

std::optional<Helpfulness> parse_helpfulness(std::string_view name) {
    if (name == "ask-helps") return Helpfulness::AskHelps;
    if (name == "ask-hurts") return Helpfulness::AskHurts;
    if (name == "mixed") return Helpfulness::Mixed;
    return std::nullopt;
}

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstvz";
constexpr std::string_view kVowels = "aeiou";
constexpr std::size_t kSyllables = 14 * 5;
constexpr std::size_t kTopicGroupSize = 20;
constexpr std::size_t kFillerPool = 60;
constexpr std::size_t kFillerPerDoc = 5;
constexpr std::size_t kMinExclusive = 3;
constexpr std::size_t kHurtsQueryExclusive = 2;

void append_syllable(std::string& out, std::size_t s) {
    out.push_back(kConsonants[s / kVowels.size()]);
    out.push_back(kVowels[s % kVowels.size()]);
}

/// Pronounceable word: a variable-length block prefix followed by exactly
/// three syllables for the index, so (block, index) maps to a unique word.
class WordMaker {
public:
    explicit WordMaker(std::uint64_t block) {
        // Bijective base-70 so distinct blocks never share a prefix.
        std::uint64_t b = block + 1;
        std::string rev;
        while (b > 0) {
            --b;
            append_syllable(rev, static_cast<std::size_t>(b % kSyllables));
            b /= kSyllables;
        }
        for (std::size_t i = rev.size(); i >= 2; i -= 2) prefix_.append(rev, i - 2, 2);
    }

    std::string make() {
        std::string w = prefix_;
        std::size_t i = next_++;
        append_syllable(w, (i / (kSyllables * kSyllables)) % kSyllables);
        append_syllable(w, (i / kSyllables) % kSyllables);
        append_syllable(w, i % kSyllables);
        return w;
    }

private:
    std::string prefix_;
    std::size_t next_ = 0;
};

std::uint64_t name_key(std::string_view name) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string pad_id(char prefix, std::size_t i, std::size_t count) {
    const int width = static_cast<int>(std::to_string(count).size());
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i + 1);
    return buf;
}

}  // namespace

DomainDataset synth_domain(const SynthProfile& profile, std::uint64_t seed) {
    if (profile.n_docs < 10) throw DataError("synth_domain needs at least 10 documents");
    if (profile.n_cases < 10) throw DataError("synth_domain needs at least 10 cases");
    if (profile.facet_count == 0 && profile.helpfulness != Helpfulness::AskHurts)
        throw DataError(std::string("profile ") + helpfulness_name(profile.helpfulness) +
                        " needs facet_count >= 1");

    WordMaker words(derive_seed(name_key(profile.name), profile.vocabulary_seed) & 0xFFFFFFULL);
    Rng rng(derive_seed(seed, 1));

    const std::size_t n_groups = std::max<std::size_t>(1, profile.n_docs / kTopicGroupSize);
    const std::size_t n_exclusive = std::max(kMinExclusive, profile.facet_count);

    std::vector<std::vector<std::string>> topic(n_groups);
    for (auto& t : topic) t = {words.make(), words.make()};
    std::vector<std::string> filler(kFillerPool);
    for (auto& f : filler) f = words.make();

    struct Layout {
        std::size_t begin, end;
    };
    std::vector<Layout> groups(n_groups);
    for (std::size_t g = 0; g < n_groups; ++g)
        groups[g] = {g * profile.n_docs / n_groups, (g + 1) * profile.n_docs / n_groups};

    std::vector<Document> docs;
    std::vector<std::vector<std::string>> exclusive(profile.n_docs);
    docs.reserve(profile.n_docs);
    for (std::size_t g = 0; g < n_groups; ++g) {
        for (std::size_t d = groups[g].begin; d < groups[g].end; ++d) {
            for (std::size_t e = 0; e < n_exclusive; ++e) exclusive[d].push_back(words.make());
            std::vector<std::string> toks = topic[g];
            toks.insert(toks.end(), exclusive[d].begin(), exclusive[d].end());
            std::vector<std::size_t> pick(kFillerPool);
            for (std::size_t i = 0; i < kFillerPool; ++i) pick[i] = i;
            rng.shuffle(pick.begin(), pick.end());
            for (std::size_t i = 0; i < kFillerPerDoc; ++i) toks.push_back(filler[pick[i]]);
            rng.shuffle(toks.begin(), toks.end());
            docs.push_back(Document::make(pad_id('d', d, profile.n_docs), join(toks, " ")));
        }
    }

    std::vector<SearchCase> cases;
    cases.reserve(profile.n_cases);
    for (std::size_t i = 0; i < profile.n_cases; ++i) {
        bool helps = profile.helpfulness == Helpfulness::AskHelps;
        if (profile.helpfulness == Helpfulness::Mixed) helps = rng.bernoulli(0.5);
        const auto g = rng.uniform_index(n_groups);
        const std::size_t size = groups[g].end - groups[g].begin;
        const std::size_t lo = helps ? kAmbiguousMinRank - 1 : 0;
        const std::size_t target = groups[g].begin + lo + rng.uniform_index(size - lo);
        const auto& excl = exclusive[target];

        SearchCase c;
        c.user_id = pad_id('u', i, profile.n_cases);
        c.target_doc_id = docs[target].doc_id;
        c.intent_text = "looking for " + join(topic[g], " ") + " with " + join(excl, " ");
        c.ambiguous = helps;
        std::vector<std::string> query = topic[g];
        if (helps) {
            for (std::size_t f = 0; f < profile.facet_count; ++f) c.facets.push_back({excl[f]});
        } else {
            query.insert(query.end(), excl.begin(), excl.begin() + kHurtsQueryExclusive);
        }
        c.initial_query = join(query, " ");
        cases.push_back(std::move(c));
    }

    return split_dataset(DomainDataset(profile.name, std::move(docs), std::move(cases)), derive_seed(seed, 2));
}

}  // namespace clarion

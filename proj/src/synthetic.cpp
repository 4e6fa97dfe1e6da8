#include "nlki/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <tuple>

#include "nlki/errors.hpp"
#include "nlki/rng.hpp"

namespace nlki {

namespace {

constexpr std::array<const char*, 32> kNouns = {
    "dog",    "cat",    "ball",   "car",   "bicycle", "umbrella", "orange", "banana", "chair",  "table", "horse",
    "bottle", "book",   "cup",    "bench", "kite",    "boat",     "bird",   "apple",  "laptop", "clock", "vase",
    "train",  "sheep",  "knife",  "bed",   "oven",    "sink",     "pizza",  "cake",   "tie",    "skis"};
constexpr std::array<const char*, 16> kUses = {
    "playing",  "sitting", "eating",  "drinking", "reading", "travelling", "sleeping", "cooking",
    "cutting",  "writing", "surfing", "skiing",   "riding",  "carrying",   "storing",  "decorating"};
constexpr std::array<const char*, 12> kPlaces = {"kitchen", "park",  "beach",  "street",  "office", "garden",
                                                 "harbor",  "field", "station", "bedroom", "river",  "market"};
constexpr std::array<const char*, 10> kProps = {"red", "soft", "heavy", "sweet", "fast",
                                                "blue", "sharp", "warm", "round", "tall"};

template <std::size_t N>
const char* pick(const std::array<const char*, N>& a, Rng& rng) {
    return a[rng.uniform_index(N)];
}

}  // namespace

Corpus synthetic_corpus(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Fact> facts;
    facts.reserve(n);
    char id[32];
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        switch (rng.uniform_index(4)) {
            case 0: text = std::string("a ") + pick(kNouns, rng) + " is used for " + pick(kUses, rng); break;
            case 1: text = std::string("you are likely to find a ") + pick(kNouns, rng) + " in a " + pick(kPlaces, rng); break;
            case 2: text = std::string("a ") + pick(kNouns, rng) + " can be " + pick(kProps, rng); break;
            default: text = std::string("a ") + pick(kNouns, rng) + " is near a " + pick(kNouns, rng) + " in the " + pick(kPlaces, rng); break;
        }
        std::snprintf(id, sizeof id, "f%06zu", i);
        facts.push_back(make_fact(id, text + ".", "SYNTH"));
    }
    return Corpus("synthetic", std::move(facts));
}

std::vector<EvalRecord> synthetic_records(std::size_t n, const Corpus& corpus, std::uint64_t seed) {
    if (corpus.empty()) throw ValidationError("synthetic records need a non-empty corpus");
    // (noun, use) pairs from "a <noun> is used for <use>" facts.
    std::vector<std::pair<std::string, std::string>> grounded;
    for (const auto& f : corpus) {
        const auto& t = f.tokens;
        if (t.size() == 6 && t[0] == "a" && t[2] == "is" && t[3] == "used" && t[4] == "for") grounded.emplace_back(t[1], t[5]);
    }
    Rng rng(seed);
    std::vector<EvalRecord> out;
    out.reserve(n);
    char id[32];
    for (std::size_t i = 0; i < n; ++i) {
        EvalRecord r;
        std::snprintf(id, sizeof id, "r%05zu", i);
        r.id = id;
        std::snprintf(id, sizeof id, "img://%05zu", i);
        r.image_ref = id;
        std::string noun, use;
        if (!grounded.empty()) {
            std::tie(noun, use) = grounded[rng.uniform_index(grounded.size())];
        } else {
            noun = pick(kNouns, rng);
            use = pick(kUses, rng);
        }
        r.question = "what is the " + noun + " in this picture used for?";
        std::vector<std::string> options{use};
        while (options.size() < 4) {
            std::string o = pick(kUses, rng);
            if (std::find(options.begin(), options.end(), o) == options.end()) options.push_back(o);
        }
        // Shuffle so the gold answer is not always first.
        for (std::size_t j = options.size() - 1; j > 0; --j) std::swap(options[j], options[rng.uniform_index(j + 1)]);
        r.options = options;
        r.gold_answer = use;
        r.gold_explanation = "the " + noun + " is commonly used for " + use;
        r.dataset = "cric";
        out.push_back(std::move(r));
    }
    return out;
}

TripleSet synthetic_triples(const TripleSpec& spec, std::uint64_t seed) {
    if (spec.fact_tokens < spec.shared_tokens || spec.shared_tokens < 1)
        throw ValidationError("fact_tokens must be >= shared_tokens >= 1");
    if (spec.vocab < spec.fact_tokens + spec.shared_tokens + spec.extra_tokens)
        throw ValidationError("vocabulary too small for the requested token counts");
    if (spec.facts < 2 || spec.train + spec.test > spec.facts)
        throw ValidationError("need train + test <= facts and at least two facts");
    Rng rng(seed);
    std::vector<std::string> vocab;
    for (std::size_t i = 0; i < spec.vocab; ++i) vocab.push_back("w" + std::to_string(i));
    auto draw_distinct = [&](std::size_t count, const std::vector<std::string>& avoid) {
        std::vector<std::string> out;
        while (out.size() < count) {
            const auto& w = vocab[rng.uniform_index(vocab.size())];
            if (std::find(out.begin(), out.end(), w) == out.end() && std::find(avoid.begin(), avoid.end(), w) == avoid.end())
                out.push_back(w);
        }
        return out;
    };
    auto join = [](const std::vector<std::string>& words) {
        std::string s;
        for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
        return s;
    };

    std::vector<std::vector<std::string>> fact_words;
    std::vector<Fact> facts;
    char id[32];
    for (std::size_t i = 0; i < spec.facts; ++i) {
        fact_words.push_back(draw_distinct(spec.fact_tokens, {}));
        std::snprintf(id, sizeof id, "t%05zu", i);
        facts.push_back(make_fact(id, join(fact_words.back()), "SYNTH"));
    }
    TripleSet out;
    out.corpus = Corpus("triples", std::move(facts));
    for (std::size_t i = 0; i < spec.train + spec.test; ++i) {
        // q = shared_tokens words of d+ plus extra words absent from d+.
        std::vector<std::string> own = fact_words[i];
        for (std::size_t j = own.size() - 1; j > 0; --j) std::swap(own[j], own[rng.uniform_index(j + 1)]);
        std::vector<std::string> q(own.begin(), own.begin() + spec.shared_tokens);
        for (auto& w : draw_distinct(spec.extra_tokens, fact_words[i])) q.push_back(w);
        // d- shares no word with q.
        std::size_t neg = 0;
        for (std::size_t attempt = 0;; ++attempt) {
            if (attempt > 100000) throw ValidationError("no negative without shared tokens; enlarge the vocabulary");
            neg = rng.uniform_index(spec.facts);
            bool shares = false;
            for (const auto& w : fact_words[neg]) shares = shares || std::find(q.begin(), q.end(), w) != q.end();
            if (!shares) break;
        }
        Triple t{join(q), out.corpus[i].id, out.corpus[neg].id};
        (i < spec.train ? out.train : out.test).push_back(std::move(t));
    }
    return out;
}

}  // namespace nlki

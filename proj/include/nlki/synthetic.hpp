#pragma once

#include <cstdint>
#include <vector>

#include "nlki/contrastive.hpp"
#include "nlki/corpus.hpp"

namespace nlki {

// Seeded commonsense-style facts: "a <noun> is used for <activity>" etc.
Corpus synthetic_corpus(std::size_t n, std::uint64_t seed);

// Four-option MCQ records grounded in the corpus's "a X is used for Y"
// facts; the gold explanation paraphrases the fact.
std::vector<EvalRecord> synthetic_records(std::size_t n, const Corpus& corpus, std::uint64_t seed);

// Retriever-tuning data over a pseudo-word vocabulary ("w0", "w1", ...).
// Fact i (i < train + test) is the positive of triple i; its query holds
// `shared_tokens` of the fact's words plus `extra_tokens` words the fact
// lacks, and the negative shares no word with the query.
struct TripleSpec {
    std::size_t vocab = 400;
    std::size_t facts = 300;
    std::size_t fact_tokens = 6;
    std::size_t shared_tokens = 2;
    std::size_t extra_tokens = 3;
    std::size_t train = 200;
    std::size_t test = 100;
};

struct TripleSet {
    Corpus corpus;
    std::vector<Triple> train;
    std::vector<Triple> test;  // positives disjoint from the training ones
};

TripleSet synthetic_triples(const TripleSpec& spec, std::uint64_t seed);

}  // namespace nlki

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nlki/clients.hpp"
#include "nlki/corpus.hpp"

namespace nlki {

inline constexpr double kBleuEpsilon = 1e-9;
inline constexpr double kDefaultCosineThreshold = 0.71;

// Cumulative BLEU up to order k on default-tokenizer tokens: geometric mean
// of clipped n-gram precisions times exp(min(0, 1 - r/c)). Zero matches are
// replaced by epsilon; orders longer than the candidate are skipped.
// Returns 0 for an empty candidate.
double bleu_k(std::string_view candidate, std::string_view reference, int k);

// F1 of clipped n-gram overlap.
double rouge_n(std::string_view candidate, std::string_view reference, int n);

// F1 of longest-common-subsequence precision and recall.
double rouge_l(std::string_view candidate, std::string_view reference);

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b);

// Lowercase + trim before comparing.
bool exact_match(std::string_view pred, std::string_view gold);

bool cosine_accuracy(std::string_view pred, std::string_view gold, const TextEmbedder& embedder,
                     double threshold = kDefaultCosineThreshold);

enum class Aggregation { Max, Mean };

struct MetricSet {
    bool bleu = true;
    bool rouge = true;
    bool cosine = true;
};

// Percent-scale means over records.
struct MetricReport {
    std::size_t k = 0;
    std::size_t records = 0;
    Aggregation aggregation = Aggregation::Max;
    std::optional<double> b1, b2, b3, r1, r2, rl, cosine;
    std::optional<double> exact_match;
    std::optional<double> threshold_accuracy;
};

// Scores the first k candidates of each record against its gold explanation,
// reduces per record with `aggregation`, then averages. Records without a
// gold explanation are skipped; throws ValidationError if none remain or if
// the candidate lists do not line up with the records.
MetricReport retrieval_report(const std::vector<EvalRecord>& records,
                              const std::vector<std::vector<std::string>>& candidates, std::size_t k,
                              const MetricSet& metrics, const TextEmbedder* embedder,
                              Aggregation aggregation = Aggregation::Max);

// EM and cosine-threshold accuracy of predicted labels against gold answers.
MetricReport answer_report(const std::vector<EvalRecord>& records, const std::vector<std::string>& predictions,
                           const TextEmbedder* embedder, double threshold = kDefaultCosineThreshold);

std::string report_json(const MetricReport& report);

// Aligned columns, one header row and one value row.
std::string report_table(const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace nlki

#include "nlki/metrics.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "nlki/errors.hpp"
#include "nlki/tokenizer.hpp"

namespace nlki {

namespace {

using Tokens = std::vector<std::string>;
using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const Tokens& t, std::size_t n) {
    NgramCounts counts;
    if (n == 0 || t.size() < n) return counts;
    for (std::size_t i = 0; i + n <= t.size(); ++i) ++counts[Tokens(t.begin() + i, t.begin() + i + n)];
    return counts;
}

// Sum over candidate n-grams of min(count, reference count).
std::size_t clipped_overlap(const NgramCounts& cand, const NgramCounts& ref) {
    std::size_t m = 0;
    for (const auto& [g, c] : cand) {
        if (auto it = ref.find(g); it != ref.end()) m += std::min(c, it->second);
    }
    return m;
}

std::size_t total(const NgramCounts& c) {
    std::size_t s = 0;
    for (const auto& [g, n] : c) s += n;
    return s;
}

double f1(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

std::size_t lcs_length(const Tokens& a, const Tokens& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string normalize_answer(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out(s.substr(b, e - b));
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

double bleu_k(std::string_view candidate, std::string_view reference, int k) {
    if (k < 1) throw ValidationError("BLEU order must be >= 1");
    const Tokens cand = tokenize(candidate);
    const Tokens ref = tokenize(reference);
    if (cand.empty() || ref.empty()) return 0.0;
    const std::size_t orders = std::min(static_cast<std::size_t>(k), cand.size());
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= orders; ++n) {
        const auto c = ngrams(cand, n);
        const double matches = static_cast<double>(clipped_overlap(c, ngrams(ref, n)));
        const double p = (matches > 0.0 ? matches : kBleuEpsilon) / static_cast<double>(total(c));
        log_sum += std::log(p);
    }
    const double bp = std::exp(std::min(0.0, 1.0 - static_cast<double>(ref.size()) / static_cast<double>(cand.size())));
    return bp * std::exp(log_sum / static_cast<double>(orders));
}

double rouge_n(std::string_view candidate, std::string_view reference, int n) {
    if (n < 1) throw ValidationError("ROUGE order must be >= 1");
    const Tokens cand = tokenize(candidate);
    const Tokens ref = tokenize(reference);
    if (cand.empty() || ref.empty()) return 0.0;
    const auto c = ngrams(cand, static_cast<std::size_t>(n));
    const auto r = ngrams(ref, static_cast<std::size_t>(n));
    if (c.empty() || r.empty()) return cand == ref ? 1.0 : 0.0;
    const double m = static_cast<double>(clipped_overlap(c, r));
    return f1(m / static_cast<double>(total(c)), m / static_cast<double>(total(r)));
}

double rouge_l(std::string_view candidate, std::string_view reference) {
    const Tokens cand = tokenize(candidate);
    const Tokens ref = tokenize(reference);
    if (cand.empty() || ref.empty()) return 0.0;
    const double l = static_cast<double>(lcs_length(cand, ref));
    return f1(l / static_cast<double>(cand.size()), l / static_cast<double>(ref.size()));
}

double cosine_sim(const EmbeddingVector& a, const EmbeddingVector& b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

bool exact_match(std::string_view pred, std::string_view gold) { return normalize_answer(pred) == normalize_answer(gold); }

bool cosine_accuracy(std::string_view pred, std::string_view gold, const TextEmbedder& embedder, double threshold) {
    if (tokenize(pred).empty() || tokenize(gold).empty()) return false;
    return cosine_sim(embedder.embed_text(pred), embedder.embed_text(gold)) >= threshold;
}

MetricReport retrieval_report(const std::vector<EvalRecord>& records,
                              const std::vector<std::vector<std::string>>& candidates, std::size_t k,
                              const MetricSet& metrics, const TextEmbedder* embedder, Aggregation aggregation) {
    if (k == 0) throw ValidationError("k must be >= 1");
    if (records.size() != candidates.size()) throw ValidationError("candidate lists do not match records");
    if (metrics.cosine && embedder == nullptr) throw ValidationError("cosine metric needs an embedder");

    constexpr std::size_t kMetrics = 7;  // b1 b2 b3 r1 r2 rl cos
    std::array<double, kMetrics> sums{};
    std::size_t used = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& gold = records[i].gold_explanation;
        if (!gold || tokenize(*gold).empty()) continue;
        const std::size_t n = std::min(k, candidates[i].size());
        std::array<double, kMetrics> agg{};
        std::optional<EmbeddingVector> gold_vec;
        if (metrics.cosine) gold_vec = embedder->embed_text(*gold);
        for (std::size_t j = 0; j < n; ++j) {
            const std::string& c = candidates[i][j];
            std::array<double, kMetrics> s{};
            if (metrics.bleu) {
                s[0] = bleu_k(c, *gold, 1);
                s[1] = bleu_k(c, *gold, 2);
                s[2] = bleu_k(c, *gold, 3);
            }
            if (metrics.rouge) {
                s[3] = rouge_n(c, *gold, 1);
                s[4] = rouge_n(c, *gold, 2);
                s[5] = rouge_l(c, *gold);
            }
            if (metrics.cosine && !tokenize(c).empty()) s[6] = cosine_sim(embedder->embed_text(c), *gold_vec);
            for (std::size_t m = 0; m < kMetrics; ++m) {
                agg[m] = aggregation == Aggregation::Max ? (j == 0 ? s[m] : std::max(agg[m], s[m])) : agg[m] + s[m];
            }
        }
        if (aggregation == Aggregation::Mean && n > 0) {
            for (double& a : agg) a /= static_cast<double>(n);
        }
        for (std::size_t m = 0; m < kMetrics; ++m) sums[m] += agg[m];
        ++used;
    }
    if (used == 0) throw ValidationError("no records with a gold explanation");

    MetricReport r;
    r.k = k;
    r.records = used;
    r.aggregation = aggregation;
    const auto pct = [&](std::size_t m) { return 100.0 * sums[m] / static_cast<double>(used); };
    if (metrics.bleu) {
        r.b1 = pct(0);
        r.b2 = pct(1);
        r.b3 = pct(2);
    }
    if (metrics.rouge) {
        r.r1 = pct(3);
        r.r2 = pct(4);
        r.rl = pct(5);
    }
    if (metrics.cosine) r.cosine = pct(6);
    return r;
}

MetricReport answer_report(const std::vector<EvalRecord>& records, const std::vector<std::string>& predictions,
                           const TextEmbedder* embedder, double threshold) {
    if (records.size() != predictions.size()) throw ValidationError("predictions do not match records");
    if (records.empty()) throw ValidationError("no records to evaluate");
    double em = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        em += exact_match(predictions[i], records[i].gold_answer) ? 1.0 : 0.0;
        if (embedder) acc += cosine_accuracy(predictions[i], records[i].gold_answer, *embedder, threshold) ? 1.0 : 0.0;
    }
    MetricReport r;
    r.k = 1;
    r.records = records.size();
    r.exact_match = 100.0 * em / static_cast<double>(records.size());
    if (embedder) r.threshold_accuracy = 100.0 * acc / static_cast<double>(records.size());
    return r;
}

std::string report_json(const MetricReport& r) {
    nlohmann::ordered_json j;
    j["k"] = r.k;
    j["records"] = r.records;
    j["aggregation"] = r.aggregation == Aggregation::Max ? "max" : "mean";
    const auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) j[key] = *v;
    };
    put("B-1", r.b1);
    put("B-2", r.b2);
    put("B-3", r.b3);
    put("R-1", r.r1);
    put("R-2", r.r2);
    put("R-L", r.rl);
    put("Cosine", r.cosine);
    put("EM", r.exact_match);
    put("Accuracy", r.threshold_accuracy);
    return j.dump();
}

std::string report_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
    struct Col {
        const char* name;
        std::optional<double> MetricReport::*field;
    };
    static const Col cols[] = {{"B-1", &MetricReport::b1}, {"B-2", &MetricReport::b2},
                               {"B-3", &MetricReport::b3}, {"R-1", &MetricReport::r1},
                               {"R-2", &MetricReport::r2}, {"R-L", &MetricReport::rl},
                               {"Cosine", &MetricReport::cosine}, {"EM", &MetricReport::exact_match},
                               {"Acc", &MetricReport::threshold_accuracy}};
    std::size_t name_w = 6;
    for (const auto& [name, rep] : rows) name_w = std::max(name_w, name.size());
    std::string out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_w), "method");
    out += buf;
    for (const auto& c : cols) {
        bool any = false;
        for (const auto& [name, rep] : rows) any = any || (rep.*(c.field)).has_value();
        if (!any) continue;
        const std::string label = std::string(c.name) + "@" + std::to_string(rows.empty() ? 0 : rows.front().second.k);
        std::snprintf(buf, sizeof buf, " %10s", label.c_str());
        out += buf;
    }
    out += "\n";
    for (const auto& [name, rep] : rows) {
        std::snprintf(buf, sizeof buf, "%-*s", static_cast<int>(name_w), name.c_str());
        out += buf;
        for (const auto& c : cols) {
            bool any = false;
            for (const auto& [n2, r2] : rows) any = any || (r2.*(c.field)).has_value();
            if (!any) continue;
            const auto& v = rep.*(c.field);
            if (v) {
                std::snprintf(buf, sizeof buf, " %10.2f", *v);
            } else {
                std::snprintf(buf, sizeof buf, " %10s", "-");
            }
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace nlki

// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "nlki/cli.hpp"
#include "nlki/contrastive.hpp"
#include "nlki/integration.hpp"
#include "nlki/losses.hpp"
#include "nlki/metrics.hpp"
#include "nlki/mock_clients.hpp"
#include "nlki/noise.hpp"
#include "nlki/prompt.hpp"
#include "nlki/rng.hpp"
#include "nlki/synthetic.hpp"
#include "nlki/vector_index.hpp"

using namespace nlki;
namespace fs = std::filesystem;

namespace {

const std::string kData = NLKI_TEST_DATA;

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome retrieval_oracle() {
    const Corpus corpus = synthetic_corpus(1000, 11);
    const MockEmbedder embedder(64, 7);
    std::vector<std::string> queries;
    for (const auto& r : synthetic_records(60, corpus, 12)) queries.push_back(r.question);
    Rng rng(13);
    while (queries.size() < 100) {
        // a few words lifted from random facts, so near-ties show up too
        const auto& text = corpus[rng.uniform_index(corpus.size())].text;
        queries.push_back(text.substr(0, text.size() / 2));
    }

    std::size_t compared = 0, mismatched = 0;
    double worst = 0.0, search_secs = 0.0;
    for (auto mode : {RetrievalMode::Single, RetrievalMode::Late}) {
        auto t0 = Clock::now();
        const auto index = VectorIndex::build(corpus, embedder, mode);
        search_secs += seconds_since(t0);
        for (std::size_t k : {1, 5, 10}) {
            for (const auto& q : queries) {
                t0 = Clock::now();
                const auto got = mode == RetrievalMode::Single ? search_topk(index, embedder, q, k)
                                                               : search_topk_late(index, embedder, q, k);
                search_secs += seconds_since(t0);
                const auto want = brute_force_topk(corpus, embedder, q, k, mode);
                ++compared;
                bool same = got.size() == want.size();
                for (std::size_t i = 0; same && i < got.size(); ++i) {
                    worst = std::max(worst, std::abs(got[i].score - want[i].score));
                    same = got[i].fact_id == want[i].fact_id && got[i].rank == want[i].rank &&
                           std::abs(got[i].score - want[i].score) <= 1e-9;
                }
                if (!same) ++mismatched;
            }
        }
    }
    Outcome o;
    o.pass = mismatched == 0 && search_secs < 5.0;
    o.detail = std::to_string(compared) + " top-k lists, " + std::to_string(mismatched) +
               " mismatches, max score diff " + fmt("%.1e", worst) + ", index build + search " +
               fmt("%.2f", search_secs) + " s";
    return o;
}

std::vector<double> random_probs(Rng& rng, std::size_t classes) {
    // flat Dirichlet: normalized exponentials
    std::vector<double> p(classes);
    for (auto& v : p) v = -std::log(1.0 - rng.uniform01());
    const double s = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto& v : p) v /= s;
    return p;
}

// Fourth-order central differences; the two-point stencil loses too many
// digits to round-off on gradients around 1e-6.
double gradient_rel_error(LossKind kind, const LogitsBatch& batch, const LossConfig& cfg) {
    const double h = 1e-2;
    const auto g = loss_gradient(kind, batch, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < batch.logits.size(); ++i) {
        auto f = [&](double d) {
            LogitsBatch x = batch;
            x.logits[i] += d;
            return batch_loss(kind, x, cfg);
        };
        const double fd = (8 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12 * h);
        worst = std::max(worst, std::abs(fd - g[i]) / std::max({std::abs(fd), std::abs(g[i]), 1e-8}));
    }
    return worst;
}

Outcome loss_suite() {
    Rng rng(21);
    bool gce_one = true, sce_exact = true;
    double small_q = 0.0, mixed_dev = 0.0, small_q_min_p = 1.0, mixed_min_p = 1.0;
    std::size_t small_q_fail = 0, mixed_fail = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t classes = 2 + rng.uniform_index(4);
        const auto p = random_probs(rng, classes);
        const std::size_t y = rng.uniform_index(classes);
        if (gce(p, y, 1.0) != 1.0 - p[y]) gce_one = false;
        if (sce(p, y, 0.1, 1.0, 4.0) != 0.1 * ce(p, y) + 1.0 * rce(p, y, 4.0)) sce_exact = false;
        const double d1 = std::abs(gce(p, y, 0.001) - ce(p, y));
        small_q = std::max(small_q, d1);
        if (d1 >= 1e-3) ++small_q_fail;
        else small_q_min_p = std::min(small_q_min_p, p[y]);
        const double d2 = std::abs(mixed(p, y, 0.9, 0.95) - ce(p, y));
        mixed_dev = std::max(mixed_dev, d2);
        if (d2 >= 5e-3) ++mixed_fail;
        else mixed_min_p = std::min(mixed_min_p, p[y]);
    }

    double grad = 0.0;
    LossConfig cfg;
    for (int b = 0; b < 100; ++b) {
        LogitsBatch batch;
        batch.rows = 1 + rng.uniform_index(8);
        batch.classes = 2 + rng.uniform_index(5);
        for (std::size_t i = 0; i < batch.rows * batch.classes; ++i) batch.logits.push_back(2.0 * rng.normal());
        for (std::size_t i = 0; i < batch.rows; ++i)
            batch.labels.push_back(static_cast<int>(rng.uniform_index(batch.classes)));
        for (auto kind : {LossKind::CE, LossKind::SCE, LossKind::GCE, LossKind::MIXED})
            grad = std::max(grad, gradient_rel_error(kind, batch, cfg));
    }

    Outcome o;
    o.pass = gce_one && sce_exact && small_q_fail == 0 && mixed_fail == 0 && grad < 1e-5;
    o.detail = std::string("gce(q=1)=1-p_y ") + (gce_one ? "exact" : "WRONG") + "; sce decomposition " +
               (sce_exact ? "exact" : "WRONG") + "; |gce(q=0.001)-ce| max " + fmt("%.2e", small_q) + " (" +
               std::to_string(small_q_fail) + "/1000 >= 1e-3, holds for p_y >= " + fmt("%.3f", small_q_min_p) +
               "); |mixed(0.9,0.95)-ce| max " + fmt("%.2e", mixed_dev) + " (" + std::to_string(mixed_fail) +
               "/1000 >= 5e-3, holds for p_y >= " + fmt("%.3f", mixed_min_p) + "); gradient rel err " +
               fmt("%.1e", grad);
    return o;
}

Outcome toy_noise() {
    const auto t0 = Clock::now();
    AblationConfig cfg;
    LossConfig ce_loss, sce_loss, mixed_loss;
    sce_loss.kind = LossKind::SCE;
    mixed_loss.kind = LossKind::MIXED;
    mixed_loss.lambda = 0.4;
    cfg.losses = {ce_loss, sce_loss, mixed_loss};
    cfg.noise_rates = {0.0, 0.15, 0.3};
    cfg.seeds = 5;
    cfg.workers = 4;
    const auto summary = summarize(ablation_grid(cfg));
    auto mean = [&](const std::string& kind, double rate) {
        for (const auto& s : summary)
            if (s.loss_kind == kind && std::abs(s.noise_rate - rate) < 1e-12) return 100.0 * s.mean_test_acc;
        return -1.0;
    };
    const std::string ce = loss_label(ce_loss), sc = loss_label(sce_loss), mx = loss_label(mixed_loss);
    const double secs = seconds_since(t0);
    const double lo = std::min({mean(ce, 0), mean(sc, 0), mean(mx, 0)});
    const double hi = std::max({mean(ce, 0), mean(sc, 0), mean(mx, 0)});
    Outcome o;
    o.pass = mean(sc, 0.3) >= mean(ce, 0.3) && mean(mx, 0.15) >= mean(ce, 0.15) && hi - lo <= 2.0 && secs < 60.0;
    o.detail = "eta=0.3 SCE " + fmt("%.2f", mean(sc, 0.3)) + " vs CE " + fmt("%.2f", mean(ce, 0.3)) +
               "; eta=0.15 MIXED " + fmt("%.2f", mean(mx, 0.15)) + " vs CE " + fmt("%.2f", mean(ce, 0.15)) +
               "; eta=0 spread " + fmt("%.2f", hi - lo) + " points; " + fmt("%.1f", secs) + " s";
    return o;
}

Outcome contrastive_gain() {
    double before = 0.0, after = 0.0, weakest = 1e9;
    const std::size_t seeds = 5;
    for (std::size_t s = 0; s < seeds; ++s) {
        const std::uint64_t seed = 1000 + s;
        const auto set = synthetic_triples(TripleSpec{}, seed);
        const MockEmbedder base(64, derive_seed(seed, 1), default_tokenizer(), TopicNoise{8, 1.0});
        TrainOptions opts;
        opts.seed = derive_seed(seed, 2);
        const auto trained = train_projection(set.train, set.corpus, base, ProjectionHead::identity(64), opts);
        const ProjectedEmbedder tuned(base, trained.head);
        const double b = recall_at_1(set.test, set.corpus, base, RetrievalMode::Late);
        const double a = recall_at_1(set.test, set.corpus, tuned, RetrievalMode::Late);
        before += b;
        after += a;
        weakest = std::min(weakest, a - b);
    }
    before /= seeds;
    after /= seeds;
    Outcome o;
    o.pass = after - before >= 10.0;
    o.detail = "held-out recall@1 " + fmt("%.1f", before) + " -> " + fmt("%.1f", after) + " (mean of 5 seeds, " +
               "smallest per-seed gain " + fmt("%.1f", weakest) + ")";
    return o;
}

Outcome truncation() {
    std::ifstream in(kData + "/truncation_golden.jsonl");
    std::size_t n = 0, bad = 0, longest = 0;
    for (std::string line; std::getline(in, line); ++n) {
        const auto c = nlohmann::json::parse(line);
        const auto out = build_reader_input(c["knowledge"], c["question"], c["budget"]);
        longest = std::max(longest, out.tokens.size());
        if (out.tokens != c["tokens"].get<std::vector<std::string>>() || out.text != c["text"].get<std::string>() ||
            out.truncated != c["truncated"].get<bool>() || out.tokens.size() > 100)
            ++bad;
    }
    Outcome o;
    o.pass = n == 50 && bad == 0;
    o.detail = std::to_string(n) + " golden cases, " + std::to_string(bad) + " mismatches, longest " +
               std::to_string(longest) + " tokens";
    return o;
}

Outcome metrics() {
    std::size_t bad = 0;
    const double b1 = bleu_k("the cat sat", "the cat sat on the mat", 1);
    const double r1 = rouge_n("a cat sat", "the cat sat down", 1);
    if (std::abs(b1 - 0.3679) > 1e-4 || std::abs(r1 - 0.5714) > 1e-4) ++bad;

    std::size_t oracle = 0;
    std::ifstream in(kData + "/metric_oracle.jsonl");
    for (std::string line; std::getline(in, line); ++oracle) {
        const auto c = nlohmann::json::parse(line);
        const std::string a = c["candidate"], b = c["reference"];
        const double got[] = {bleu_k(a, b, 1), bleu_k(a, b, 2), bleu_k(a, b, 3), bleu_k(a, b, 4),
                              rouge_n(a, b, 1), rouge_n(a, b, 2), rouge_l(a, b)};
        const char* keys[] = {"bleu1", "bleu2", "bleu3", "bleu4", "rouge1", "rouge2", "rougeL"};
        for (int i = 0; i < 7; ++i)
            if (std::abs(got[i] - c[keys[i]].get<double>()) > 1e-9) ++bad;
    }

    // identity and disjointness on random strings
    Rng rng(31);
    auto random_text = [&](char prefix) {
        std::string s;
        const std::size_t len = 1 + rng.uniform_index(15);
        for (std::size_t i = 0; i < len; ++i)
            s += (i ? " " : "") + std::string(1, prefix) + std::to_string(rng.uniform_index(30));
        return s;
    };
    std::size_t property_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto x = random_text('a'), z = random_text('b');
        for (int k = 1; k <= 4; ++k) {
            if (std::abs(bleu_k(x, x, k) - 1.0) > 1e-12) ++property_bad;
            if (bleu_k(x, z, k) > 1e-6) ++property_bad;
        }
        if (rouge_n(x, x, 1) != 1.0 || rouge_n(x, x, 2) != 1.0 || rouge_l(x, x) != 1.0) ++property_bad;
        if (rouge_n(x, z, 1) != 0.0 || rouge_n(x, z, 2) != 0.0 || rouge_l(x, z) != 0.0) ++property_bad;
    }

    // @10 never below @5 under max aggregation
    std::size_t monotone_bad = 0;
    const MockEmbedder embedder(64, 5);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto corpus = synthetic_corpus(300, 40 + seed);
        const auto records = synthetic_records(40, corpus, 50 + seed);
        const auto index = VectorIndex::build(corpus, embedder, RetrievalMode::Late);
        std::vector<std::vector<std::string>> cands;
        for (const auto& r : records) {
            std::vector<std::string> texts;
            for (const auto& h : search(index, embedder, r.question, 10)) texts.push_back(corpus.find(h.fact_id)->text);
            cands.push_back(texts);
        }
        const auto at5 = retrieval_report(records, cands, 5, MetricSet{}, &embedder);
        const auto at10 = retrieval_report(records, cands, 10, MetricSet{}, &embedder);
        for (auto field : {&MetricReport::b1, &MetricReport::b2, &MetricReport::b3, &MetricReport::r1,
                           &MetricReport::r2, &MetricReport::rl, &MetricReport::cosine})
            if (*(at10.*field) < *(at5.*field)) ++monotone_bad;
    }

    Outcome o;
    o.pass = bad == 0 && oracle > 300 && property_bad == 0 && monotone_bad == 0;
    o.detail = "B-1 " + fmt("%.4f", b1) + ", R-1 " + fmt("%.4f", r1) + "; " + std::to_string(oracle) +
               " oracle pairs, " + std::to_string(bad) + " off; 1000 random identity/disjoint pairs, " +
               std::to_string(property_bad) + " violations; @10 < @5 in " + std::to_string(monotone_bad) +
               " of 35 metric/set pairs";
    return o;
}

PromptInputs kitchen_inputs() {
    PromptInputs in;
    in.question = "What is the knife used for?";
    in.context.traditional_caption = "a man holding a knife in a kitchen";
    in.context.dense_caption = "A man in a white shirt is cutting vegetables with a knife on a wooden table.";
    in.context.region_captions = std::vector<std::string>{"man in white shirt", "knife in hand", "vegetables on table"};
    in.context.objects = std::vector<std::string>{"man", "knife", "table"};
    in.facts = {make_fact("f1", "A knife is used for cutting.", "OMCS"), make_fact("f2", "Vegetables are food", "OMCS")};
    in.dataset = "cric";
    return in;
}

Outcome prompts() {
    std::size_t bad = 0;
    for (int t = 0; t <= 6; ++t) {
        auto in = kitchen_inputs();
        if (t == 0) in.gold_label = "cutting";
        const auto type = static_cast<PromptType>(t);
        if (assemble_prompt(type, in) != slurp(kData + "/prompts/type" + std::to_string(t) + ".txt")) ++bad;
    }
    const auto in = kitchen_inputs();
    std::string t5 = assemble_prompt(PromptType::Type5, in);
    const std::string block = "Retrieved Facts (RF):\nFact: A knife is used for cutting.\nFact: Vegetables are food.\n";
    const auto pos = t5.find(block);
    if (pos != std::string::npos) t5.erase(pos, block.size());
    const bool five_minus_rf = pos != std::string::npos && t5 == assemble_prompt(PromptType::Type6, in);
    auto nli = in;
    nli.question = "Two men are preparing food.";
    nli.dataset = "esnlive";
    if (assemble_prompt(PromptType::Type6, nli) != slurp(kData + "/prompts/type6_esnlive.txt")) ++bad;

    std::size_t filter_bad = 0;
    const std::string descr = "the image description shows a knife that is used for cutting food";
    const std::string ent = "there is an entailment because the man holds a knife over the table";
    for (const char* ds : {"cric", "aokvqa", "esnlive"})
        if (!std::holds_alternative<Rejection>(filter_output(descr, ds))) ++filter_bad;
    if (!std::holds_alternative<Rejection>(filter_output(ent, "esnlive"))) ++filter_bad;
    if (!std::holds_alternative<ExplanationText>(filter_output(ent, "cric"))) ++filter_bad;

    Outcome o;
    o.pass = bad == 0 && five_minus_rf && filter_bad == 0;
    o.detail = std::to_string(8 - bad) + "/8 pinned templates match; Type5 without facts " +
               (five_minus_rf ? "==" : "!=") + " Type6; " + std::to_string(filter_bad) + " filter rule violations";
    return o;
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / ("nlki_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) { return run_cli(args, sink, sink); };
    const std::string corpus = (dir / "c.jsonl").string(), records = (dir / "r.jsonl").string();
    int code = run({"--seed", "0", "synth", "--facts", "500", "--records", "200", "--corpus-out", corpus,
                    "--records-out", records});
    std::vector<std::string> outputs;
    auto answer = [&](const std::string& workers, int i) {
        const auto out = (dir / ("a" + std::to_string(i) + ".jsonl")).string();
        code |= run({"--seed", "0", "--workers", workers, "answer", "--corpus", corpus, "--records", records, "-o", out});
        outputs.push_back(slurp(out));
    };
    answer("1", 0);
    answer("1", 1);
    answer("1", 2);
    answer("4", 3);
    fs::remove_all(dir);
    std::size_t lines = std::count(outputs[0].begin(), outputs[0].end(), '\n');
    const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const auto& s) { return s == outputs[0]; });
    Outcome o;
    o.pass = code == 0 && lines == 200 && same;
    o.detail = std::to_string(lines) + " answers; 3 runs with 1 worker and 1 run with 4 workers " +
               (same ? "byte-identical" : "DIFFER");
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"exact retrieval matches brute force", retrieval_oracle},
        {"robust loss numerics", loss_suite},
        {"toy label-noise robustness", toy_noise},
        {"contrastive fine-tuning gain", contrastive_gain},
        {"100-token reader truncation", truncation},
        {"generation metric oracles", metrics},
        {"prompt templates and output filter", prompts},
        {"deterministic pipeline answers", determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}

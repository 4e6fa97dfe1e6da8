#include "nlki/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nlki/config.hpp"
#include "nlki/contrastive.hpp"
#include "nlki/errors.hpp"
#include "nlki/integration.hpp"
#include "nlki/metrics.hpp"
#include "nlki/noise.hpp"
#include "nlki/pipeline.hpp"
#include "nlki/prompt.hpp"
#include "nlki/query.hpp"
#include "nlki/rng.hpp"
#include "nlki/synthetic.hpp"
#include "nlki/toy_trainer.hpp"
#include "nlki/wire.hpp"

namespace nlki {

namespace {

using wire::json;

struct GlobalOptions {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
};

PipelineConfig resolve_config(const GlobalOptions& g) {
    auto overrides = g.overrides;
    if (g.seed) overrides.push_back("seed=" + std::to_string(*g.seed));
    if (g.workers) overrides.push_back("workers=" + std::to_string(*g.workers));
    if (g.config_path.empty()) return parse_config("", overrides);
    return load_config(g.config_path, overrides);
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : out_(&fallback) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw ValidationError("cannot write " + path);
            out_ = &file_;
        }
    }
    std::ostream& operator*() { return *out_; }

private:
    std::ofstream file_;
    std::ostream* out_;
};

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
    }
    return lines;
}

json hits_json(const std::vector<RetrievalHit>& hits) {
    json a = json::array();
    for (const auto& h : hits) a.push_back({{"fact_id", h.fact_id}, {"score", h.score}, {"rank", h.rank}});
    return a;
}

std::string require(const std::string& value, const std::string& what) {
    if (value.empty()) throw ValidationError("missing " + what);
    return value;
}

// Caption + detect for one image, merged into a single context.
VisualContext observe(const ClientSet& clients, const std::string& image_ref) {
    VisualContext ctx = clients.captioner->caption(image_ref);
    ctx.objects = clients.detector->detect_objects(image_ref);
    return ctx;
}

std::vector<double> parse_rates(const std::string& csv) {
    std::vector<double> rates;
    std::stringstream ss(csv);
    for (std::string part; std::getline(ss, part, ',');) {
        try {
            std::size_t used = 0;
            rates.push_back(std::stod(part, &used));
            if (used != part.size()) throw std::invalid_argument(part);
        } catch (const std::exception&) {
            throw ValidationError("bad noise rate \"" + part + "\"");
        }
    }
    return rates;
}

std::string fmt_ms(double ms) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", ms);
    return buf;
}

json timing_json(const StageTiming& t) {
    return {{"mode", t.concurrent ? "concurrent" : "sequential"},
            {"caption_ms", t.caption_ms},
            {"detect_ms", t.detect_ms},
            {"retrieve_ms", t.retrieve_ms},
            {"explain_ms", t.explain_ms},
            {"integrate_ms", t.integrate_ms},
            {"answer_ms", t.answer_ms},
            {"total_ms", t.total_ms}};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"nlki: knowledge-augmented VQA pipeline toolkit", "nlki"};
    app.require_subcommand(1);
    GlobalOptions g;
    app.add_option("-c,--config", g.config_path, "YAML config file");
    app.add_option("--set", g.overrides, "Config override key=value (repeatable)");
    app.add_option("--seed", g.seed, "Master seed (overrides config)");
    app.add_option("--workers", g.workers, "Worker threads (overrides config)");

    std::function<void()> action;

    // synth
    auto* synth = app.add_subcommand("synth", "Write a seeded synthetic corpus and record set");
    std::size_t synth_facts = 1000, synth_records = 200;
    std::string synth_corpus_out, synth_records_out, synth_triples_dir;
    synth->add_option("--facts", synth_facts, "Number of facts");
    synth->add_option("--records", synth_records, "Number of records");
    synth->add_option("--corpus-out", synth_corpus_out, "Corpus JSONL path");
    synth->add_option("--records-out", synth_records_out, "Records JSONL path");
    synth->add_option("--triples-dir", synth_triples_dir,
                      "Also write retriever-tuning data (corpus.jsonl, train.jsonl, heldout.jsonl)");
    synth->callback([&] {
        action = [&] {
            const auto cfg = resolve_config(g);
            if (synth_corpus_out.empty() && synth_triples_dir.empty())
                throw ValidationError("synth needs --corpus-out or --triples-dir");
            if (!synth_corpus_out.empty()) {
                const Corpus corpus = synthetic_corpus(synth_facts, derive_seed(cfg.seed, 10));
                save_corpus(synth_corpus_out, corpus);
                if (!synth_records_out.empty())
                    save_records(synth_records_out, synthetic_records(synth_records, corpus, derive_seed(cfg.seed, 11)));
            }
            if (!synth_triples_dir.empty()) {
                const std::filesystem::path dir(synth_triples_dir);
                std::filesystem::create_directories(dir);
                const auto set = synthetic_triples(TripleSpec{}, derive_seed(cfg.seed, 12));
                save_corpus(dir / "corpus.jsonl", set.corpus);
                write_triples(dir / "train.jsonl", set.train);
                write_triples(dir / "heldout.jsonl", set.test);
            }
        };
    });

    // index
    auto* index = app.add_subcommand("index", "Embed a corpus and write an index snapshot");
    std::string index_corpus, index_out, index_mode;
    index->add_option("--corpus", index_corpus, "Corpus JSONL");
    index->add_option("-o,--out", index_out, "Snapshot path")->required();
    index->add_option("--mode", index_mode, "single|late");
    index->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            if (!index_mode.empty()) cfg.retrieval_mode = parse_retrieval_mode(index_mode);
            const Corpus corpus = load_corpus(index_corpus.empty() ? require(cfg.corpus_path, "--corpus") : index_corpus);
            const ClientSet clients = make_clients(cfg);
            VectorIndex::build(corpus, clients.embedder(), cfg.retrieval_mode).save(index_out);
        };
    });

    // retrieve
    auto* retrieve = app.add_subcommand("retrieve", "Top-k facts per query, one JSON line each");
    std::string ret_corpus, ret_index, ret_records, ret_out;
    std::vector<std::string> ret_queries;
    std::optional<std::size_t> ret_k;
    retrieve->add_option("--corpus", ret_corpus, "Corpus JSONL");
    retrieve->add_option("--index", ret_index, "Index snapshot (built in memory when absent)");
    retrieve->add_option("--records", ret_records, "Records JSONL; queries come from their questions");
    retrieve->add_option("-q,--query", ret_queries, "Literal query (repeatable)");
    retrieve->add_option("-k", ret_k, "Number of hits");
    retrieve->add_option("-o,--out", ret_out, "Output JSONL (stdout by default)");
    retrieve->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            if (ret_k) cfg.k = *ret_k;
            if (!ret_index.empty()) cfg.index_path = ret_index;
            cfg.validate();
            const Corpus corpus = load_corpus(ret_corpus.empty() ? require(cfg.corpus_path, "--corpus") : ret_corpus);
            const ClientSet clients = make_clients(cfg);
            const VectorIndex idx = open_index(cfg, corpus, clients.embedder());
            std::vector<std::string> ids, queries;
            if (!ret_records.empty()) {
                for (const auto& r : load_records(ret_records)) {
                    ids.push_back(r.id);
                    VisualContext ctx;
                    if (cfg.query_variant != QueryVariant::Q) ctx = observe(clients, r.image_ref);
                    queries.push_back(build_query(cfg.query_variant, r.question, ctx));
                }
            }
            for (std::size_t i = 0; i < ret_queries.size(); ++i) {
                ids.push_back("q" + std::to_string(i + 1));
                queries.push_back(ret_queries[i]);
            }
            if (queries.empty()) throw ValidationError("retrieve needs --records or --query");
            const auto results = search_batch(idx, clients.embedder(), queries, cfg.k, cfg.workers);
            Sink sink(ret_out, out);
            for (std::size_t i = 0; i < results.size(); ++i) {
                json line;
                line["id"] = ids[i];
                line["query"] = queries[i];
                line["hits"] = hits_json(results[i]);
                *sink << line.dump() << '\n';
            }
        };
    });

    // finetune-retriever
    auto* ft = app.add_subcommand("finetune-retriever", "Train a projection head on contrastive triples");
    std::string ft_corpus, ft_triples, ft_out, ft_init, ft_heldout;
    TrainOptions ft_opts;
    ft->add_option("--corpus", ft_corpus, "Corpus JSONL");
    ft->add_option("--triples", ft_triples, "Triples JSONL {q, d_plus, d_minus}")->required();
    ft->add_option("-o,--out", ft_out, "Head JSON output")->required();
    ft->add_option("--init", ft_init, "Starting head (identity by default)");
    ft->add_option("--heldout", ft_heldout, "Held-out triples; reports recall@1 before and after");
    ft->add_option("--epochs", ft_opts.epochs, "Epochs");
    ft->add_option("--lr", ft_opts.lr, "Learning rate");
    ft->add_option("--batch-size", ft_opts.batch_size, "Mini-batch size");
    ft->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            cfg.head_path.clear();
            const Corpus corpus = load_corpus(ft_corpus.empty() ? require(cfg.corpus_path, "--corpus") : ft_corpus);
            const ClientSet clients = make_clients(cfg);
            const ProjectionHead init = ft_init.empty() ? ProjectionHead::identity(clients.embedder().dim())
                                                        : ProjectionHead::load(ft_init);
            ft_opts.seed = derive_seed(cfg.seed, 20);
            const auto result = train_projection(read_triples(ft_triples), corpus, clients.embedder(), init, ft_opts);
            result.head.save(ft_out);
            for (std::size_t e = 0; e < result.epoch_losses.size(); ++e)
                out << json{{"epoch", e + 1}, {"loss", result.epoch_losses[e]}}.dump() << '\n';
            if (!ft_heldout.empty()) {
                const auto heldout = read_triples(ft_heldout);
                const ProjectedEmbedder before(clients.embedder(), init);
                const ProjectedEmbedder after(clients.embedder(), result.head);
                out << json{{"recall_at_1_before", recall_at_1(heldout, corpus, before, cfg.retrieval_mode)},
                            {"recall_at_1_after", recall_at_1(heldout, corpus, after, cfg.retrieval_mode)}}
                           .dump()
                    << '\n';
            }
        };
    });

    // build-prompt
    auto* bp = app.add_subcommand("build-prompt", "Assemble the explanation prompt for each record");
    std::string bp_corpus, bp_index, bp_records, bp_type, bp_out;
    bp->add_option("--corpus", bp_corpus, "Corpus JSONL (needed for RF types)");
    bp->add_option("--index", bp_index, "Index snapshot");
    bp->add_option("--records", bp_records, "Records JSONL")->required();
    bp->add_option("--type", bp_type, "Prompt type 0-7");
    bp->add_option("-o,--out", bp_out, "Output JSONL");
    bp->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            if (!bp_type.empty()) cfg.prompt_type = parse_prompt_type(bp_type);
            if (!bp_index.empty()) cfg.index_path = bp_index;
            const ClientSet clients = make_clients(cfg);
            const auto components = prompt_components(cfg.prompt_type);
            const bool needs_rf = std::find(components.begin(), components.end(), Component::RF) != components.end();
            std::optional<Corpus> corpus;
            std::optional<VectorIndex> idx;
            if (needs_rf) {
                corpus = load_corpus(bp_corpus.empty() ? require(cfg.corpus_path, "--corpus") : bp_corpus);
                idx = open_index(cfg, *corpus, clients.embedder());
            }
            const ForbiddenWords forbidden(cfg.forbidden_words);
            Sink sink(bp_out, out);
            for (const auto& r : load_records(bp_records)) {
                json line;
                line["id"] = r.id;
                line["type"] = to_string(cfg.prompt_type);
                if (cfg.prompt_type == PromptType::Type7) {
                    line["prompt"] = type7_task_prompt(r.question);
                    line["image_ref"] = r.image_ref;
                } else {
                    PromptInputs in{r.question, observe(clients, r.image_ref), {}, std::nullopt, r.dataset};
                    if (cfg.prompt_type == PromptType::Type0) in.gold_label = r.gold_answer;
                    if (needs_rf) {
                        const auto query = build_query(cfg.query_variant, r.question, in.context);
                        for (const auto& h : search(*idx, clients.embedder(), query, cfg.k))
                            in.facts.push_back(*corpus->find(h.fact_id));
                    }
                    line["prompt"] = assemble_prompt(cfg.prompt_type, in, forbidden);
                }
                *sink << line.dump() << '\n';
            }
        };
    });

    // integrate
    auto* integ = app.add_subcommand("integrate", "Build the truncated reader input");
    std::string integ_knowledge, integ_question, integ_input;
    std::optional<std::size_t> integ_budget;
    integ->add_option("--knowledge", integ_knowledge, "Knowledge text");
    integ->add_option("--question", integ_question, "Question text");
    integ->add_option("--input", integ_input, "JSONL of {knowledge, question}");
    integ->add_option("--budget", integ_budget, "Token budget");
    integ->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            if (integ_budget) cfg.token_budget = *integ_budget;
            cfg.validate();
            std::vector<std::pair<std::string, std::string>> items;
            if (!integ_input.empty()) {
                std::size_t n = 0;
                for (const auto& line : read_lines(integ_input)) {
                    ++n;
                    try {
                        const auto j = json::parse(line);
                        items.emplace_back(j.value("knowledge", ""), j.at("question").get<std::string>());
                    } catch (const json::exception& e) {
                        throw ParseError(n, e.what());
                    }
                }
            } else {
                items.emplace_back(integ_knowledge, require(integ_question, "--question"));
            }
            for (const auto& [k, q] : items) {
                const auto in = build_reader_input(k, q, cfg.token_budget);
                out << json{{"text", in.text},
                            {"tokens", in.tokens},
                            {"token_count", in.tokens.size()},
                            {"truncated", in.truncated}}
                           .dump()
                    << '\n';
            }
        };
    });

    // answer
    auto* ans = app.add_subcommand("answer", "Run the full pipeline over records");
    std::string ans_corpus, ans_index, ans_records, ans_out;
    ans->add_option("--corpus", ans_corpus, "Corpus JSONL");
    ans->add_option("--index", ans_index, "Index snapshot");
    ans->add_option("--records", ans_records, "Records JSONL")->required();
    ans->add_option("-o,--out", ans_out, "Predictions JSONL");
    ans->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            if (!ans_index.empty()) cfg.index_path = ans_index;
            const Corpus corpus = load_corpus(ans_corpus.empty() ? require(cfg.corpus_path, "--corpus") : ans_corpus);
            const auto records = load_records(ans_records);
            const ClientSet clients = make_clients(cfg);
            const VectorIndex idx = open_index(cfg, corpus, clients.embedder());
            const Pipeline pipeline(cfg, clients, corpus, idx);
            const auto results = pipeline.run_all(records, cfg.workers);
            Sink sink(ans_out, out);
            for (const auto& r : results) *sink << answer_output_json(r) << '\n';
        };
    });

    // eval-retrieval
    auto* er = app.add_subcommand("eval-retrieval", "BLEU/ROUGE/cosine of retrieved facts vs gold explanations");
    std::string er_corpus, er_index, er_records, er_agg = "max";
    std::vector<std::size_t> er_ks;
    er->add_option("--corpus", er_corpus, "Corpus JSONL");
    er->add_option("--index", er_index, "Index snapshot");
    er->add_option("--records", er_records, "Records JSONL")->required();
    er->add_option("-k", er_ks, "Cutoffs (repeatable, default 5 and 10)");
    er->add_option("--aggregation", er_agg, "max|mean")->check(CLI::IsMember({"max", "mean"}));
    er->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            if (!er_index.empty()) cfg.index_path = er_index;
            if (er_ks.empty()) er_ks = {5, 10};
            const std::size_t depth = *std::max_element(er_ks.begin(), er_ks.end());
            if (depth == 0) throw ValidationError("-k must be >= 1");
            const Corpus corpus = load_corpus(er_corpus.empty() ? require(cfg.corpus_path, "--corpus") : er_corpus);
            const auto records = load_records(er_records);
            const ClientSet clients = make_clients(cfg);
            const VectorIndex idx = open_index(cfg, corpus, clients.embedder());
            std::vector<std::string> queries;
            for (const auto& r : records) {
                VisualContext ctx;
                if (cfg.query_variant != QueryVariant::Q) ctx = observe(clients, r.image_ref);
                queries.push_back(build_query(cfg.query_variant, r.question, ctx));
            }
            const auto hits = search_batch(idx, clients.embedder(), queries, depth, cfg.workers);
            std::vector<std::vector<std::string>> candidates;
            for (const auto& hs : hits) {
                auto& c = candidates.emplace_back();
                for (const auto& h : hs) c.push_back(corpus.find(h.fact_id)->text);
            }
            const auto agg = er_agg == "mean" ? Aggregation::Mean : Aggregation::Max;
            std::vector<std::pair<std::string, MetricReport>> rows;
            for (const auto k : er_ks) {
                auto report = retrieval_report(records, candidates, k, MetricSet{}, clients.base_embedder.get(), agg);
                out << report_json(report) << '\n';
                rows.emplace_back("@" + std::to_string(k), report);
            }
            err << report_table(rows);
        };
    });

    // eval-answers
    auto* ea = app.add_subcommand("eval-answers", "Exact-match and cosine-threshold accuracy");
    std::string ea_records, ea_predictions;
    double ea_threshold = kDefaultCosineThreshold;
    ea->add_option("--records", ea_records, "Records JSONL")->required();
    ea->add_option("--predictions", ea_predictions, "Predictions JSONL {id, prediction}")->required();
    ea->add_option("--threshold", ea_threshold, "Cosine threshold");
    ea->callback([&] {
        action = [&] {
            const auto cfg = resolve_config(g);
            const auto records = load_records(ea_records);
            std::map<std::string, std::string> by_id;
            std::size_t n = 0;
            for (const auto& line : read_lines(ea_predictions)) {
                ++n;
                try {
                    const auto j = json::parse(line);
                    by_id[j.at("id").get<std::string>()] = j.at("prediction").get<std::string>();
                } catch (const json::exception& e) {
                    throw ParseError(n, e.what());
                }
            }
            std::vector<std::string> preds;
            for (const auto& r : records) {
                const auto it = by_id.find(r.id);
                if (it == by_id.end()) throw ValidationError("no prediction for record " + r.id);
                preds.push_back(it->second);
            }
            const ClientSet clients = make_clients(cfg);
            out << report_json(answer_report(records, preds, clients.base_embedder.get(), ea_threshold)) << '\n';
        };
    });

    // train-toy
    auto* tt = app.add_subcommand("train-toy", "Train the blob classifier under label noise");
    std::string tt_loss;
    double tt_noise = 0.0, tt_lr = 0.1;
    int tt_epochs = 200;
    BlobSpec tt_blobs;
    tt->add_option("--loss", tt_loss, "CE|SCE|GCE|MIXED (defaults to loss.kind)");
    tt->add_option("--noise", tt_noise, "Symmetric noise rate");
    tt->add_option("--epochs", tt_epochs, "Epochs");
    tt->add_option("--lr", tt_lr, "Learning rate");
    tt->add_option("--samples", tt_blobs.samples, "Training samples");
    tt->add_option("--radius", tt_blobs.radius, "Class-center radius");
    tt->add_option("--stddev", tt_blobs.stddev, "Blob standard deviation");
    tt->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            if (!tt_loss.empty()) cfg.loss.kind = parse_loss_kind(tt_loss);
            cfg.loss.validate();
            if (tt_noise < 0.0 || tt_noise > 1.0) throw ValidationError("--noise must be in [0, 1]");
            Dataset train = make_blobs(tt_blobs, derive_seed(cfg.seed, 30));
            BlobSpec test_spec = tt_blobs;
            const Dataset test = make_blobs(test_spec, derive_seed(cfg.seed, 31));
            const auto noisy = inject_label_noise(train.labels, train.classes, {tt_noise, derive_seed(cfg.seed, 32)});
            train.labels = noisy.labels;
            const auto r = train_toy(train, test, cfg.loss, tt_epochs, tt_lr, derive_seed(cfg.seed, 33));
            out << json{{"loss_kind", loss_label(cfg.loss)},
                        {"noise_rate", tt_noise},
                        {"flipped", noisy.flipped.size()},
                        {"test_acc", r.test_accuracy},
                        {"final_train_loss", r.epoch_losses.empty() ? 0.0 : r.epoch_losses.back()}}
                       .dump()
                << '\n';
        };
    });

    // inject-noise
    auto* inj = app.add_subcommand("inject-noise", "Flip an exact fraction of integer labels");
    std::string inj_labels;
    std::size_t inj_classes = 0;
    double inj_rate = 0.0;
    inj->add_option("--labels", inj_labels, "File with one integer label per line")->required();
    inj->add_option("--classes", inj_classes, "Number of classes")->required();
    inj->add_option("--rate", inj_rate, "Noise rate")->required();
    inj->callback([&] {
        action = [&] {
            const auto cfg = resolve_config(g);
            std::vector<int> labels;
            std::size_t n = 0;
            for (const auto& line : read_lines(inj_labels)) {
                ++n;
                try {
                    std::size_t used = 0;
                    labels.push_back(std::stoi(line, &used));
                    if (line.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(line);
                } catch (const std::exception&) {
                    throw ParseError(n, "not an integer label: " + line);
                }
            }
            const auto noisy = inject_label_noise(labels, inj_classes, {inj_rate, derive_seed(cfg.seed, 40)});
            std::size_t next = 0;
            for (std::size_t i = 0; i < labels.size(); ++i) {
                const bool flipped = next < noisy.flipped.size() && noisy.flipped[next] == i;
                if (flipped) ++next;
                out << json{{"index", i}, {"label", labels[i]}, {"noisy_label", noisy.labels[i]}, {"flipped", flipped}}
                           .dump()
                    << '\n';
            }
        };
    });

    // audit
    auto* audit = app.add_subcommand("audit", "Summarize manual noise-audit tags");
    std::string audit_tags, audit_format = "table";
    audit->add_option("--tags", audit_tags, "File with one tag per line")->required();
    audit->add_option("--format", audit_format, "table|csv|json")->check(CLI::IsMember({"table", "csv", "json"}));
    audit->callback([&] {
        action = [&] {
            const auto summary = audit_summary(read_lines(audit_tags));
            if (audit_format == "csv") {
                out << audit_csv(summary);
            } else if (audit_format == "json") {
                json j;
                j["sample_size"] = summary.sample_size;
                for (const auto c : kNoiseCategories) j[std::string(to_string(c))] = summary.count(c);
                j["noisy"] = summary.noisy();
                out << j.dump() << '\n';
            } else {
                out << audit_table(summary);
            }
        };
    });

    // ablate
    auto* ab = app.add_subcommand("ablate", "Loss x noise-rate x seed grid on the blob task");
    std::vector<std::string> ab_losses{"CE", "SCE", "GCE", "MIXED"};
    std::string ab_rates = "0,0.15,0.3", ab_out;
    AblationConfig ab_cfg;
    ab->add_option("--losses", ab_losses, "Loss kinds")->delimiter(',');
    ab->add_option("--rates", ab_rates, "Comma-separated noise rates");
    ab->add_option("--seeds", ab_cfg.seeds, "Seeds per cell");
    ab->add_option("--epochs", ab_cfg.epochs, "Epochs");
    ab->add_option("--lr", ab_cfg.lr, "Learning rate");
    ab->add_option("-o,--out", ab_out, "Per-run JSONL (stdout by default)");
    ab->callback([&] {
        action = [&] {
            const auto cfg = resolve_config(g);
            for (const auto& name : ab_losses) {
                LossConfig l = cfg.loss;
                l.kind = parse_loss_kind(name);
                ab_cfg.losses.push_back(l);
            }
            ab_cfg.noise_rates = parse_rates(ab_rates);
            ab_cfg.master_seed = cfg.seed;
            ab_cfg.workers = cfg.workers;
            const auto rows = ablation_grid(ab_cfg);
            Sink sink(ab_out, out);
            for (const auto& r : rows) *sink << ablation_row_json(r) << '\n';
            err << summary_table(summarize(rows));
        };
    });

    // bench
    auto* bench = app.add_subcommand("bench", "Per-stage latency, sequential and concurrent");
    std::string bench_corpus, bench_index, bench_records;
    std::size_t bench_n = 10;
    bench->add_option("--corpus", bench_corpus, "Corpus JSONL");
    bench->add_option("--index", bench_index, "Index snapshot");
    bench->add_option("--records", bench_records, "Records JSONL")->required();
    bench->add_option("-n", bench_n, "Records to time");
    bench->callback([&] {
        action = [&] {
            auto cfg = resolve_config(g);
            if (!bench_index.empty()) cfg.index_path = bench_index;
            const Corpus corpus = load_corpus(bench_corpus.empty() ? require(cfg.corpus_path, "--corpus") : bench_corpus);
            auto records = load_records(bench_records);
            if (records.empty()) throw ValidationError("bench needs at least one record");
            if (bench_n < records.size()) records.resize(bench_n);
            const ClientSet clients = make_clients(cfg);
            const VectorIndex idx = open_index(cfg, corpus, clients.embedder());
            const Pipeline pipeline(cfg, clients, corpus, idx);
            for (const bool concurrent : {false, true}) {
                StageTiming mean;
                mean.concurrent = concurrent;
                for (const auto& r : records) {
                    StageTiming t;
                    pipeline.run(r, &t, concurrent);
                    mean.caption_ms += t.caption_ms;
                    mean.detect_ms += t.detect_ms;
                    mean.retrieve_ms += t.retrieve_ms;
                    mean.explain_ms += t.explain_ms;
                    mean.integrate_ms += t.integrate_ms;
                    mean.answer_ms += t.answer_ms;
                    mean.total_ms += t.total_ms;
                }
                const double n = static_cast<double>(records.size());
                for (double* v : {&mean.caption_ms, &mean.detect_ms, &mean.retrieve_ms, &mean.explain_ms,
                                  &mean.integrate_ms, &mean.answer_ms, &mean.total_ms})
                    *v /= n;
                if (!concurrent) mean.total_ms = mean.stage_sum();
                out << timing_json(mean).dump() << '\n';
                std::ostringstream line;
                line << (concurrent ? "concurrent: " : "sequential: ");
                if (concurrent) {
                    line << "(max(" << fmt_ms(mean.caption_ms) << ", " << fmt_ms(mean.detect_ms) << ") + ";
                } else {
                    line << "(" << fmt_ms(mean.caption_ms) << " + " << fmt_ms(mean.detect_ms) << " + ";
                }
                line << fmt_ms(mean.retrieve_ms) << " + " << fmt_ms(mean.explain_ms) << " + "
                     << fmt_ms(mean.integrate_ms) << " + " << fmt_ms(mean.answer_ms) << ") = " << std::fixed
                     << std::setprecision(mean.total_ms >= 100.0 ? 2 : 5) << mean.total_ms / 1000.0 << " sec";
                err << line.str() << '\n';
            }
        };
    });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (action) action();
        return kExitOk;
    } catch (const TransportError& e) {
        err << "error: " << e.what() << '\n';
        return kExitTransport;
    } catch (const ContractError& e) {
        err << "error: " << e.what() << '\n';
        return kExitTransport;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace nlki

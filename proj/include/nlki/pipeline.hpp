#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nlki/clients.hpp"
#include "nlki/config.hpp"
#include "nlki/contrastive.hpp"
#include "nlki/corpus.hpp"
#include "nlki/integration.hpp"
#include "nlki/vector_index.hpp"

namespace nlki {

// Owning bundle of the five service clients. `embedder` is the projected
// embedder when a head is configured, otherwise the base one.
struct ClientSet {
    std::unique_ptr<TextEmbedder> base_embedder;
    std::unique_ptr<TextEmbedder> projected;
    std::unique_ptr<Captioner> captioner;
    std::unique_ptr<ObjectDetector> detector;
    std::unique_ptr<Explainer> explainer;
    std::unique_ptr<Reader> reader;

    const TextEmbedder& embedder() const { return projected ? *projected : *base_embedder; }
};

// Mock clients take seeds derived from the master seed; http clients read
// their base URLs from the config or NLKI_*_URL.
ClientSet make_clients(const PipelineConfig& config);

struct StageTiming {
    double caption_ms = 0.0;
    double detect_ms = 0.0;
    double retrieve_ms = 0.0;
    double explain_ms = 0.0;
    double integrate_ms = 0.0;
    double answer_ms = 0.0;
    double total_ms = 0.0;  // sum of stages when sequential, wall time when concurrent
    bool concurrent = false;

    double max_stage() const;
    double stage_sum() const;
};

struct AnswerOutput {
    std::string id;
    std::string prediction;
    std::vector<std::string> options;
    std::vector<double> scores;
    std::vector<RetrievalHit> hits;
    std::optional<std::string> explanation;
    std::optional<std::string> rejected;  // forbidden word that voided the explanation
    std::string reader_text;
    bool truncated = false;
    std::string provenance;
};

std::string answer_output_json(const AnswerOutput& out);

class Pipeline {
public:
    // The index must have been built with the same embedder.
    Pipeline(const PipelineConfig& config, const ClientSet& clients, const Corpus& corpus, const VectorIndex& index);

    // Visual context -> retrieve -> prompt -> explain -> reader input -> answer.
    // With `concurrent`, captioning and detection run in parallel.
    AnswerOutput run(const EvalRecord& record, StageTiming* timing = nullptr, bool concurrent = true) const;

    // Records are spread over `workers` threads; results keep input order.
    std::vector<AnswerOutput> run_all(const std::vector<EvalRecord>& records, std::size_t workers) const;

private:
    const PipelineConfig* config_;
    const ClientSet* clients_;
    const Corpus* corpus_;
    const VectorIndex* index_;
    ForbiddenWords forbidden_;
};

// Loads the configured index, or builds one in memory from the corpus.
VectorIndex open_index(const PipelineConfig& config, const Corpus& corpus, const TextEmbedder& embedder);

}  // namespace nlki

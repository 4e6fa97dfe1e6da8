#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nlki/clients.hpp"
#include "nlki/corpus.hpp"
#include "nlki/rng.hpp"
#include "nlki/vector_index.hpp"

namespace nlki {

// Query text with one relevant and one sampled irrelevant fact id.
struct Triple {
    std::string q;
    std::string d_plus;
    std::string d_minus;
};

// -log(exp(s+) / (exp(s+) + exp(s-))), evaluated as softplus(s- - s+).
double contrastive_loss(double s_plus, double s_minus);

// d loss / d s_plus (d loss / d s_minus is its negation).
double contrastive_loss_grad(double s_plus, double s_minus);

// Uniform draw over corpus facts other than `exclude`.
std::string sample_negative(const Corpus& corpus, const std::string& exclude, Rng& rng);

// Linear map applied to base token embeddings; outputs are re-normalized.
struct ProjectionHead {
    std::size_t out_dim = 0;
    std::size_t in_dim = 0;
    std::vector<double> weights;  // row-major out_dim x in_dim

    static ProjectionHead identity(std::size_t dim);

    double& at(std::size_t r, std::size_t c) { return weights[r * in_dim + c]; }
    double at(std::size_t r, std::size_t c) const { return weights[r * in_dim + c]; }

    EmbeddingVector apply(const EmbeddingVector& v) const;
    TokenEmbeddings apply(const TokenEmbeddings& t) const;

    void save(const std::filesystem::path& path) const;
    static ProjectionHead load(const std::filesystem::path& path);

    bool operator==(const ProjectionHead&) const = default;
};

// Embedder decorator that projects every vector through a head.
class ProjectedEmbedder final : public TextEmbedder {
public:
    ProjectedEmbedder(const TextEmbedder& base, ProjectionHead head);

    std::size_t dim() const override { return head_.out_dim; }
    std::uint64_t seed() const override;
    EmbeddingVector embed_text(std::string_view text) const override;
    TokenEmbeddings embed_tokens(std::string_view text) const override;

    const ProjectionHead& head() const { return head_; }

private:
    const TextEmbedder* base_;
    ProjectionHead head_;
};

// Base (unprojected) token embeddings for one triple.
struct TripleEmbeddings {
    TokenEmbeddings q;
    TokenEmbeddings d_plus;
    TokenEmbeddings d_minus;
};

// Projected MaxSim score S(q, d) under `head`.
double projected_maxsim(const ProjectionHead& head, const TokenEmbeddings& q, const TokenEmbeddings& d);

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> grad;  // same layout as ProjectionHead::weights
};

// Contrastive loss of one triple under `head` and its gradient w.r.t. the
// weights. MaxSim uses the first maximizing document token as subgradient.
LossAndGradient triple_loss_and_gradient(const ProjectionHead& head, const TripleEmbeddings& t);

struct TrainOptions {
    std::size_t epochs = 4;
    double lr = 1.0;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

struct TrainResult {
    ProjectionHead head;
    std::vector<double> epoch_losses;  // mean loss over each epoch's steps
};

// Mini-batch gradient descent on the mean contrastive loss over projected
// MaxSim scores. Deterministic for a fixed seed. epochs == 0 returns the head
// unchanged. Throws ValidationError on lr <= 0, unknown fact ids, or a head
// whose in_dim differs from the embedder dim.
TrainResult train_projection(const std::vector<Triple>& triples, const Corpus& corpus,
                             const TextEmbedder& embedder, const ProjectionHead& head, const TrainOptions& options);

std::vector<Triple> read_triples(const std::filesystem::path& path);
void write_triples(const std::filesystem::path& path, const std::vector<Triple>& triples);

// Percent of triples whose positive is the top hit over the whole corpus.
double recall_at_1(const std::vector<Triple>& triples, const Corpus& corpus, const TextEmbedder& embedder,
                   RetrievalMode mode);

}  // namespace nlki

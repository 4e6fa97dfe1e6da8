#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlki {

struct SceneTriplet {
    std::string subject;
    std::string relation;
    std::string object;

    bool operator==(const SceneTriplet&) const = default;
};

// Textual stand-ins for the image: traditional caption, dense caption,
// region captions, detected objects and scene-graph triplets. Any field may
// be absent.
struct VisualContext {
    std::optional<std::string> traditional_caption;
    std::optional<std::string> dense_caption;
    std::optional<std::vector<std::string>> region_captions;
    std::optional<std::vector<std::string>> objects;
    std::optional<std::vector<SceneTriplet>> scene_graph;

    bool operator==(const VisualContext&) const = default;
};

struct EmbeddingVector {
    std::vector<float> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

// Per-token vectors aligned with `tokens`.
struct TokenEmbeddings {
    std::vector<std::string> tokens;
    std::vector<EmbeddingVector> vectors;

    std::size_t size() const { return vectors.size(); }
    bool empty() const { return vectors.empty(); }
};

struct AnswerResult {
    std::string label;
    std::vector<double> scores;  // aligned with the request's options
};

struct ClientOptions {
    double timeout_s = 30.0;
    int retries = 0;
};

class TextEmbedder {
public:
    virtual ~TextEmbedder() = default;
    virtual std::size_t dim() const = 0;
    // Identifies the vector space; recorded in index snapshots.
    virtual std::uint64_t seed() const { return 0; }
    virtual EmbeddingVector embed_text(std::string_view text) const = 0;
    virtual TokenEmbeddings embed_tokens(std::string_view text) const = 0;
};

class Captioner {
public:
    virtual ~Captioner() = default;
    virtual VisualContext caption(std::string_view image_ref) const = 0;
};

class ObjectDetector {
public:
    virtual ~ObjectDetector() = default;
    virtual std::vector<std::string> detect_objects(std::string_view image_ref) const = 0;
};

class Explainer {
public:
    virtual ~Explainer() = default;
    // `image_ref` is only set for image-conditioned generation (Type-7).
    virtual std::string explain(std::string_view prompt, std::string_view image_ref = {}) const = 0;
};

class Reader {
public:
    virtual ~Reader() = default;
    virtual AnswerResult answer(std::string_view text, std::string_view image_ref,
                                const std::vector<std::string>& options) const = 0;
};

// Normalizes in place; throws ContractError on a zero vector.
void normalize(EmbeddingVector& v);
double dot(const EmbeddingVector& a, const EmbeddingVector& b);
double l2_norm(const EmbeddingVector& v);

// Validates an embedder response against the expected dimension.
void check_dim(const EmbeddingVector& v, std::size_t expected);

}  // namespace nlki

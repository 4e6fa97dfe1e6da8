#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nlki/clients.hpp"
#include "nlki/tokenizer.hpp"

namespace nlki {

// Optional shared structure: each token is hashed to one of `topics` fixed
// directions and that direction is added with `weight` before normalizing,
// so unrelated tokens of one topic look alike (as in anisotropic pretrained
// spaces). topics == 0 disables it.
struct TopicNoise {
    std::size_t topics = 0;
    double weight = 0.0;
};

// Bag-of-tokens embedder: every token maps to a seeded pseudo-random unit
// vector; a text embeds to the normalized sum of its token vectors.
class MockEmbedder final : public TextEmbedder {
public:
    explicit MockEmbedder(std::size_t dim = 64, std::uint64_t seed = 0,
                          const Tokenizer& tokenizer = default_tokenizer(), TopicNoise topic_noise = {});

    std::size_t dim() const override { return dim_; }
    std::uint64_t seed() const override;
    EmbeddingVector embed_text(std::string_view text) const override;
    TokenEmbeddings embed_tokens(std::string_view text) const override;

    // Unit vector for a single (already normalized) token.
    EmbeddingVector token_vector(std::string_view token) const;

private:
    std::vector<double> raw_token_vector(std::string_view token) const;

    std::size_t dim_;
    std::uint64_t seed_;
    const Tokenizer* tokenizer_;
    TopicNoise topic_noise_;
    std::vector<std::vector<double>> topic_dirs_;
};

// Synthetic scene derived from a hash of (image_ref, seed); shared by the
// mock captioner and detector so their outputs agree.
struct MockScene {
    std::vector<std::string> objects;
    std::vector<std::string> colors;
    std::string scene;
    std::string surface;
};

MockScene mock_scene(std::string_view image_ref, std::uint64_t seed);

class MockCaptioner final : public Captioner {
public:
    explicit MockCaptioner(std::uint64_t seed = 0, std::chrono::milliseconds latency = {})
        : seed_(seed), latency_(latency) {}
    VisualContext caption(std::string_view image_ref) const override;

private:
    std::uint64_t seed_;
    std::chrono::milliseconds latency_;
};

class MockObjectDetector final : public ObjectDetector {
public:
    explicit MockObjectDetector(std::uint64_t seed = 0, std::chrono::milliseconds latency = {})
        : seed_(seed), latency_(latency) {}
    std::vector<std::string> detect_objects(std::string_view image_ref) const override;

private:
    std::uint64_t seed_;
    std::chrono::milliseconds latency_;
};

// Echoes the dense caption (or the best available context line) and objects
// from the prompt into one sentence, with every listed forbidden word removed.
class MockExplainer final : public Explainer {
public:
    explicit MockExplainer(std::uint64_t seed = 0, std::chrono::milliseconds latency = {})
        : seed_(seed), latency_(latency) {}
    std::string explain(std::string_view prompt, std::string_view image_ref = {}) const override;

private:
    std::uint64_t seed_;
    std::chrono::milliseconds latency_;
};

// Scores options by token overlap with the input text plus a seeded jitter,
// then softmax-normalizes.
class MockReader final : public Reader {
public:
    explicit MockReader(std::uint64_t seed = 0, std::chrono::milliseconds latency = {})
        : seed_(seed), latency_(latency) {}
    AnswerResult answer(std::string_view text, std::string_view image_ref,
                        const std::vector<std::string>& options) const override;

private:
    std::uint64_t seed_;
    std::chrono::milliseconds latency_;
};

// Test reader that returns a fixed answer per image_ref (e.g. the gold label).
class EchoReader final : public Reader {
public:
    explicit EchoReader(std::map<std::string, std::string> answers) : answers_(std::move(answers)) {}
    AnswerResult answer(std::string_view text, std::string_view image_ref,
                        const std::vector<std::string>& options) const override;

private:
    std::map<std::string, std::string> answers_;
};

// Parses the quoted words from a prompt's "Forbidden words:" line.
std::vector<std::string> parse_forbidden_words(std::string_view prompt);

}  // namespace nlki

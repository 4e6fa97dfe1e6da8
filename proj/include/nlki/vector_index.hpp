#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nlki/clients.hpp"
#include "nlki/corpus.hpp"

namespace nlki {

enum class RetrievalMode : std::uint8_t { Single = 0, Late = 1 };

RetrievalMode parse_retrieval_mode(std::string_view name);
std::string_view to_string(RetrievalMode m);

struct RetrievalHit {
    std::string fact_id;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based

    bool operator==(const RetrievalHit&) const = default;
};

// Sum over query tokens of the best dot product against any document token.
// Throws ValidationError if either side is empty.
double maxsim_score(const TokenEmbeddings& query, const TokenEmbeddings& doc);

// Same on packed row-major float matrices of width `dim`.
double maxsim_score(std::span<const float> query_rows, std::span<const float> doc_rows, std::size_t dim);

// Exact index over unit vectors: one row per fact (single-vector mode) or one
// block of token rows per fact (late-interaction mode). Immutable once built.
//
// Snapshot layout (little-endian):
//   "NLKIIDX\0" | u8 version | u8 mode | u32 dim | u64 count | u64 seed
//   late only: u64 total_rows | u32 rows-per-fact[count]
//   f32 rows[total_rows * dim]
//   per fact: u32 id_length | id bytes
class VectorIndex {
public:
    static constexpr std::uint8_t kFormatVersion = 1;

    // Throws ValidationError on an empty corpus, ContractError on dim drift.
    static VectorIndex build(const Corpus& corpus, const TextEmbedder& embedder, RetrievalMode mode);

    static VectorIndex read(std::istream& in);
    static VectorIndex load(const std::filesystem::path& path);
    void write(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;

    RetrievalMode mode() const { return mode_; }
    std::size_t dim() const { return dim_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t size() const { return ids_.size(); }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    const std::vector<std::string>& ids() const { return ids_; }

    // Rows for fact i (one row in single mode, its token rows in late mode).
    std::span<const float> rows(std::size_t i) const;

private:
    VectorIndex() = default;

    RetrievalMode mode_ = RetrievalMode::Single;
    std::size_t dim_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<std::string> ids_;
    std::vector<float> data_;
    std::vector<std::size_t> offsets_;  // row offsets, size()+1 entries
};

// Ordering used everywhere: score descending, then fact id ascending.
bool hit_before(const RetrievalHit& a, const RetrievalHit& b);

// Single-vector cosine search. Requires a Single-mode index.
std::vector<RetrievalHit> search_topk(const VectorIndex& index, const TextEmbedder& embedder,
                                      std::string_view query, std::size_t k);

// Late-interaction MaxSim search. Requires a Late-mode index.
std::vector<RetrievalHit> search_topk_late(const VectorIndex& index, const TextEmbedder& embedder,
                                           std::string_view query, std::size_t k);

// Dispatches on the index mode.
std::vector<RetrievalHit> search(const VectorIndex& index, const TextEmbedder& embedder, std::string_view query,
                                 std::size_t k);

// Runs `search` for every query across `workers` threads; output order
// follows `queries` and does not depend on the worker count.
std::vector<std::vector<RetrievalHit>> search_batch(const VectorIndex& index, const TextEmbedder& embedder,
                                                    const std::vector<std::string>& queries, std::size_t k,
                                                    std::size_t workers);

// Exhaustive oracle: embeds every fact from scratch, scores all, sorts fully.
std::vector<RetrievalHit> brute_force_topk(const Corpus& corpus, const TextEmbedder& embedder,
                                           std::string_view query, std::size_t k, RetrievalMode mode);

}  // namespace nlki

#include "nlki/vector_index.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <thread>

#include "nlki/errors.hpp"

namespace nlki {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

namespace {

constexpr std::array<char, 8> kMagic = {'N', 'L', 'K', 'I', 'I', 'D', 'X', '\0'};

double row_dot(const float* a, const float* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += static_cast<double>(a[i]) * b[i];
    return s;
}

template <typename T>
void put(std::ostream& out, T value) {
    std::array<char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), bytes.size());
}

template <typename T>
T get(std::istream& in) {
    std::array<char, sizeof(T)> bytes;
    if (!in.read(bytes.data(), bytes.size())) throw ValidationError("index snapshot truncated");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

void check_query(std::string_view query, std::size_t k) {
    if (k == 0) throw ValidationError("k must be >= 1");
    if (query.find_first_not_of(" \t\r\n") == std::string_view::npos) throw ValidationError("empty query");
}

// Keeps the best k of (score, row) under hit_before ordering.
std::vector<RetrievalHit> select_topk(const VectorIndex& index, const std::vector<double>& scores, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const auto better = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return index.id(a) < index.id(b);
    };
    const std::size_t n = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), better);
    std::vector<RetrievalHit> hits;
    hits.reserve(n);
    for (std::size_t r = 0; r < n; ++r) hits.push_back({index.id(order[r]), scores[order[r]], r + 1});
    return hits;
}

std::vector<float> pack_rows(const TokenEmbeddings& t, std::size_t dim) {
    std::vector<float> rows;
    rows.reserve(t.size() * dim);
    for (const auto& v : t.vectors) {
        check_dim(v, dim);
        rows.insert(rows.end(), v.values.begin(), v.values.end());
    }
    return rows;
}

}  // namespace

RetrievalMode parse_retrieval_mode(std::string_view name) {
    if (name == "single") return RetrievalMode::Single;
    if (name == "late") return RetrievalMode::Late;
    throw ValidationError("unknown retrieval mode \"" + std::string(name) + "\" (expected single|late)");
}

std::string_view to_string(RetrievalMode m) { return m == RetrievalMode::Single ? "single" : "late"; }

double maxsim_score(std::span<const float> query_rows, std::span<const float> doc_rows, std::size_t dim) {
    if (dim == 0 || query_rows.empty() || doc_rows.empty()) throw ValidationError("maxsim requires non-empty inputs");
    const std::size_t nq = query_rows.size() / dim;
    const std::size_t nd = doc_rows.size() / dim;
    double total = 0.0;
    for (std::size_t i = 0; i < nq; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < nd; ++j) {
            best = std::max(best, row_dot(query_rows.data() + i * dim, doc_rows.data() + j * dim, dim));
        }
        total += best;
    }
    return total;
}

double maxsim_score(const TokenEmbeddings& query, const TokenEmbeddings& doc) {
    if (query.empty() || doc.empty()) throw ValidationError("maxsim requires non-empty token embeddings");
    double total = 0.0;
    for (const auto& q : query.vectors) {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& d : doc.vectors) best = std::max(best, dot(q, d));
        total += best;
    }
    return total;
}

VectorIndex VectorIndex::build(const Corpus& corpus, const TextEmbedder& embedder, RetrievalMode mode) {
    if (corpus.empty()) throw ValidationError("cannot index an empty corpus");
    VectorIndex idx;
    idx.mode_ = mode;
    idx.dim_ = embedder.dim();
    idx.seed_ = embedder.seed();
    idx.ids_.reserve(corpus.size());
    idx.offsets_.reserve(corpus.size() + 1);
    idx.offsets_.push_back(0);
    for (const auto& fact : corpus) {
        if (mode == RetrievalMode::Single) {
            const auto v = embedder.embed_text(fact.text);
            check_dim(v, idx.dim_);
            idx.data_.insert(idx.data_.end(), v.values.begin(), v.values.end());
            idx.offsets_.push_back(idx.offsets_.back() + 1);
        } else {
            const auto t = embedder.embed_tokens(fact.text);
            if (t.empty()) throw ContractError("fact " + fact.id + " produced no token embeddings");
            const auto rows = pack_rows(t, idx.dim_);
            idx.data_.insert(idx.data_.end(), rows.begin(), rows.end());
            idx.offsets_.push_back(idx.offsets_.back() + t.size());
        }
        idx.ids_.push_back(fact.id);
    }
    return idx;
}

std::span<const float> VectorIndex::rows(std::size_t i) const {
    const std::size_t b = offsets_[i] * dim_;
    const std::size_t e = offsets_[i + 1] * dim_;
    return std::span<const float>(data_).subspan(b, e - b);
}

void VectorIndex::write(std::ostream& out) const {
    out.write(kMagic.data(), kMagic.size());
    put<std::uint8_t>(out, kFormatVersion);
    put<std::uint8_t>(out, static_cast<std::uint8_t>(mode_));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
    put<std::uint64_t>(out, ids_.size());
    put<std::uint64_t>(out, seed_);
    if (mode_ == RetrievalMode::Late) {
        put<std::uint64_t>(out, offsets_.back());
        for (std::size_t i = 0; i < ids_.size(); ++i) {
            put<std::uint32_t>(out, static_cast<std::uint32_t>(offsets_[i + 1] - offsets_[i]));
        }
    }
    for (float f : data_) put<float>(out, f);
    for (const auto& id : ids_) {
        put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    if (!out) throw ValidationError("failed writing index snapshot");
}

VectorIndex VectorIndex::read(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw ValidationError("not an index snapshot");
    const auto version = get<std::uint8_t>(in);
    if (version != kFormatVersion) {
        throw ValidationError("unsupported index snapshot version " + std::to_string(version));
    }
    VectorIndex idx;
    const auto mode = get<std::uint8_t>(in);
    if (mode > 1) throw ValidationError("bad retrieval mode in snapshot");
    idx.mode_ = static_cast<RetrievalMode>(mode);
    idx.dim_ = get<std::uint32_t>(in);
    const auto count = get<std::uint64_t>(in);
    idx.seed_ = get<std::uint64_t>(in);
    if (idx.dim_ == 0) throw ValidationError("snapshot has zero dim");
    idx.offsets_.reserve(count + 1);
    idx.offsets_.push_back(0);
    if (idx.mode_ == RetrievalMode::Late) {
        const auto total = get<std::uint64_t>(in);
        for (std::uint64_t i = 0; i < count; ++i) {
            idx.offsets_.push_back(idx.offsets_.back() + get<std::uint32_t>(in));
        }
        if (idx.offsets_.back() != total) throw ValidationError("snapshot row counts inconsistent");
    } else {
        for (std::uint64_t i = 0; i < count; ++i) idx.offsets_.push_back(i + 1);
    }
    idx.data_.resize(idx.offsets_.back() * idx.dim_);
    for (float& f : idx.data_) f = get<float>(in);
    idx.ids_.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto len = get<std::uint32_t>(in);
        std::string id(len, '\0');
        if (!in.read(id.data(), len)) throw ValidationError("index snapshot truncated");
        idx.ids_.push_back(std::move(id));
    }
    return idx;
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    return read(in);
}

void VectorIndex::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    write(out);
}

bool hit_before(const RetrievalHit& a, const RetrievalHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.fact_id < b.fact_id;
}

std::vector<RetrievalHit> search_topk(const VectorIndex& index, const TextEmbedder& embedder,
                                      std::string_view query, std::size_t k) {
    check_query(query, k);
    if (index.mode() != RetrievalMode::Single) throw ValidationError("search_topk needs a single-vector index");
    if (embedder.dim() != index.dim()) throw ContractError("embedder dim does not match index dim");
    const auto q = embedder.embed_text(query);
    check_dim(q, index.dim());
    std::vector<double> scores(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) scores[i] = row_dot(q.values.data(), index.rows(i).data(), index.dim());
    return select_topk(index, scores, k);
}

std::vector<RetrievalHit> search_topk_late(const VectorIndex& index, const TextEmbedder& embedder,
                                           std::string_view query, std::size_t k) {
    check_query(query, k);
    if (index.mode() != RetrievalMode::Late) throw ValidationError("search_topk_late needs a late-interaction index");
    if (embedder.dim() != index.dim()) throw ContractError("embedder dim does not match index dim");
    const auto q = embedder.embed_tokens(query);
    const auto q_rows = pack_rows(q, index.dim());
    std::vector<double> scores(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) scores[i] = maxsim_score(q_rows, index.rows(i), index.dim());
    return select_topk(index, scores, k);
}

std::vector<RetrievalHit> search(const VectorIndex& index, const TextEmbedder& embedder, std::string_view query,
                                 std::size_t k) {
    return index.mode() == RetrievalMode::Single ? search_topk(index, embedder, query, k)
                                                 : search_topk_late(index, embedder, query, k);
}

std::vector<std::vector<RetrievalHit>> search_batch(const VectorIndex& index, const TextEmbedder& embedder,
                                                    const std::vector<std::string>& queries, std::size_t k,
                                                    std::size_t workers) {
    std::vector<std::vector<RetrievalHit>> results(queries.size());
    workers = std::max<std::size_t>(1, std::min(workers, queries.size()));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < queries.size(); i += workers) {
                    results[i] = search(index, embedder, queries[i], k);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

std::vector<RetrievalHit> brute_force_topk(const Corpus& corpus, const TextEmbedder& embedder,
                                           std::string_view query, std::size_t k, RetrievalMode mode) {
    if (corpus.empty()) return {};
    check_query(query, k);
    std::vector<RetrievalHit> all;
    all.reserve(corpus.size());
    if (mode == RetrievalMode::Single) {
        const auto q = embedder.embed_text(query);
        for (const auto& f : corpus) all.push_back({f.id, dot(q, embedder.embed_text(f.text)), 0});
    } else {
        const auto q = embedder.embed_tokens(query);
        for (const auto& f : corpus) all.push_back({f.id, maxsim_score(q, embedder.embed_tokens(f.text)), 0});
    }
    std::sort(all.begin(), all.end(), hit_before);
    all.resize(std::min(k, all.size()));
    for (std::size_t r = 0; r < all.size(); ++r) all[r].rank = r + 1;
    return all;
}

}  // namespace nlki

#include "nlki/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "nlki/errors.hpp"
#include "nlki/vector_index.hpp"

namespace nlki {

double contrastive_loss(double s_plus, double s_minus) {
    if (std::isnan(s_plus) || std::isnan(s_minus)) throw ValidationError("contrastive_loss: NaN score");
    const double x = s_minus - s_plus;
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double contrastive_loss_grad(double s_plus, double s_minus) {
    if (std::isnan(s_plus) || std::isnan(s_minus)) throw ValidationError("contrastive_loss: NaN score");
    // -(1 - sigmoid(s+ - s-)) = -sigmoid(s- - s+)
    const double x = s_minus - s_plus;
    const double sig = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    return -sig;
}

std::string sample_negative(const Corpus& corpus, const std::string& exclude, Rng& rng) {
    const auto excluded = corpus.index_of(exclude);
    const std::size_t pool = corpus.size() - (excluded ? 1 : 0);
    if (pool == 0) throw ValidationError("sample_negative: no candidate facts");
    std::size_t i = rng.uniform_index(pool);
    if (excluded && i >= *excluded) ++i;
    return corpus[i].id;
}

// ---------------------------------------------------------------- projection head

ProjectionHead ProjectionHead::identity(std::size_t dim) {
    ProjectionHead h{dim, dim, std::vector<double>(dim * dim, 0.0)};
    for (std::size_t i = 0; i < dim; ++i) h.at(i, i) = 1.0;
    return h;
}

namespace {

// y = W x in double.
std::vector<double> project_raw(const ProjectionHead& h, const std::vector<float>& x) {
    if (x.size() != h.in_dim) throw ContractError("projection input dim mismatch");
    std::vector<double> y(h.out_dim, 0.0);
    for (std::size_t r = 0; r < h.out_dim; ++r) {
        double s = 0.0;
        const double* row = h.weights.data() + r * h.in_dim;
        for (std::size_t c = 0; c < h.in_dim; ++c) s += row[c] * x[c];
        y[r] = s;
    }
    return y;
}

struct Projected {
    std::vector<double> unit;  // y / |y|
    double norm = 0.0;         // |y|
};

Projected project(const ProjectionHead& h, const EmbeddingVector& v) {
    Projected p;
    p.unit = project_raw(h, v.values);
    double n2 = 0.0;
    for (double y : p.unit) n2 += y * y;
    p.norm = std::sqrt(n2);
    if (p.norm == 0.0 || !std::isfinite(p.norm)) throw ContractError("projection collapsed a vector to zero");
    for (double& y : p.unit) y /= p.norm;
    return p;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<Projected> project_all(const ProjectionHead& h, const TokenEmbeddings& t) {
    std::vector<Projected> out;
    out.reserve(t.size());
    for (const auto& v : t.vectors) out.push_back(project(h, v));
    return out;
}

// Adds coeff * d<n_a, n_b>/dW to grad, where n = Wx/|Wx|:
//   ((I - n_a n_a^T) n_b / |W x_a|) x_a^T + ((I - n_b n_b^T) n_a / |W x_b|) x_b^T
void add_pair_gradient(std::vector<double>& grad, const ProjectionHead& h, const Projected& a,
                       const std::vector<float>& xa, const Projected& b, const std::vector<float>& xb,
                       double coeff) {
    const double c = dot(a.unit, b.unit);
    for (std::size_t r = 0; r < h.out_dim; ++r) {
        const double ga = coeff * (b.unit[r] - c * a.unit[r]) / a.norm;
        const double gb = coeff * (a.unit[r] - c * b.unit[r]) / b.norm;
        double* row = grad.data() + r * h.in_dim;
        for (std::size_t col = 0; col < h.in_dim; ++col) row[col] += ga * xa[col] + gb * xb[col];
    }
}

struct MaxSimTrace {
    double score = 0.0;
    std::vector<std::size_t> argmax;  // best doc token per query token
};

MaxSimTrace traced_maxsim(const std::vector<Projected>& q, const std::vector<Projected>& d) {
    MaxSimTrace t;
    t.argmax.resize(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d.size(); ++j) {
            const double s = dot(q[i].unit, d[j].unit);
            if (s > best) {
                best = s;
                t.argmax[i] = j;
            }
        }
        t.score += best;
    }
    return t;
}

void add_maxsim_gradient(std::vector<double>& grad, const ProjectionHead& h, const TokenEmbeddings& q,
                         const std::vector<Projected>& pq, const TokenEmbeddings& d,
                         const std::vector<Projected>& pd, const MaxSimTrace& trace, double coeff) {
    for (std::size_t i = 0; i < pq.size(); ++i) {
        const std::size_t j = trace.argmax[i];
        add_pair_gradient(grad, h, pq[i], q.vectors[i].values, pd[j], d.vectors[j].values, coeff);
    }
}

}  // namespace

EmbeddingVector ProjectionHead::apply(const EmbeddingVector& v) const {
    const Projected p = project(*this, v);
    EmbeddingVector out;
    out.values.assign(p.unit.begin(), p.unit.end());
    return out;
}

TokenEmbeddings ProjectionHead::apply(const TokenEmbeddings& t) const {
    TokenEmbeddings out;
    out.tokens = t.tokens;
    out.vectors.reserve(t.size());
    for (const auto& v : t.vectors) out.vectors.push_back(apply(v));
    return out;
}

void ProjectionHead::save(const std::filesystem::path& path) const {
    nlohmann::ordered_json j;
    j["out_dim"] = out_dim;
    j["in_dim"] = in_dim;
    j["weights"] = weights;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << j.dump() << '\n';
}

ProjectionHead ProjectionHead::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        ProjectionHead h{j.at("out_dim").get<std::size_t>(), j.at("in_dim").get<std::size_t>(),
                         j.at("weights").get<std::vector<double>>()};
        if (h.out_dim == 0 || h.in_dim == 0 || h.weights.size() != h.out_dim * h.in_dim) {
            throw ValidationError("projection head shape is inconsistent");
        }
        return h;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

ProjectedEmbedder::ProjectedEmbedder(const TextEmbedder& base, ProjectionHead head)
    : base_(&base), head_(std::move(head)) {
    if (head_.in_dim != base.dim()) throw ValidationError("projection head in_dim does not match embedder dim");
}

std::uint64_t ProjectedEmbedder::seed() const {
    std::uint64_t h = base_->seed();
    for (double w : head_.weights) {
        std::uint64_t bits;
        std::memcpy(&bits, &w, sizeof bits);
        h = splitmix64(h ^ bits);
    }
    return h;
}

EmbeddingVector ProjectedEmbedder::embed_text(std::string_view text) const {
    return head_.apply(base_->embed_text(text));
}

TokenEmbeddings ProjectedEmbedder::embed_tokens(std::string_view text) const {
    return head_.apply(base_->embed_tokens(text));
}

double projected_maxsim(const ProjectionHead& head, const TokenEmbeddings& q, const TokenEmbeddings& d) {
    if (q.empty() || d.empty()) throw ValidationError("maxsim requires non-empty token embeddings");
    return traced_maxsim(project_all(head, q), project_all(head, d)).score;
}

LossAndGradient triple_loss_and_gradient(const ProjectionHead& head, const TripleEmbeddings& t) {
    if (t.q.empty() || t.d_plus.empty() || t.d_minus.empty()) {
        throw ValidationError("triple has an empty side");
    }
    const auto pq = project_all(head, t.q);
    const auto pp = project_all(head, t.d_plus);
    const auto pm = project_all(head, t.d_minus);
    const auto plus = traced_maxsim(pq, pp);
    const auto minus = traced_maxsim(pq, pm);

    LossAndGradient out;
    out.loss = contrastive_loss(plus.score, minus.score);
    out.grad.assign(head.weights.size(), 0.0);
    const double g_plus = contrastive_loss_grad(plus.score, minus.score);
    add_maxsim_gradient(out.grad, head, t.q, pq, t.d_plus, pp, plus, g_plus);
    add_maxsim_gradient(out.grad, head, t.q, pq, t.d_minus, pm, minus, -g_plus);
    return out;
}

TrainResult train_projection(const std::vector<Triple>& triples, const Corpus& corpus,
                             const TextEmbedder& embedder, const ProjectionHead& head, const TrainOptions& options) {
    if (!(options.lr > 0.0)) throw ValidationError("learning rate must be positive");
    if (options.batch_size == 0) throw ValidationError("batch size must be positive");
    if (head.in_dim != embedder.dim()) throw ValidationError("projection head in_dim does not match embedder dim");
    if (head.weights.size() != head.in_dim * head.out_dim) throw ValidationError("projection head shape is inconsistent");

    TrainResult result{head, {}};
    if (options.epochs == 0) return result;

    std::vector<TripleEmbeddings> data;
    data.reserve(triples.size());
    for (const auto& t : triples) {
        const Fact* plus = corpus.find(t.d_plus);
        const Fact* minus = corpus.find(t.d_minus);
        if (plus == nullptr) throw ValidationError("triple references unknown fact " + t.d_plus);
        if (minus == nullptr) throw ValidationError("triple references unknown fact " + t.d_minus);
        if (t.d_plus == t.d_minus) throw ValidationError("triple has d_plus == d_minus (" + t.d_plus + ")");
        data.push_back({embedder.embed_tokens(t.q), embedder.embed_tokens(plus->text),
                        embedder.embed_tokens(minus->text)});
    }
    if (data.empty()) throw ValidationError("no training triples");

    Rng rng(options.seed);
    std::vector<std::size_t> order(data.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    ProjectionHead& w = result.head;
    std::vector<double> grad(w.weights.size());
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t stop = std::min(order.size(), start + options.batch_size);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = start; b < stop; ++b) {
                const auto lg = triple_loss_and_gradient(w, data[order[b]]);
                epoch_loss += lg.loss;
                for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += lg.grad[i];
            }
            const double scale = options.lr / static_cast<double>(stop - start);
            for (std::size_t i = 0; i < grad.size(); ++i) w.weights[i] -= scale * grad[i];
        }
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(data.size()));
    }
    return result;
}

std::vector<Triple> read_triples(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    std::vector<Triple> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.push_back({j.at("q").get<std::string>(), j.at("d_plus").get<std::string>(),
                           j.at("d_minus").get<std::string>()});
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(line_no, e.what());
        }
        if (out.back().d_plus == out.back().d_minus) throw ParseError(line_no, "d_plus equals d_minus");
    }
    return out;
}

void write_triples(const std::filesystem::path& path, const std::vector<Triple>& triples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    for (const auto& t : triples) {
        nlohmann::ordered_json j;
        j["q"] = t.q;
        j["d_plus"] = t.d_plus;
        j["d_minus"] = t.d_minus;
        out << j.dump() << '\n';
    }
}

double recall_at_1(const std::vector<Triple>& triples, const Corpus& corpus, const TextEmbedder& embedder,
                   RetrievalMode mode) {
    if (triples.empty()) throw ValidationError("recall needs at least one triple");
    const auto index = VectorIndex::build(corpus, embedder, mode);
    std::size_t hits = 0;
    for (const auto& t : triples) {
        if (!corpus.find(t.d_plus)) throw ValidationError("unknown fact id " + t.d_plus);
        hits += search(index, embedder, t.q, 1).front().fact_id == t.d_plus;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(triples.size());
}

}  // namespace nlki

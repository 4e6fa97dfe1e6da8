#include "nlki/clients.hpp"

#include <cmath>

#include "nlki/errors.hpp"

namespace nlki {

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw ContractError("dimension mismatch: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += static_cast<double>(a.values[i]) * b.values[i];
    return s;
}

double l2_norm(const EmbeddingVector& v) { return std::sqrt(dot(v, v)); }

void normalize(EmbeddingVector& v) {
    const double n = l2_norm(v);
    if (n == 0.0 || !std::isfinite(n)) throw ContractError("cannot normalize a zero or non-finite vector");
    for (float& x : v.values) x = static_cast<float>(x / n);
}

void check_dim(const EmbeddingVector& v, std::size_t expected) {
    if (v.dim() != expected) {
        throw ContractError("embedding dim " + std::to_string(v.dim()) + " does not match expected " +
                            std::to_string(expected));
    }
}

}  // namespace nlki

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace nlki {

enum class LossKind { CE, SCE, GCE, MIXED };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind k);

// Floor applied to probabilities inside logarithms.
inline constexpr double kProbEpsilon = 1e-12;

struct LossConfig {
    LossKind kind = LossKind::CE;
    double alpha = 0.1;   // CE weight in SCE
    double beta = 1.0;    // RCE weight in SCE
    double gamma = 4.0;   // -log 0 in the reverse term
    double q = 0.7;       // GCE exponent
    double lambda = 0.4;  // CE weight in the CE+GCE mixture (0.9 for low-noise data)
    int warmup_epochs = 2;

    // Throws ValidationError unless 0 < q <= 1, 0 <= lambda <= 1, gamma > 0,
    // alpha >= 0, beta >= 0, warmup_epochs >= 0.
    void validate() const;
};

// Row-major n x C logits with one label per row.
struct LogitsBatch {
    std::size_t rows = 0;
    std::size_t classes = 0;
    std::vector<double> logits;
    std::vector<int> labels;

    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(logits).subspan(i * classes, classes);
    }
    void validate() const;
};

std::vector<double> softmax(std::span<const double> z);

double ce(std::span<const double> p, std::size_t y);
double rce(std::span<const double> p, std::size_t y, double gamma);
double sce(std::span<const double> p, std::size_t y, double alpha, double beta, double gamma);
double gce(std::span<const double> p, std::size_t y, double q);
double mixed(std::span<const double> p, std::size_t y, double lambda, double q);

// Per-example loss of `kind` on probabilities p.
double loss_value(LossKind kind, std::span<const double> p, std::size_t y, const LossConfig& config);

// Mean loss over the batch.
double batch_loss(LossKind kind, const LogitsBatch& batch, const LossConfig& config);

// Gradient of batch_loss w.r.t. the logits (n x C, row-major). Every loss
// here depends on p only through p_y, so the gradient is
// dL/dp_y * p_y * (onehot_y - p) per row, divided by n.
std::vector<double> loss_gradient(LossKind kind, const LogitsBatch& batch, const LossConfig& config);

// CE during warmup, then the configured kind.
LossKind loss_for_epoch(int epoch, const LossConfig& config);

}  // namespace nlki

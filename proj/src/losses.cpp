#include "nlki/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlki/errors.hpp"

namespace nlki {

namespace {

void check_label(std::span<const double> p, std::size_t y) {
    if (y >= p.size()) throw ValidationError("label " + std::to_string(y) + " out of range");
}

// dL/dp_y for each kind; p_y taken unclamped so gradients stay smooth.
double dloss_dpy(LossKind kind, double py, const LossConfig& c) {
    const double safe = std::max(py, kProbEpsilon);
    switch (kind) {
        case LossKind::CE: return -1.0 / safe;
        case LossKind::SCE: return c.alpha * (-1.0 / safe) - c.beta * c.gamma;
        case LossKind::GCE: return -std::pow(safe, c.q - 1.0);
        case LossKind::MIXED: return c.lambda * (-1.0 / safe) - (1.0 - c.lambda) * std::pow(safe, c.q - 1.0);
    }
    return 0.0;
}

}  // namespace

LossKind parse_loss_kind(std::string_view name) {
    std::string s(name);
    for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (s == "CE") return LossKind::CE;
    if (s == "SCE") return LossKind::SCE;
    if (s == "GCE") return LossKind::GCE;
    if (s == "MIXED" || s == "CE+GCE") return LossKind::MIXED;
    throw ValidationError("unknown loss kind \"" + std::string(name) + "\"");
}

std::string_view to_string(LossKind k) {
    switch (k) {
        case LossKind::CE: return "CE";
        case LossKind::SCE: return "SCE";
        case LossKind::GCE: return "GCE";
        case LossKind::MIXED: return "MIXED";
    }
    return "?";
}

void LossConfig::validate() const {
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("loss.q must satisfy 0 < q <= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("loss.lambda must lie in [0, 1]");
    if (!(gamma > 0.0)) throw ValidationError("loss.gamma must be positive");
    if (!(alpha >= 0.0)) throw ValidationError("loss.alpha must be >= 0");
    if (!(beta >= 0.0)) throw ValidationError("loss.beta must be >= 0");
    if (warmup_epochs < 0) throw ValidationError("loss.warmup_epochs must be >= 0");
}

void LogitsBatch::validate() const {
    if (classes == 0) throw ValidationError("logits batch has no classes");
    if (logits.size() != rows * classes) throw ValidationError("logits size does not match rows x classes");
    if (labels.size() != rows) throw ValidationError("labels size does not match rows");
    for (int y : labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= classes) throw ValidationError("label out of range");
    }
    for (double z : logits) {
        if (!std::isfinite(z)) throw ValidationError("logits must be finite");
    }
}

std::vector<double> softmax(std::span<const double> z) {
    if (z.empty()) return {};
    const double mx = *std::max_element(z.begin(), z.end());
    std::vector<double> p(z.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) sum += (p[i] = std::exp(z[i] - mx));
    for (double& v : p) v /= sum;
    return p;
}

double ce(std::span<const double> p, std::size_t y) {
    check_label(p, y);
    return -std::log(std::max(p[y], kProbEpsilon));
}

double rce(std::span<const double> p, std::size_t y, double gamma) {
    check_label(p, y);
    return gamma * (1.0 - p[y]);
}

double sce(std::span<const double> p, std::size_t y, double alpha, double beta, double gamma) {
    return alpha * ce(p, y) + beta * rce(p, y, gamma);
}

double gce(std::span<const double> p, std::size_t y, double q) {
    check_label(p, y);
    if (!(q > 0.0 && q <= 1.0)) throw ValidationError("gce: q must satisfy 0 < q <= 1");
    if (q == 1.0) return 1.0 - p[y];
    return (1.0 - std::pow(p[y], q)) / q;
}

double mixed(std::span<const double> p, std::size_t y, double lambda, double q) {
    return lambda * ce(p, y) + (1.0 - lambda) * gce(p, y, q);
}

double loss_value(LossKind kind, std::span<const double> p, std::size_t y, const LossConfig& c) {
    switch (kind) {
        case LossKind::CE: return ce(p, y);
        case LossKind::SCE: return sce(p, y, c.alpha, c.beta, c.gamma);
        case LossKind::GCE: return gce(p, y, c.q);
        case LossKind::MIXED: return mixed(p, y, c.lambda, c.q);
    }
    return 0.0;
}

double batch_loss(LossKind kind, const LogitsBatch& batch, const LossConfig& config) {
    batch.validate();
    if (batch.rows == 0) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < batch.rows; ++i) {
        const auto p = softmax(batch.row(i));
        total += loss_value(kind, p, static_cast<std::size_t>(batch.labels[i]), config);
    }
    return total / static_cast<double>(batch.rows);
}

std::vector<double> loss_gradient(LossKind kind, const LogitsBatch& batch, const LossConfig& config) {
    batch.validate();
    std::vector<double> grad(batch.logits.size(), 0.0);
    if (batch.rows == 0) return grad;
    const double inv_n = 1.0 / static_cast<double>(batch.rows);
    for (std::size_t i = 0; i < batch.rows; ++i) {
        const auto p = softmax(batch.row(i));
        const auto y = static_cast<std::size_t>(batch.labels[i]);
        const double py = p[y];
        double* g = grad.data() + i * batch.classes;
        if (kind == LossKind::CE) {
            // Closed form avoids the 1/p_y * p_y round trip.
            for (std::size_t c = 0; c < batch.classes; ++c) g[c] = (p[c] - (c == y ? 1.0 : 0.0)) * inv_n;
            continue;
        }
        const double scale = dloss_dpy(kind, py, config) * py * inv_n;
        for (std::size_t c = 0; c < batch.classes; ++c) g[c] = scale * ((c == y ? 1.0 : 0.0) - p[c]);
    }
    return grad;
}

LossKind loss_for_epoch(int epoch, const LossConfig& config) {
    return epoch < config.warmup_epochs ? LossKind::CE : config.kind;
}

}  // namespace nlki

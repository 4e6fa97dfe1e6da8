#include "nlki/toy_trainer.hpp"

#include <cmath>
#include <numbers>

#include "nlki/errors.hpp"
#include "nlki/rng.hpp"

namespace nlki {

Dataset make_blobs(const BlobSpec& spec, std::uint64_t seed) {
    if (spec.classes < 2 || spec.dim == 0) throw ValidationError("blobs need >= 2 classes and dim >= 1");
    Rng rng(seed);
    Dataset d;
    d.dim = spec.dim;
    d.classes = spec.classes;
    d.features.reserve(spec.samples * spec.dim);
    d.labels.reserve(spec.samples);
    for (std::size_t i = 0; i < spec.samples; ++i) {
        const auto c = static_cast<int>(i % spec.classes);
        const double angle = 2.0 * std::numbers::pi * c / static_cast<double>(spec.classes);
        for (std::size_t k = 0; k < spec.dim; ++k) {
            double center = 0.0;
            if (k == 0) center = spec.radius * std::cos(angle);
            if (k == 1) center = spec.radius * std::sin(angle);
            d.features.push_back(center + spec.stddev * rng.normal());
        }
        d.labels.push_back(c);
    }
    return d;
}

std::vector<double> LinearModel::logits(const double* x) const {
    std::vector<double> z(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        const double* w = weights.data() + c * (dim + 1);
        double s = w[dim];
        for (std::size_t k = 0; k < dim; ++k) s += w[k] * x[k];
        z[c] = s;
    }
    return z;
}

int LinearModel::predict(const double* x) const {
    const auto z = logits(x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
        if (z[c] > z[best]) best = c;
    }
    return static_cast<int>(best);
}

double accuracy(const LinearModel& model, const Dataset& data) {
    if (data.size() == 0) return 0.0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (model.predict(data.features.data() + i * data.dim) == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

ToyResult train_toy(const Dataset& train, const Dataset& clean_test, const LossConfig& config, int epochs,
                    double lr, std::uint64_t seed) {
    config.validate();
    if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
    if (epochs < 0) throw ValidationError("epochs must be >= 0");
    if (train.dim == 0 || train.classes < 2) throw ValidationError("training set is malformed");
    if (clean_test.dim != train.dim) throw ValidationError("test features differ in dimension");
    for (int y : train.labels) {
        if (y < 0 || static_cast<std::size_t>(y) >= train.classes) throw ValidationError("label out of range");
    }

    ToyResult result;
    LinearModel& m = result.model;
    m.classes = train.classes;
    m.dim = train.dim;
    m.weights.resize(m.classes * (m.dim + 1));
    Rng rng(seed);
    for (double& w : m.weights) w = 0.01 * rng.normal();

    const std::size_t n = train.size();
    LogitsBatch batch;
    batch.rows = n;
    batch.classes = m.classes;
    batch.labels = train.labels;
    batch.logits.resize(n * m.classes);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto z = m.logits(train.features.data() + i * m.dim);
            std::copy(z.begin(), z.end(), batch.logits.begin() + static_cast<std::ptrdiff_t>(i * m.classes));
        }
        const LossKind kind = loss_for_epoch(epoch, config);
        result.epoch_losses.push_back(batch_loss(kind, batch, config));
        const auto g = loss_gradient(kind, batch, config);

        std::vector<double> gw(m.weights.size(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* x = train.features.data() + i * m.dim;
            for (std::size_t c = 0; c < m.classes; ++c) {
                const double gz = g[i * m.classes + c];
                double* row = gw.data() + c * (m.dim + 1);
                for (std::size_t k = 0; k < m.dim; ++k) row[k] += gz * x[k];
                row[m.dim] += gz;
            }
        }
        for (std::size_t i = 0; i < m.weights.size(); ++i) m.weights[i] -= lr * gw[i];
    }
    result.test_accuracy = accuracy(m, clean_test);
    return result;
}

}  // namespace nlki

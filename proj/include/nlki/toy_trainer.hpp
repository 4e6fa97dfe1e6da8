#pragma once

#include <cstdint>
#include <vector>

#include "nlki/losses.hpp"

namespace nlki {

// Row-major n x d features with integer labels.
struct Dataset {
    std::size_t dim = 0;
    std::size_t classes = 0;
    std::vector<double> features;
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
};

struct BlobSpec {
    std::size_t classes = 3;
    std::size_t dim = 2;
    std::size_t samples = 600;
    double radius = 2.0;  // class centers sit on a circle of this radius
    double stddev = 1.0;
};

// Isotropic Gaussian blobs, samples assigned to classes round-robin.
Dataset make_blobs(const BlobSpec& spec, std::uint64_t seed);

// Linear softmax classifier: logits = W [x; 1], W is classes x (dim + 1).
struct LinearModel {
    std::size_t classes = 0;
    std::size_t dim = 0;
    std::vector<double> weights;

    std::vector<double> logits(const double* x) const;
    int predict(const double* x) const;
};

double accuracy(const LinearModel& model, const Dataset& data);

struct ToyResult {
    LinearModel model;
    std::vector<double> epoch_losses;  // training loss (active kind) before each update
    double test_accuracy = 0.0;
};

// Full-batch gradient descent with the warmup schedule of `config`.
// Weights start at small seeded Gaussian values; epochs == 0 returns them
// untouched. Throws ValidationError on lr <= 0 or out-of-range labels.
ToyResult train_toy(const Dataset& train, const Dataset& clean_test, const LossConfig& config, int epochs,
                    double lr, std::uint64_t seed);

}  // namespace nlki

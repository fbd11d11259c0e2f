#ifndef GCNL_TRAIN_HPP
#define GCNL_TRAIN_HPP

#include "gcnl/dataset.hpp"
#include "gcnl/loss.hpp"
#include "gcnl/metrics.hpp"
#include "gcnl/model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gcnl {

enum class LossMode { focal, cross_entropy };
enum class AlphaPolicy { uniform, frequency };

struct LossSpec {
    LossMode mode = LossMode::focal;
    double gamma = 2.0;
    AlphaPolicy alpha = AlphaPolicy::frequency;
};

// Concrete focal parameters for a training set with the given per-class
// counts. Cross-entropy mode is gamma 0 with unit alpha.
FocalConfig resolve_loss(const LossSpec& spec, const std::vector<std::size_t>& class_counts);

struct TrainConfig {
    std::size_t epochs = 15;
    std::size_t batch_size = 16;
    double learning_rate = 0.01;
    double momentum = 0.9;
    std::uint64_t seed = 1;
    LossSpec loss;
    std::size_t eval_every = 1;

    void validate() const;
};

struct SgdUpdate {
    Tensor param;
    Tensor velocity;
};

// v' = momentum * v - lr * g ; p' = p + v'
SgdUpdate sgd_step(const Tensor& param, const Tensor& grad, const Tensor& velocity, double lr, double momentum);

struct EpochRecord {
    std::size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    std::optional<MetricsReport> val; // present on evaluation epochs
    double seconds = 0.0;             // wall time of the epoch, evaluation included
};

struct History {
    std::vector<EpochRecord> epochs;
};

struct TrainResult {
    Model model;
    History history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Runs exactly cfg.epochs epochs of minibatch SGD with momentum. Batch
// order in epoch e is drawn from derive_seed(cfg.seed, e). The validation
// set is evaluated every cfg.eval_every epochs. Throws DivergenceError if
// the loss or any parameter becomes non-finite.
TrainResult train(Model model, const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch = {});

// Predicted probabilities for every sample, in dataset order.
Tensor predict_dataset(const Model& model, const Dataset& dataset, std::size_t batch_size = 64);

MetricsReport evaluate(const Model& model, const Dataset& dataset, std::size_t epoch = 0,
                       std::size_t batch_size = 64);

} // namespace gcnl

#endif // GCNL_TRAIN_HPP

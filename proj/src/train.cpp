#include "gcnl/train.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/random.hpp"

#include <chrono>
#include <cmath>

namespace gcnl {

FocalConfig resolve_loss(const LossSpec& spec, const std::vector<std::size_t>& class_counts)
{
    const std::size_t classes = class_counts.size();
    if (spec.mode == LossMode::cross_entropy) {
        return FocalConfig::cross_entropy(classes);
    }
    if (!(spec.gamma >= 0.0) || !std::isfinite(spec.gamma)) {
        throw ConfigError("gamma must be a finite value >= 0");
    }
    if (spec.alpha == AlphaPolicy::frequency) {
        return {spec.gamma, alpha_from_frequencies(class_counts)};
    }
    return FocalConfig::uniform(spec.gamma, classes);
}

void TrainConfig::validate() const
{
    if (epochs < 1) {
        throw ConfigError("epochs must be >= 1");
    }
    if (batch_size < 1) {
        throw ConfigError("batch_size must be >= 1");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate must be finite and >= 0");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw ConfigError("momentum must be in [0, 1)");
    }
    if (eval_every < 1) {
        throw ConfigError("eval_every must be >= 1");
    }
}

SgdUpdate sgd_step(const Tensor& param, const Tensor& grad, const Tensor& velocity, double lr, double momentum)
{
    if (param.shape() != grad.shape() || param.shape() != velocity.shape()) {
        throw ShapeError("sgd_step shapes differ: param " + to_string(param.shape()) + ", grad " +
                         to_string(grad.shape()) + ", velocity " + to_string(velocity.shape()));
    }
    std::vector<double> v(param.size());
    std::vector<double> p(param.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        v[i] = momentum * velocity[i] - lr * grad[i];
        p[i] = param[i] + v[i];
    }
    return {Tensor(param.shape(), std::move(p)), Tensor(param.shape(), std::move(v))};
}

Tensor predict_dataset(const Model& model, const Dataset& dataset, std::size_t batch_size)
{
    std::vector<double> all;
    all.reserve(dataset.size() * model.num_classes());
    for (const auto& batch : sequential_batches(dataset, batch_size)) {
        const Tensor probs = model.predict(batch.images);
        all.insert(all.end(), probs.data().begin(), probs.data().end());
    }
    return Tensor({dataset.size(), model.num_classes()}, std::move(all));
}

MetricsReport evaluate(const Model& model, const Dataset& dataset, std::size_t epoch, std::size_t batch_size)
{
    if (dataset.num_classes() != model.num_classes()) {
        throw ConfigError("dataset has " + std::to_string(dataset.num_classes()) + " classes but the model predicts " +
                          std::to_string(model.num_classes()));
    }
    return evaluate_scores(predict_dataset(model, dataset, batch_size), dataset.labels(), epoch);
}

TrainResult train(Model model, const Dataset& train_set, const Dataset& val_set, const TrainConfig& cfg,
                  const EpochCallback& on_epoch)
{
    cfg.validate();
    if (train_set.num_classes() != model.num_classes() || val_set.num_classes() != model.num_classes()) {
        throw ConfigError("dataset has " + std::to_string(train_set.num_classes()) +
                          " classes but the model predicts " + std::to_string(model.num_classes()));
    }
    train_set.validate();
    const FocalConfig loss_cfg = resolve_loss(cfg.loss, train_set.class_counts());

    std::vector<Tensor> velocity;
    for (const auto& p : model.parameters()) {
        velocity.push_back(Tensor::zeros(p.value.shape()));
    }

    History history;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        double loss_sum = 0.0;
        try {
            for (const auto& batch : batches(train_set, cfg.batch_size, derive_seed(cfg.seed, epoch))) {
                auto fwd = model.forward(batch.images);
                const LossResult loss = focal_loss(fwd.probs, batch.labels, loss_cfg);
                if (!std::isfinite(loss.loss)) {
                    throw NumericError("loss is " + std::to_string(loss.loss));
                }
                loss_sum += loss.loss * static_cast<double>(batch.labels.size());
                const auto grads = model.backward(fwd.cache, loss.grad_logits);

                std::vector<Tensor> updated;
                updated.reserve(grads.size());
                for (std::size_t i = 0; i < grads.size(); ++i) {
                    auto step = sgd_step(model.parameters()[i].value, grads[i], velocity[i], cfg.learning_rate,
                                         cfg.momentum);
                    updated.push_back(std::move(step.param));
                    velocity[i] = std::move(step.velocity);
                }
                model.set_parameters(std::move(updated));
            }
        } catch (const NumericError& e) {
            throw DivergenceError("training diverged in epoch " + std::to_string(epoch) + ": " + e.what(),
                                  static_cast<int>(epoch));
        }

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / static_cast<double>(train_set.size());
        if (epoch % cfg.eval_every == 0) {
            record.val = evaluate(model, val_set, epoch);
        }
        record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (on_epoch) {
            on_epoch(record);
        }
        history.epochs.push_back(std::move(record));
    }
    return {std::move(model), std::move(history)};
}

} // namespace gcnl

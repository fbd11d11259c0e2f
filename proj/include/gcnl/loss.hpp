#ifndef GCNL_LOSS_HPP
#define GCNL_LOSS_HPP

#include "gcnl/tensor.hpp"

#include <cstddef>
#include <vector>

namespace gcnl {

// gamma is the focusing exponent on (1 - p_t); alpha holds one weight per
// class, looked up by the sample's true class. gamma = 0 with unit alpha is
// plain cross-entropy.
struct FocalConfig {
    double gamma = 2.0;
    std::vector<double> alpha;

    static FocalConfig cross_entropy(std::size_t classes) { return {0.0, std::vector<double>(classes, 1.0)}; }
    static FocalConfig uniform(double gamma, std::size_t classes) { return {gamma, std::vector<double>(classes, 1.0)}; }
};

struct LossResult {
    double loss;         // batch mean
    Tensor grad_logits;  // d(loss)/d(logits), [batch, C]
};

inline constexpr double probability_clamp = 1e-12;

// FL = -alpha_t (1 - p_t)^gamma log(p_t), averaged over the batch.
// `probs` are softmax outputs; the gradient is taken through the softmax
// with respect to the logits that produced them.
LossResult focal_loss(const Tensor& probs, const std::vector<std::size_t>& targets, const FocalConfig& cfg);

LossResult cross_entropy(const Tensor& probs, const std::vector<std::size_t>& targets);

// Unreduced per-sample focal loss values.
std::vector<double> focal_loss_per_sample(const Tensor& probs, const std::vector<std::size_t>& targets,
                                          const FocalConfig& cfg);

// alpha_c proportional to N / (C * count_c), rescaled so the largest is 1.
std::vector<double> alpha_from_frequencies(const std::vector<std::size_t>& class_counts);

} // namespace gcnl

#endif // GCNL_LOSS_HPP

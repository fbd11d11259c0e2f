#include "gcnl/loss.hpp"

#include "gcnl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gcnl {

namespace {

constexpr double row_sum_tolerance = 1e-9;

void validate(const Tensor& probs, const std::vector<std::size_t>& targets, const FocalConfig& cfg)
{
    if (probs.rank() != 2 || probs.dim(1) < 2) {
        throw ShapeError("loss expects probabilities of shape [batch, C>=2], got " + to_string(probs.shape()));
    }
    const std::size_t batch = probs.dim(0);
    const std::size_t classes = probs.dim(1);
    if (targets.size() != batch) {
        throw ShapeError("loss got " + std::to_string(targets.size()) + " targets for a batch of " +
                         std::to_string(batch));
    }
    if (cfg.alpha.size() != classes) {
        throw ShapeError("focal alpha has " + std::to_string(cfg.alpha.size()) + " entries for " +
                         std::to_string(classes) + " classes");
    }
    if (!(cfg.gamma >= 0.0) || !std::isfinite(cfg.gamma)) {
        throw ConfigError("focal gamma must be a finite value >= 0");
    }
    for (const double a : cfg.alpha) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw ConfigError("focal alpha entries must be positive");
        }
    }
    for (std::size_t n = 0; n < batch; ++n) {
        if (targets[n] >= classes) {
            throw IndexError("target " + std::to_string(targets[n]) + " out of range for " +
                             std::to_string(classes) + " classes (sample " + std::to_string(n) + ")");
        }
        double total = 0.0;
        for (std::size_t j = 0; j < classes; ++j) {
            const double p = probs[n * classes + j];
            if (p < 0.0 || p > 1.0) {
                throw InvalidDistributionError("probability outside [0, 1] in row " + std::to_string(n));
            }
            total += p;
        }
        if (std::abs(total - 1.0) > row_sum_tolerance) {
            throw InvalidDistributionError("probability row " + std::to_string(n) + " sums to " +
                                           std::to_string(total));
        }
    }
}

double clamp_probability(double p)
{
    return std::clamp(p, probability_clamp, 1.0 - probability_clamp);
}

double focal_value(double pt, double alpha, double gamma)
{
    return -alpha * std::pow(1.0 - pt, gamma) * std::log(pt);
}

} // namespace

std::vector<double> focal_loss_per_sample(const Tensor& probs, const std::vector<std::size_t>& targets,
                                          const FocalConfig& cfg)
{
    validate(probs, targets, cfg);
    const std::size_t classes = probs.dim(1);
    std::vector<double> out(targets.size());
    for (std::size_t n = 0; n < targets.size(); ++n) {
        const double pt = clamp_probability(probs[n * classes + targets[n]]);
        out[n] = focal_value(pt, cfg.alpha[targets[n]], cfg.gamma);
    }
    return out;
}

LossResult focal_loss(const Tensor& probs, const std::vector<std::size_t>& targets, const FocalConfig& cfg)
{
    validate(probs, targets, cfg);
    const std::size_t batch = probs.dim(0);
    const std::size_t classes = probs.dim(1);
    const double inv_batch = 1.0 / static_cast<double>(batch);

    // With p = p_t and dp/dz_j = p (delta_tj - p_j):
    //   dFL/dz_j = s (delta_tj - p_j),  s = alpha (gamma (1-p)^(gamma-1) p log p - (1-p)^gamma)
    std::vector<double> grad(probs.size());
    double total = 0.0;
    for (std::size_t n = 0; n < batch; ++n) {
        const std::size_t t = targets[n];
        const double alpha = cfg.alpha[t];
        const double pt = clamp_probability(probs[n * classes + t]);
        total += focal_value(pt, alpha, cfg.gamma);

        const double q = 1.0 - pt;
        double s = -std::pow(q, cfg.gamma);
        if (cfg.gamma != 0.0) {
            s += cfg.gamma * std::pow(q, cfg.gamma - 1.0) * pt * std::log(pt);
        }
        s *= alpha * inv_batch;
        for (std::size_t j = 0; j < classes; ++j) {
            const double delta = (j == t) ? 1.0 : 0.0;
            grad[n * classes + j] = s * (delta - probs[n * classes + j]);
        }
    }
    return {total * inv_batch, Tensor(probs.shape(), std::move(grad))};
}

LossResult cross_entropy(const Tensor& probs, const std::vector<std::size_t>& targets)
{
    return focal_loss(probs, targets, FocalConfig::cross_entropy(probs.rank() == 2 ? probs.dim(1) : 0));
}

std::vector<double> alpha_from_frequencies(const std::vector<std::size_t>& class_counts)
{
    if (class_counts.size() < 2) {
        throw DegenerateClassError("alpha needs at least 2 classes, got " + std::to_string(class_counts.size()));
    }
    double total = 0.0;
    for (std::size_t c = 0; c < class_counts.size(); ++c) {
        if (class_counts[c] == 0) {
            throw DegenerateClassError("class " + std::to_string(c) + " has no samples");
        }
        total += static_cast<double>(class_counts[c]);
    }
    const double classes = static_cast<double>(class_counts.size());
    std::vector<double> alpha(class_counts.size());
    for (std::size_t c = 0; c < alpha.size(); ++c) {
        alpha[c] = total / (classes * static_cast<double>(class_counts[c]));
    }
    const double peak = *std::max_element(alpha.begin(), alpha.end());
    for (auto& a : alpha) {
        a /= peak;
    }
    return alpha;
}

} // namespace gcnl

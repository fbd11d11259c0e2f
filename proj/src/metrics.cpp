#include "gcnl/metrics.hpp"

#include "gcnl/errors.hpp"

#include <algorithm>
#include <numeric>

namespace gcnl {

namespace {

void check_scores(const Tensor& scores, const std::vector<std::size_t>& labels)
{
    if (scores.rank() != 2) {
        throw ShapeError("scores must be [n, C], got " + to_string(scores.shape()));
    }
    if (scores.dim(0) != labels.size()) {
        throw ShapeError("got " + std::to_string(labels.size()) + " labels for " + std::to_string(scores.dim(0)) +
                         " score rows");
    }
    for (const auto l : labels) {
        if (l >= scores.dim(1)) {
            throw IndexError("label " + std::to_string(l) + " out of range for " + std::to_string(scores.dim(1)) +
                             " classes");
        }
    }
}

} // namespace

AucResult auc_one_vs_rest(const Tensor& scores, const std::vector<std::size_t>& labels)
{
    check_scores(scores, labels);
    const std::size_t n = scores.dim(0);
    const std::size_t classes = scores.dim(1);
    if (n < 2) {
        throw UndefinedMetricError("AUC needs at least 2 samples");
    }
    AucResult result;
    result.per_class.resize(classes);
    std::vector<std::size_t> order(n);
    std::vector<double> rank(n);
    double total = 0.0;
    std::size_t defined = 0;

    for (std::size_t c = 0; c < classes; ++c) {
        const auto score = [&](std::size_t i) { return scores[i * classes + c]; };
        std::size_t pos = 0;
        for (const auto l : labels) {
            pos += (l == c);
        }
        const std::size_t neg = n - pos;
        if (pos == 0 || neg == 0) {
            result.excluded.push_back(c);
            continue;
        }
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score(a) < score(b); });
        // 1-based ranks, tied groups share their average rank
        for (std::size_t i = 0; i < n;) {
            std::size_t j = i;
            while (j + 1 < n && score(order[j + 1]) == score(order[i])) {
                ++j;
            }
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) {
                rank[order[k]] = avg;
            }
            i = j + 1;
        }
        double rank_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == c) {
                rank_sum += rank[i];
            }
        }
        const double p = static_cast<double>(pos);
        const double auc = (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
        result.per_class[c] = auc;
        total += auc;
        ++defined;
    }
    if (defined == 0) {
        throw UndefinedMetricError("AUC undefined: every class lacks positives or negatives");
    }
    result.macro = total / static_cast<double>(defined);
    return result;
}

double auc_macro(const Tensor& scores, const std::vector<std::size_t>& labels)
{
    return auc_one_vs_rest(scores, labels).macro;
}

ConfusionMatrix confusion(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                          std::size_t classes)
{
    if (predicted.size() != truth.size()) {
        throw ShapeError("predicted and true label counts differ");
    }
    ConfusionMatrix m(classes, std::vector<std::size_t>(classes, 0));
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= classes || predicted[i] >= classes) {
            throw IndexError("label out of range for " + std::to_string(classes) + " classes");
        }
        ++m[truth[i]][predicted[i]];
    }
    return m;
}

double recall_macro(const std::vector<std::size_t>& predicted, const std::vector<std::size_t>& truth,
                    std::size_t classes)
{
    const auto m = confusion(predicted, truth, classes);
    double total = 0.0;
    std::size_t defined = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        const std::size_t row = std::accumulate(m[c].begin(), m[c].end(), std::size_t{0});
        if (row == 0) {
            continue;
        }
        total += static_cast<double>(m[c][c]) / static_cast<double>(row);
        ++defined;
    }
    if (defined == 0) {
        throw UndefinedMetricError("recall undefined: no true samples");
    }
    return total / static_cast<double>(defined);
}

std::vector<std::size_t> argmax_rows(const Tensor& scores)
{
    if (scores.rank() != 2) {
        throw ShapeError("scores must be [n, C], got " + to_string(scores.shape()));
    }
    const std::size_t classes = scores.dim(1);
    std::vector<std::size_t> out(scores.dim(0));
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < classes; ++c) {
            if (scores[i * classes + c] > scores[i * classes + best]) {
                best = c;
            }
        }
        out[i] = best;
    }
    return out;
}

MetricsReport evaluate_scores(const Tensor& probs, const std::vector<std::size_t>& labels, std::size_t epoch)
{
    check_scores(probs, labels);
    const std::size_t classes = probs.dim(1);
    const auto predicted = argmax_rows(probs);

    MetricsReport r;
    r.epoch = epoch;
    r.samples = labels.size();
    r.confusion = confusion(predicted, labels, classes);
    r.precision.assign(classes, 0.0);
    r.recall.assign(classes, 0.0);
    std::size_t correct = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        std::size_t row = 0;
        std::size_t col = 0;
        for (std::size_t k = 0; k < classes; ++k) {
            row += r.confusion[c][k];
            col += r.confusion[k][c];
        }
        const std::size_t tp = r.confusion[c][c];
        correct += tp;
        r.recall[c] = row ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
        r.precision[c] = col ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    }
    r.accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
    r.macro_recall = recall_macro(predicted, labels, classes);
    const auto auc = auc_one_vs_rest(probs, labels);
    r.macro_auc = auc.macro;
    r.auc_excluded = auc.excluded;
    return r;
}

} // namespace gcnl

#include <gtest/gtest.h>

#include "gcnl/errors.hpp"
#include "gcnl/report.hpp"
#include "gcnl/synth.hpp"
#include "gcnl/train.hpp"
#include "gcnl/zoo.hpp"

#include <cmath>

using gcnl::Tensor;

namespace {

gcnl::Split small_split(std::uint64_t seed = 2, std::size_t per_class = 12)
{
    gcnl::SynthParams p;
    p.seed = seed;
    p.classes = gcnl::default_gesture_classes(3);
    p.n_per_class = per_class;
    p.size = 16;
    return gcnl::split(gcnl::synth_gestures(p), 0.75, 1);
}

gcnl::Model small_model(std::size_t classes = 3)
{
    return gcnl::Model(gcnl::plain_cnn({1, 16, 16}, classes, 5, 4));
}

gcnl::TrainConfig quick_config()
{
    gcnl::TrainConfig cfg;
    cfg.epochs = 3;
    cfg.batch_size = 8;
    return cfg;
}

} // namespace

TEST(Sgd, PlainGradientDescent)
{
    const Tensor p({2}, std::vector<double>{1.0, -2.0});
    const Tensor g({2}, std::vector<double>{0.5, 1.0});
    const auto u = gcnl::sgd_step(p, g, Tensor::zeros({2}), 0.1, 0.0);
    EXPECT_EQ(u.param.values(), (std::vector<double>{1.0 - 0.1 * 0.5, -2.0 - 0.1 * 1.0}));
}

TEST(Sgd, FixedPoint)
{
    const Tensor p = Tensor::uniform({3}, -1.0, 1.0, 1);
    const auto u = gcnl::sgd_step(p, Tensor::zeros({3}), Tensor::zeros({3}), 0.5, 0.9);
    EXPECT_EQ(u.param, p);
    EXPECT_EQ(u.velocity, Tensor::zeros({3}));
}

TEST(Sgd, MomentumHandIteration)
{
    const Tensor g = Tensor::ones({1});
    const auto u1 = gcnl::sgd_step(Tensor::zeros({1}), g, Tensor::zeros({1}), 0.1, 0.9);
    EXPECT_NEAR(u1.velocity[0], -0.1, 1e-15);
    const auto u2 = gcnl::sgd_step(u1.param, g, u1.velocity, 0.1, 0.9);
    EXPECT_NEAR(u2.velocity[0], -0.19, 1e-15);
    EXPECT_NEAR(u2.param[0], -0.29, 1e-15);
}

TEST(Sgd, ShapeMismatch)
{
    EXPECT_THROW(gcnl::sgd_step(Tensor::zeros({2}), Tensor::zeros({3}), Tensor::zeros({2}), 0.1, 0.9),
                 gcnl::ShapeError);
}

TEST(TrainConfig, Validation)
{
    auto cfg = quick_config();
    EXPECT_NO_THROW(cfg.validate());
    cfg.epochs = 0;
    EXPECT_THROW(cfg.validate(), gcnl::ConfigError);
    cfg = quick_config();
    cfg.momentum = 1.0;
    EXPECT_THROW(cfg.validate(), gcnl::ConfigError);
    cfg = quick_config();
    cfg.learning_rate = -0.1;
    EXPECT_THROW(cfg.validate(), gcnl::ConfigError);
    cfg = quick_config();
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), gcnl::ConfigError);
    cfg = quick_config();
    cfg.eval_every = 0;
    EXPECT_THROW(cfg.validate(), gcnl::ConfigError);
}

TEST(ResolveLoss, Policies)
{
    const auto ce = gcnl::resolve_loss({gcnl::LossMode::cross_entropy, 2.0, gcnl::AlphaPolicy::frequency}, {30, 10});
    EXPECT_EQ(ce.gamma, 0.0);
    EXPECT_EQ(ce.alpha, (std::vector<double>{1.0, 1.0}));
    const auto fl = gcnl::resolve_loss({gcnl::LossMode::focal, 2.0, gcnl::AlphaPolicy::frequency}, {30, 10});
    EXPECT_EQ(fl.gamma, 2.0);
    EXPECT_NEAR(fl.alpha[0], 1.0 / 3.0, 1e-15);
    EXPECT_EQ(fl.alpha[1], 1.0);
    const auto flu = gcnl::resolve_loss({gcnl::LossMode::focal, 0.5, gcnl::AlphaPolicy::uniform}, {30, 10});
    EXPECT_EQ(flu.alpha, (std::vector<double>{1.0, 1.0}));
}

TEST(Train, ZeroLearningRateKeepsParameters)
{
    const auto s = small_split();
    const gcnl::Model m = small_model();
    auto cfg = quick_config();
    cfg.learning_rate = 0.0;
    const auto r = gcnl::train(m, s.train, s.val, cfg);
    for (std::size_t i = 0; i < m.parameters().size(); ++i) {
        EXPECT_EQ(r.model.parameters()[i].value, m.parameters()[i].value);
    }
}

TEST(Train, DeterministicHistory)
{
    const auto s = small_split();
    const auto a = gcnl::train(small_model(), s.train, s.val, quick_config());
    const auto b = gcnl::train(small_model(), s.train, s.val, quick_config());
    EXPECT_EQ(gcnl::history_csv(a.history, false), gcnl::history_csv(b.history, false));
    for (std::size_t i = 0; i < a.model.parameters().size(); ++i) {
        EXPECT_EQ(a.model.parameters()[i].value, b.model.parameters()[i].value);
    }
    auto other = quick_config();
    other.seed = 99;
    const auto c = gcnl::train(small_model(), s.train, s.val, other);
    EXPECT_NE(gcnl::history_csv(a.history, false), gcnl::history_csv(c.history, false));
}

TEST(Train, RunsExactBudgetAndEvaluatesOnSchedule)
{
    const auto s = small_split();
    auto cfg = quick_config();
    cfg.epochs = 5;
    cfg.eval_every = 2;
    std::vector<std::size_t> seen;
    const auto r = gcnl::train(small_model(), s.train, s.val, cfg,
                               [&](const gcnl::EpochRecord& e) { seen.push_back(e.epoch); });
    ASSERT_EQ(r.history.epochs.size(), 5u);
    EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(r.history.epochs[i].epoch, i + 1);
        EXPECT_EQ(r.history.epochs[i].val.has_value(), (i + 1) % 2 == 0);
        EXPECT_TRUE(std::isfinite(r.history.epochs[i].train_loss));
    }
}

TEST(Train, ClassCountMismatch)
{
    const auto s = small_split();
    EXPECT_THROW(gcnl::train(small_model(4), s.train, s.val, quick_config()), gcnl::ConfigError);
}

TEST(Train, DivergenceNamesTheEpoch)
{
    const auto s = small_split();
    auto cfg = quick_config();
    cfg.learning_rate = 1e150;
    cfg.momentum = 0.0;
    try {
        (void)gcnl::train(small_model(), s.train, s.val, cfg);
        FAIL() << "expected DivergenceError";
    } catch (const gcnl::DivergenceError& e) {
        EXPECT_EQ(e.epoch(), 1);
        EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos) << e.what();
    }
}

TEST(Train, LossFallsOnTinyProblem)
{
    const auto s = small_split(3, 20);
    auto cfg = quick_config();
    cfg.epochs = 6;
    const auto r = gcnl::train(small_model(), s.train, s.val, cfg);
    EXPECT_LT(r.history.epochs.back().train_loss, r.history.epochs.front().train_loss);
}

TEST(Evaluate, MatchesScoresOfPredictions)
{
    const auto s = small_split();
    const auto m = small_model();
    const auto probs = gcnl::predict_dataset(m, s.val, 5);
    EXPECT_EQ(probs, gcnl::predict_dataset(m, s.val, 64));
    const auto r = gcnl::evaluate(m, s.val, 4, 3);
    const auto direct = gcnl::evaluate_scores(probs, s.val.labels(), 4);
    EXPECT_EQ(r.macro_auc, direct.macro_auc);
    EXPECT_EQ(r.macro_recall, direct.macro_recall);
    EXPECT_EQ(r.confusion, direct.confusion);
}

TEST(HistoryCsv, FormatAndLineCount)
{
    gcnl::History h;
    for (std::size_t e = 1; e <= 6; ++e) {
        gcnl::EpochRecord r;
        r.epoch = e;
        r.train_loss = 1.0 / static_cast<double>(e);
        r.seconds = 1.25;
        if (e % 3 == 0) {
            gcnl::MetricsReport m;
            m.macro_auc = 0.5;
            m.macro_recall = 0.25;
            m.accuracy = 0.125;
            r.val = m;
        }
        h.epochs.push_back(r);
    }
    const std::string csv = gcnl::history_csv(h, false);
    EXPECT_EQ(csv, "epoch,train_loss,val_auc,val_recall,val_accuracy,seconds\n"
                   "3,0.333333,0.500000,0.250000,0.125000,0.000\n"
                   "6,0.166667,0.500000,0.250000,0.125000,0.000\n");
    EXPECT_NE(gcnl::history_csv(h, true).find(",1.250\n"), std::string::npos);
}

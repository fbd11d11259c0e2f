#include <gtest/gtest.h>

#include "gcnl/checkpoint.hpp"
#include "gcnl/config.hpp"
#include "gcnl/errors.hpp"
#include "gcnl/experiments.hpp"
#include "gcnl/image.hpp"
#include "gcnl/zoo.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
using gcnl::Tensor;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("gcnl_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

gcnl::CheckpointMeta sample_meta()
{
    gcnl::CheckpointMeta meta;
    meta.class_names = {"00_bar45", "01_circle", "02_cross"};
    meta.seed = 42;
    meta.epochs_completed = 3;
    meta.final_metrics = gcnl::FinalMetrics{3, 0.125, 0.9, 0.8, 0.75};
    return meta;
}

std::uint64_t load_offset(const std::vector<std::uint8_t>& bytes)
{
    try {
        (void)gcnl::deserialize_checkpoint(bytes);
    } catch (const gcnl::LoadError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "expected LoadError";
    return 0;
}

std::uint64_t read_u64(const std::vector<std::uint8_t>& b, std::size_t at)
{
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
    }
    return v;
}

} // namespace

TEST(Checkpoint, ByteFixpointAndPredictionIdentity)
{
    for (const auto& name : gcnl::zoo_names()) {
        const gcnl::Model m(gcnl::zoo_config(name, {1, 16, 16}, 3, 9, 4));
        const auto bytes = gcnl::serialize_checkpoint(m, sample_meta());
        const auto loaded = gcnl::deserialize_checkpoint(bytes);
        EXPECT_EQ(gcnl::serialize_checkpoint(loaded.model, loaded.meta), bytes) << name;
        EXPECT_EQ(loaded.meta, sample_meta());
        EXPECT_EQ(loaded.model.config(), m.config());
        const Tensor x = Tensor::uniform({4, 1, 16, 16}, 0.0, 1.0, 3);
        EXPECT_EQ(loaded.model.predict(x), m.predict(x)) << name;
    }
}

TEST(Checkpoint, FileRoundTrip)
{
    const fs::path dir = scratch_dir("ckpt");
    const gcnl::Model m(gcnl::plain_cnn({1, 16, 16}, 3, 1, 2));
    auto meta = sample_meta();
    meta.final_metrics.reset();
    gcnl::save_checkpoint(m, meta, dir / "a.gcnl");
    const auto loaded = gcnl::load_checkpoint(dir / "a.gcnl");
    gcnl::save_checkpoint(loaded.model, loaded.meta, dir / "b.gcnl");
    EXPECT_EQ(gcnl::read_file_bytes(dir / "a.gcnl"), gcnl::read_file_bytes(dir / "b.gcnl"));
    EXPECT_FALSE(loaded.meta.final_metrics.has_value());
    EXPECT_THROW(gcnl::load_checkpoint(dir / "missing.gcnl"), gcnl::Error);
    fs::remove_all(dir);
}

TEST(Checkpoint, LayoutIsLittleEndianAndOrdered)
{
    const gcnl::Model m(gcnl::plain_cnn({1, 16, 16}, 3, 1, 2));
    const auto b = gcnl::serialize_checkpoint(m, sample_meta());
    ASSERT_GT(b.size(), 16u);
    EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "GCNL");
    EXPECT_EQ(b[4], 1);
    EXPECT_EQ(b[5] | b[6] | b[7], 0);
    const std::uint64_t header_len = read_u64(b, 8);
    std::size_t at = 16 + header_len;
    for (const auto& p : m.parameters()) {
        const std::uint64_t name_len = read_u64(b, at);
        at += 8;
        EXPECT_EQ(std::string(b.begin() + static_cast<long>(at), b.begin() + static_cast<long>(at + name_len)), p.name);
        at += name_len;
        const std::uint32_t rank = b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
        at += 4;
        ASSERT_EQ(rank, p.value.rank());
        for (std::size_t d = 0; d < rank; ++d) {
            EXPECT_EQ(read_u64(b, at), p.value.dim(d));
            at += 8;
        }
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const std::uint64_t bits = read_u64(b, at);
            double v = 0.0;
            std::memcpy(&v, &bits, 8);
            EXPECT_EQ(v, p.value[i]);
            at += 8;
        }
    }
    EXPECT_EQ(at, b.size());
}

TEST(Checkpoint, LoadErrorsWithOffsets)
{
    const gcnl::Model m(gcnl::plain_cnn({1, 16, 16}, 3, 1, 2));
    const auto good = gcnl::serialize_checkpoint(m, sample_meta());

    auto bad_magic = good;
    std::memcpy(bad_magic.data(), "XXXX", 4);
    EXPECT_EQ(load_offset(bad_magic), 0u);

    auto bad_version = good;
    bad_version[4] = 2;
    EXPECT_EQ(load_offset(bad_version), 4u);
    // The version is rejected even when nothing after it is readable.
    EXPECT_EQ(load_offset(std::vector<std::uint8_t>(bad_version.begin(), bad_version.begin() + 8)), 4u);

    const auto truncated = std::vector<std::uint8_t>(good.begin(), good.end() - 3);
    EXPECT_GT(load_offset(truncated), 16u);
    EXPECT_EQ(load_offset(std::vector<std::uint8_t>(good.begin(), good.begin() + 2)), 0u);

    auto trailing = good;
    trailing.push_back(0);
    EXPECT_EQ(load_offset(trailing), good.size());

    // Corrupt the first tensor's rank.
    auto bad_rank = good;
    const std::size_t first = 16 + read_u64(good, 8);
    const std::size_t rank_at = first + 8 + read_u64(good, first);
    bad_rank[rank_at] = 3;
    EXPECT_EQ(load_offset(bad_rank), rank_at);

    auto bad_header = good;
    bad_header[16] = '!';
    EXPECT_EQ(load_offset(bad_header), 16u);
}

TEST(RunConfig, ParsesAllKeys)
{
    const fs::path dir = scratch_dir("cfg");
    std::ofstream(dir / "custom.txt") << gcnl::to_text(gcnl::plain_cnn({1, 16, 16}, 2, 1, 2));
    const auto cfg = gcnl::parse_run_config(R"(# comment
dataset = synthetic
synth_seed = 5
synth_classes = bar:45, circle
synth_per_class = 30
synth_clutter = low
synth_jitter = false
imbalance = 1.0, 0.5
imbalance_seed = 4
image_size = 16
train_fraction = 0.5
split_seed = 3
model = custom
model_config = custom.txt
model_width = 4
model_seed = 8
epochs = 2
batch_size = 4
learning_rate = 0.02
momentum = 0.5
seed = 6
eval_every = 2
loss = cross_entropy
gamma = 1.5
alpha = uniform
record_timing = true
output_dir = out
compare_custom = custom.txt
)",
                                             dir);
    EXPECT_EQ(cfg.synth_seed, 5u);
    ASSERT_EQ(cfg.synth_classes.size(), 2u);
    EXPECT_EQ(cfg.synth_classes[1].name(), "circle");
    EXPECT_EQ(cfg.synth_per_class, 30u);
    EXPECT_EQ(cfg.synth_clutter, 0.25);
    EXPECT_FALSE(cfg.synth_jitter);
    EXPECT_EQ(cfg.imbalance, (std::vector<double>{1.0, 0.5}));
    EXPECT_EQ(cfg.image_size, 16u);
    EXPECT_EQ(cfg.train_fraction, 0.5);
    EXPECT_EQ(cfg.model, "custom");
    EXPECT_EQ(cfg.model_config, dir / "custom.txt");
    EXPECT_EQ(cfg.train.epochs, 2u);
    EXPECT_EQ(cfg.train.learning_rate, 0.02);
    EXPECT_EQ(cfg.train.loss.mode, gcnl::LossMode::cross_entropy);
    EXPECT_EQ(cfg.train.loss.alpha, gcnl::AlphaPolicy::uniform);
    EXPECT_TRUE(cfg.record_timing);
    EXPECT_EQ(cfg.output_dir, dir / "out");
    const auto ds = gcnl::load_dataset(cfg);
    EXPECT_EQ(ds.class_counts(), (std::vector<std::size_t>{30, 15}));
    EXPECT_EQ(gcnl::resolve_model_config(cfg, 2), gcnl::plain_cnn({1, 16, 16}, 2, 1, 2));
    EXPECT_THROW(gcnl::resolve_model_config(cfg, 3), gcnl::ConfigError);
    fs::remove_all(dir);
}

TEST(RunConfig, Errors)
{
    EXPECT_THROW(gcnl::parse_run_config("epochs = 3\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\nepoch = 3\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\nepochs = 3\nepochs = 4\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\nepochs =\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\nepochs = -1\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\nmomentum = 1.5\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = directory\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = directory\ndata_dir = /nonexistent/gcnl\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\nmodel = vgg\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\nmodel = custom\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\nloss = hinge\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_run_config("dataset = synthetic\njust words\n"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::load_run_config("/nonexistent/gcnl.cfg"), gcnl::ConfigError);
}

TEST(RunConfig, DefaultsAreTheDeskScaleSetup)
{
    const auto cfg = gcnl::parse_run_config("dataset = synthetic\n");
    EXPECT_EQ(cfg.synth_classes.size(), 4u);
    EXPECT_EQ(cfg.synth_per_class, 200u);
    EXPECT_EQ(cfg.synth_clutter, 0.5);
    EXPECT_EQ(cfg.image_size, 32u);
    EXPECT_EQ(cfg.model, "plain");
    EXPECT_EQ(cfg.train.epochs, 15u);
    EXPECT_EQ(cfg.train.loss.mode, gcnl::LossMode::focal);
    EXPECT_EQ(cfg.train.loss.gamma, 2.0);
    EXPECT_FALSE(cfg.record_timing);
}

TEST(CompareReport, TableShape)
{
    gcnl::CompareResult r;
    r.rows = {{"plain", 0.991, 0.85, 0.9, 100}, {"residual", 0.83, 0.851, 0.91, 120}};
    EXPECT_EQ(gcnl::format_compare_table(r), "Model     Auc       Recall\n"
                                             "plain     0.99      0.85\n"
                                             "residual  0.83      0.85\n");
    EXPECT_EQ(gcnl::compare_csv(r), "model,auc,recall,accuracy,parameters\n"
                                    "plain,0.991000,0.850000,0.900000,100\n"
                                    "residual,0.830000,0.851000,0.910000,120\n");
}

#include <gtest/gtest.h>

#include "gcnl/dataset.hpp"
#include "gcnl/errors.hpp"
#include "gcnl/image.hpp"
#include "gcnl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <string>

namespace fs = std::filesystem;
using gcnl::ImageBuffer;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& header, std::vector<std::uint8_t> payload)
{
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("gcnl_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

gcnl::SynthParams small_params(std::uint64_t seed)
{
    gcnl::SynthParams p;
    p.seed = seed;
    p.classes = gcnl::default_gesture_classes(3);
    p.n_per_class = 5;
    p.size = 16;
    return p;
}

std::uint64_t decode_offset(const std::vector<std::uint8_t>& bytes)
{
    try {
        (void)gcnl::decode_image(bytes);
    } catch (const gcnl::DecodeError& e) {
        return e.offset();
    }
    ADD_FAILURE() << "expected DecodeError";
    return 0;
}

} // namespace

TEST(Decode, P5Example)
{
    const auto img = gcnl::decode_image(bytes_of("P5\n2 2\n255\n", {0, 255, 128, 64}));
    EXPECT_EQ(img, ImageBuffer(2, 2, 1, {0, 255, 128, 64}));
}

TEST(Decode, P6Example)
{
    const auto img = gcnl::decode_image(bytes_of("P6 1 1 255\n", {255, 0, 0}));
    EXPECT_EQ(img.channels, 3u);
    EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{255, 0, 0}));
}

TEST(Decode, CommentsInHeader)
{
    const auto img = gcnl::decode_image(bytes_of("P5\n# made by hand\n3 # width\n1\n255\n", {1, 2, 3}));
    EXPECT_EQ(img, ImageBuffer(3, 1, 1, {1, 2, 3}));
}

TEST(Decode, ErrorsCarryOffsets)
{
    EXPECT_EQ(decode_offset(bytes_of("P5\n2 2\n255\n", {0, 1, 2})), 14u);
    EXPECT_EQ(decode_offset(bytes_of("XX\n2 2\n255\n", {0, 1, 2, 3})), 0u);
    EXPECT_EQ(decode_offset(bytes_of("P5\n2 2\n65535\n", {0, 1, 2, 3})), 7u);
    EXPECT_EQ(decode_offset(bytes_of("P5\n2 x\n255\n", {0, 1, 2, 3})), 5u);
    EXPECT_EQ(decode_offset(bytes_of("P5\n0 2\n255\n", {})), 3u);
    EXPECT_THROW(gcnl::decode_image(bytes_of("P5", {})), gcnl::DecodeError);
    EXPECT_THROW(gcnl::decode_image(bytes_of("P5\n2 2\n255", {})), gcnl::DecodeError);
}

TEST(Encode, RoundTrip)
{
    const ImageBuffer img(3, 2, 1, {0, 10, 20, 30, 40, 255});
    EXPECT_EQ(gcnl::decode_image(gcnl::encode_image(img)), img);
    const ImageBuffer rgb(1, 2, 3, {1, 2, 3, 4, 5, 6});
    EXPECT_EQ(gcnl::decode_image(gcnl::encode_image(rgb)), rgb);
}

TEST(Grayscale, Bt601)
{
    EXPECT_EQ(gcnl::to_grayscale(ImageBuffer(1, 1, 3, {255, 255, 255})).pixels[0], 255);
    EXPECT_EQ(gcnl::to_grayscale(ImageBuffer(1, 1, 3, {255, 0, 0})).pixels[0], 76);
    EXPECT_EQ(gcnl::to_grayscale(ImageBuffer(1, 1, 3, {0, 255, 0})).pixels[0], 150);
    EXPECT_EQ(gcnl::to_grayscale(ImageBuffer(1, 1, 3, {0, 0, 255})).pixels[0], 29);
    const ImageBuffer gray(2, 1, 1, {7, 9});
    EXPECT_EQ(gcnl::to_grayscale(gray), gray);
}

TEST(Resize, Examples)
{
    EXPECT_EQ(gcnl::resize_bilinear(ImageBuffer(2, 2, 1, {0, 100, 100, 0}), 1).pixels[0], 50);
    const ImageBuffer constant(5, 3, 1, std::vector<std::uint8_t>(15, 77));
    for (const std::size_t s : {1u, 2u, 7u, 32u}) {
        const auto r = gcnl::resize_bilinear(constant, s);
        EXPECT_EQ(r.pixels, std::vector<std::uint8_t>(s * s, 77));
    }
    const ImageBuffer img(3, 3, 1, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    EXPECT_EQ(gcnl::resize_bilinear(img, 3), img);
}

TEST(Resize, UpsamplePixelCenters)
{
    // 2 -> 4: source coordinate (i + 0.5) / 2 - 0.5 = -0.25, 0.25, 0.75, 1.25.
    const auto r = gcnl::resize_bilinear(ImageBuffer(2, 1, 1, {0, 200}), 4);
    EXPECT_EQ(r.width, 4u);
    const std::vector<std::uint8_t> row{0, 50, 150, 200};
    for (std::size_t y = 0; y < 4; ++y) {
        EXPECT_EQ(std::vector<std::uint8_t>(r.pixels.begin() + y * 4, r.pixels.begin() + y * 4 + 4), row);
    }
}

TEST(Normalize, EndpointsAndQuantization)
{
    const auto t = gcnl::normalize(ImageBuffer(3, 1, 1, {0, 128, 255}));
    EXPECT_EQ(t.shape(), (gcnl::Shape{1, 1, 3}));
    EXPECT_EQ(t[0], 0.0);
    EXPECT_NEAR(t[1], 0.50196, 1e-5);
    EXPECT_EQ(t[2], 1.0);
    const gcnl::Tensor x = gcnl::Tensor::uniform({1, 4, 4}, 0.0, 1.0, 5);
    const auto back = gcnl::normalize(gcnl::denormalize(x));
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_LE(std::abs(back[i] - x[i]), 1.0 / 510.0 + 1e-15);
    }
}

TEST(Preprocess, DeterministicChain)
{
    std::vector<std::uint8_t> payload(6 * 4 * 3);
    for (std::size_t i = 0; i < payload.size(); ++i) {
        payload[i] = static_cast<std::uint8_t>((i * 37) % 256);
    }
    const auto bytes = bytes_of("P6\n6 4\n255\n", payload);
    const auto a = gcnl::preprocess(bytes, 5);
    EXPECT_EQ(a, gcnl::preprocess(bytes, 5));
    EXPECT_EQ(a.shape(), (gcnl::Shape{1, 5, 5}));
    const auto manual = gcnl::normalize(gcnl::resize_bilinear(gcnl::to_grayscale(gcnl::decode_image(bytes)), 5));
    EXPECT_EQ(a, manual);
}

TEST(Synth, DeterministicAndBalanced)
{
    const auto a = gcnl::synth_gestures(small_params(3));
    const auto b = gcnl::synth_gestures(small_params(3));
    ASSERT_EQ(a.size(), 15u);
    EXPECT_EQ(a.class_counts(), (std::vector<std::size_t>{5, 5, 5}));
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.samples[i].image, b.samples[i].image);
        EXPECT_EQ(a.samples[i].label, b.samples[i].label);
        EXPECT_EQ(a.samples[i].source_id, b.samples[i].source_id);
    }
    EXPECT_NO_THROW(a.validate());
}

TEST(Synth, ValuesInUnitInterval)
{
    auto p = small_params(9);
    p.classes = gcnl::default_gesture_classes(5);
    p.n_per_class = 20;
    p.clutter = 1.0;
    const auto ds = gcnl::synth_gestures(p);
    for (const auto& s : ds.samples) {
        for (const double v : s.image.data()) {
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
    }
}

TEST(Synth, DisjointSeedsGiveDistinctPixels)
{
    std::vector<gcnl::Dataset> sets;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        sets.push_back(gcnl::synth_gestures(small_params(seed)));
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            for (std::size_t k = 0; k < sets[i].size(); ++k) {
                EXPECT_NE(sets[i].samples[k].image, sets[j].samples[k].image) << i << " " << j << " " << k;
            }
        }
    }
}

TEST(Synth, CanonicalTemplatesMatchGoldenRenders)
{
    gcnl::SynthParams p;
    p.seed = 1;
    for (const auto* name : {"bar:0", "bar:45", "bar:90", "bar:135", "circle", "cross", "vee", "dot-grid"}) {
        p.classes.push_back(gcnl::parse_gesture_class(name));
    }
    p.n_per_class = 1;
    p.size = 32;
    p.clutter = 0.0;
    p.jitter = false;
    const auto ds = gcnl::synth_gestures(p);
    for (const auto& s : ds.samples) {
        const std::string name = p.classes[s.label].name();
        const auto golden = gcnl::read_image(fs::path(GCNL_GOLDEN_DIR) / (name + ".pgm"));
        EXPECT_EQ(gcnl::denormalize(s.image), golden) << name;
    }
}

TEST(Synth, ClassParsingAndErrors)
{
    EXPECT_EQ(gcnl::parse_gesture_class("bar:30").name(), "bar30");
    EXPECT_EQ(gcnl::parse_gesture_class("dot-grid").name(), "dot-grid");
    EXPECT_THROW(gcnl::parse_gesture_class("triangle"), gcnl::ConfigError);
    EXPECT_THROW(gcnl::parse_gesture_class("bar:x"), gcnl::ConfigError);
    EXPECT_DOUBLE_EQ(gcnl::parse_clutter_level("mid"), 0.5);
    EXPECT_DOUBLE_EQ(gcnl::parse_clutter_level("0.3"), 0.3);
    EXPECT_THROW(gcnl::parse_clutter_level("loud"), gcnl::ConfigError);
    auto p = small_params(1);
    p.classes.resize(1);
    EXPECT_THROW(gcnl::synth_gestures(p), gcnl::ConfigError);
    p = small_params(1);
    p.n_per_class = 0;
    EXPECT_THROW(gcnl::synth_gestures(p), gcnl::ConfigError);
}

TEST(Split, StratifiedCountsAndPartition)
{
    auto p = small_params(4);
    p.n_per_class = 10;
    const auto ds = gcnl::synth_gestures(p);
    const auto s = gcnl::split(ds, 0.8, 11);
    EXPECT_EQ(s.train.class_counts(), (std::vector<std::size_t>{8, 8, 8}));
    EXPECT_EQ(s.val.class_counts(), (std::vector<std::size_t>{2, 2, 2}));
    std::multiset<std::string> all;
    std::set<std::string> train_ids;
    for (const auto& x : s.train.samples) {
        all.insert(x.source_id);
        train_ids.insert(x.source_id);
    }
    for (const auto& x : s.val.samples) {
        all.insert(x.source_id);
        EXPECT_EQ(train_ids.count(x.source_id), 0u);
    }
    std::multiset<std::string> want;
    for (const auto& x : ds.samples) {
        want.insert(x.source_id);
    }
    EXPECT_EQ(all, want);
    const auto again = gcnl::split(ds, 0.8, 11);
    for (std::size_t i = 0; i < again.val.size(); ++i) {
        EXPECT_EQ(again.val.samples[i].source_id, s.val.samples[i].source_id);
    }
}

TEST(Split, ProportionsUpToRounding)
{
    auto p = small_params(4);
    p.n_per_class = 7;
    const auto ds = gcnl::synth_gestures(p);
    for (const double f : {0.3, 0.5, 0.6, 0.75}) {
        const auto s = gcnl::split(ds, f, 2);
        for (const auto c : s.train.class_counts()) {
            EXPECT_EQ(c, static_cast<std::size_t>(std::llround(f * 7)));
        }
    }
    EXPECT_THROW(gcnl::split(ds, 0.05, 1), gcnl::ConfigError);
    EXPECT_THROW(gcnl::split(ds, 0.97, 1), gcnl::ConfigError);
    EXPECT_THROW(gcnl::split(ds, 1.0, 1), gcnl::ConfigError);
}

TEST(Batches, CoverEverySampleOnceAndKeepShortBatch)
{
    auto p = small_params(5);
    p.n_per_class = 7;
    const auto ds = gcnl::synth_gestures(p);
    const auto bs = gcnl::batches(ds, 4, 99);
    ASSERT_EQ(bs.size(), 6u);
    EXPECT_EQ(bs.back().labels.size(), 1u);
    std::vector<std::size_t> counts(3, 0);
    std::size_t total = 0;
    for (const auto& b : bs) {
        EXPECT_EQ(b.images.dim(0), b.labels.size());
        total += b.labels.size();
        for (const auto l : b.labels) {
            ++counts[l];
        }
    }
    EXPECT_EQ(total, 21u);
    EXPECT_EQ(counts, (std::vector<std::size_t>{7, 7, 7}));
    const auto again = gcnl::batches(ds, 4, 99);
    for (std::size_t i = 0; i < bs.size(); ++i) {
        EXPECT_EQ(bs[i].images, again[i].images);
    }
    EXPECT_NE(gcnl::batches(ds, 4, 100)[0].images, bs[0].images);
    EXPECT_THROW(gcnl::batches(ds, 0, 1), gcnl::ConfigError);
}

TEST(Imbalance, KeepFractions)
{
    auto p = small_params(6);
    p.classes = gcnl::default_gesture_classes(2);
    p.n_per_class = 100;
    p.size = 16;
    const auto ds = gcnl::synth_gestures(p);
    const auto im = gcnl::imbalance(ds, {1.0, 0.1}, 3);
    EXPECT_EQ(im.class_counts(), (std::vector<std::size_t>{100, 10}));
    const auto again = gcnl::imbalance(ds, {1.0, 0.1}, 3);
    for (std::size_t i = 0; i < im.size(); ++i) {
        EXPECT_EQ(im.samples[i].source_id, again.samples[i].source_id);
    }
    EXPECT_THROW(gcnl::imbalance(ds, {1.0, 0.0}, 3), gcnl::ConfigError);
    EXPECT_THROW(gcnl::imbalance(ds, {1.0}, 3), gcnl::ConfigError);
}

TEST(Directory, ExportThenLoadRoundTrips)
{
    const auto ds = gcnl::synth_gestures(small_params(8));
    const fs::path dir = scratch_dir("roundtrip");
    gcnl::export_directory(ds, dir);
    const auto back = gcnl::load_directory(dir, 16);
    EXPECT_EQ(back.class_names, ds.class_names);
    ASSERT_EQ(back.size(), ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        EXPECT_EQ(back.samples[i].image, ds.samples[i].image);
        EXPECT_EQ(back.samples[i].label, ds.samples[i].label);
    }
    fs::remove_all(dir);
}

TEST(Directory, ClassIndexIsLexicographicRank)
{
    const fs::path dir = scratch_dir("lexi");
    for (const auto* name : {"zeta", "alpha", "mid"}) {
        fs::create_directories(dir / name);
        gcnl::write_image(dir / name / "a.pgm", ImageBuffer(2, 2, 1, {0, 0, 0, 0}));
    }
    gcnl::write_image(dir / "alpha" / "b.ppm", ImageBuffer(1, 1, 3, {255, 255, 255}));
    const auto ds = gcnl::load_directory(dir, 4);
    EXPECT_EQ(ds.class_names, (std::vector<std::string>{"alpha", "mid", "zeta"}));
    EXPECT_EQ(ds.class_counts(), (std::vector<std::size_t>{2, 1, 1}));
    EXPECT_EQ(ds.samples[1].image, gcnl::Tensor::ones({1, 4, 4}));
    fs::remove_all(dir);
}

TEST(Directory, MissingOrDegenerate)
{
    EXPECT_THROW(gcnl::load_directory("/nonexistent/gcnl", 8), gcnl::Error);
    const fs::path dir = scratch_dir("single");
    fs::create_directories(dir / "only");
    gcnl::write_image(dir / "only" / "a.pgm", ImageBuffer(2, 2, 1, {0, 0, 0, 0}));
    EXPECT_THROW(gcnl::load_directory(dir, 4), gcnl::ConfigError);
    fs::remove_all(dir);
}

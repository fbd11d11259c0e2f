#ifndef GCNL_DATASET_HPP
#define GCNL_DATASET_HPP

#include "gcnl/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gcnl {

struct Sample {
    Tensor image; // [1, S, S], values in [0, 1]
    std::size_t label = 0;
    std::string source_id;
};

struct Provenance {
    enum class Kind { synthetic, directory };
    Kind kind = Kind::synthetic;
    std::uint64_t seed = 0;
    std::string path;
};

struct Dataset {
    std::vector<std::string> class_names;
    std::vector<Sample> samples;
    Provenance provenance;

    std::size_t num_classes() const noexcept { return class_names.size(); }
    std::size_t size() const noexcept { return samples.size(); }
    std::vector<std::size_t> class_counts() const;
    std::vector<std::size_t> labels() const;

    // Throws ConfigError unless there are >= 2 classes, each with >= 1
    // sample, every label is valid and every image is [1,S,S] in [0,1].
    void validate() const;
};

// Layout: <root>/<class-name>/*.pgm|*.ppm. Class index is the
// lexicographic rank of the class directory name; files within a class
// are read in lexicographic order. Each file is decoded, converted to
// gray, resized to size x size and normalized.
Dataset load_directory(const std::filesystem::path& root, std::size_t size);

// Writes the same layout as load_directory reads, one 8-bit PGM per
// sample named by its index within the class.
void export_directory(const Dataset& dataset, const std::filesystem::path& root);

struct Split {
    Dataset train;
    Dataset val;
};

// Stratified: each class contributes round(train_fraction * count) samples
// to train (chosen by a seeded shuffle) and the rest to val. Both sides
// keep the original sample order.
Split split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

struct Batch {
    Tensor images; // [b, 1, S, S]
    std::vector<std::size_t> labels;
};

// Covers every sample exactly once; the final short batch is kept.
// The order is a permutation drawn from shuffle_seed.
std::vector<Batch> batches(const Dataset& dataset, std::size_t batch_size, std::uint64_t shuffle_seed);

// In-order batches with no shuffling, for evaluation.
std::vector<Batch> sequential_batches(const Dataset& dataset, std::size_t batch_size);

// Keeps round(keep[c] * count_c) samples of class c, chosen by a seeded
// shuffle; kept samples retain their original order.
Dataset imbalance(const Dataset& dataset, const std::vector<double>& keep_fractions, std::uint64_t seed);

Tensor stack_images(const Dataset& dataset, const std::vector<std::size_t>& indices);

} // namespace gcnl

#endif // GCNL_DATASET_HPP

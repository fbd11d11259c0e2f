#ifndef GCNL_CHECKPOINT_HPP
#define GCNL_CHECKPOINT_HPP

#include "gcnl/model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gcnl {

// Binary layout, all integers little-endian:
//
//   "GCNL"                         4-byte magic
//   u32  format version            currently 1
//   u64  header length, then that many bytes of UTF-8 JSON metadata
//   per parameter tensor, in model layer order:
//     u64 name length, name bytes
//     u32 rank, rank x u64 dims
//     product(dims) x f64 (IEEE-754, little-endian)
//
// The JSON header holds the canonical model config text, class names,
// training seed, epochs completed, final metrics and the tensor count.
inline constexpr std::uint32_t checkpoint_version = 1;
inline constexpr char checkpoint_magic[4] = {'G', 'C', 'N', 'L'};

struct FinalMetrics {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double macro_auc = 0.0;
    double macro_recall = 0.0;
    double accuracy = 0.0;

    friend bool operator==(const FinalMetrics&, const FinalMetrics&) = default;
};

struct CheckpointMeta {
    std::vector<std::string> class_names;
    std::uint64_t seed = 0;
    std::size_t epochs_completed = 0;
    std::optional<FinalMetrics> final_metrics;

    friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

struct Checkpoint {
    Model model;
    CheckpointMeta meta;
};

std::vector<std::uint8_t> serialize_checkpoint(const Model& model, const CheckpointMeta& meta);
// Throws LoadError with the byte offset of the first problem. The version
// is checked before any tensor is read.
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const Model& model, const CheckpointMeta& meta, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace gcnl

#endif // GCNL_CHECKPOINT_HPP

#ifndef GCNL_CONFIG_HPP
#define GCNL_CONFIG_HPP

#include "gcnl/dataset.hpp"
#include "gcnl/model_config.hpp"
#include "gcnl/synth.hpp"
#include "gcnl/train.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gcnl {

enum class DatasetSource { synthetic, directory };

// Everything a CLI run needs. The file form is flat `key = value` lines,
// '#' starts a comment, and the keys are exactly the field names below.
// Unknown or repeated keys are errors. Relative paths are resolved against
// the directory holding the config file.
//
//   dataset          synthetic | directory                (required)
//   data_dir         root of <class>/*.pgm|*.ppm          (directory only)
//   synth_seed       generator seed                       (default 1)
//   synth_classes    comma list, e.g. bar:45,circle,cross,vee
//   synth_per_class  samples per class                    (default 200)
//   synth_clutter    none | low | mid | high | 0..1       (default mid)
//   synth_jitter     true | false                         (default true)
//   imbalance        comma list of per-class keep fractions (optional)
//   imbalance_seed   (default 1)
//   image_size       S for the S x S preprocessing size   (default 32)
//   train_fraction   stratified split fraction            (default 0.8)
//   split_seed       (default 1)
//   model            plain | residual | dense | custom    (default plain)
//   model_config     canonical model text file            (custom only)
//   model_width      zoo stem width                       (default 8)
//   model_seed       parameter init seed                  (default 7)
//   epochs, batch_size, learning_rate, momentum, seed, eval_every
//   loss             focal | cross_entropy                (default focal)
//   gamma            focal exponent                       (default 2)
//   alpha            frequency | uniform                  (default frequency)
//   record_timing    write wall time into metrics.csv     (default false)
//   output_dir       where checkpoints and reports go     (default out)
//   compare_custom   extra model config file for `compare` (optional)
struct RunConfig {
    DatasetSource dataset = DatasetSource::synthetic;
    std::filesystem::path data_dir;
    std::uint64_t synth_seed = 1;
    std::vector<GestureClass> synth_classes = default_gesture_classes(4);
    std::size_t synth_per_class = 200;
    double synth_clutter = 0.5;
    bool synth_jitter = true;
    std::vector<double> imbalance;
    std::uint64_t imbalance_seed = 1;
    std::size_t image_size = 32;
    double train_fraction = 0.8;
    std::uint64_t split_seed = 1;
    std::string model = "plain";
    std::filesystem::path model_config;
    std::size_t model_width = 8;
    std::uint64_t model_seed = 7;
    TrainConfig train;
    bool record_timing = false;
    std::filesystem::path output_dir = "out";
    std::filesystem::path compare_custom;

    // Range and path checks; called by the parsers and after CLI overrides.
    void validate() const;
};

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Synthesizes or loads the dataset and applies `imbalance` if set.
Dataset load_dataset(const RunConfig& cfg);

// The model config for cfg.model, checked against the dataset's class count.
ModelConfig resolve_model_config(const RunConfig& cfg, std::size_t classes);

LossMode parse_loss_mode(std::string_view text);

} // namespace gcnl

#endif // GCNL_CONFIG_HPP

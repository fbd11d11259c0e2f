#ifndef GCNL_MODEL_CONFIG_HPP
#define GCNL_MODEL_CONFIG_HPP

#include "gcnl/layers.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace gcnl {

struct InputShape {
    std::size_t channels = 1;
    std::size_t height = 32;
    std::size_t width = 32;

    friend bool operator==(const InputShape&, const InputShape&) = default;
};

namespace layer {

struct Conv {
    std::size_t in = 1;
    std::size_t out = 1;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::size_t padding = 0;
    friend bool operator==(const Conv&, const Conv&) = default;
};

struct Relu {
    friend bool operator==(const Relu&, const Relu&) = default;
};

struct Pool {
    PoolSpec spec;
    friend bool operator==(const Pool& a, const Pool& b)
    {
        return a.spec.kind == b.spec.kind && a.spec.window == b.spec.window && a.spec.stride == b.spec.stride;
    }
};

struct Flatten {
    friend bool operator==(const Flatten&, const Flatten&) = default;
};

struct Dense {
    std::size_t in = 1;
    std::size_t out = 1;
    friend bool operator==(const Dense&, const Dense&) = default;
};

struct Softmax {
    friend bool operator==(const Softmax&, const Softmax&) = default;
};

// relu(conv2(relu(conv1(x))) + x); both convs keep `channels` and use
// "same" padding, so kernel must be odd.
struct Residual {
    std::size_t channels = 1;
    std::size_t kernel = 3;
    friend bool operator==(const Residual&, const Residual&) = default;
};

// `depth` conv+relu steps; step i sees the channel concatenation of the
// block input and every earlier step's output and adds `growth` channels.
// Output channels = in + depth * growth.
struct DenseBlock {
    std::size_t in = 1;
    std::size_t depth = 2;
    std::size_t growth = 4;
    std::size_t kernel = 3;
    friend bool operator==(const DenseBlock&, const DenseBlock&) = default;
};

} // namespace layer

using LayerSpec = std::variant<layer::Conv, layer::Relu, layer::Pool, layer::Flatten, layer::Dense, layer::Softmax,
                               layer::Residual, layer::DenseBlock>;

std::string_view kind_name(const LayerSpec& spec);

struct ModelConfig {
    InputShape input;
    std::size_t classes = 2;
    std::vector<LayerSpec> layers;
    std::uint64_t seed = 0;

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Canonical line-oriented text form, e.g.
//
//   input 1 32 32
//   classes 4
//   seed 7
//   conv in=1 out=8 kernel=3 stride=1 padding=1
//   relu
//   pool kind=max window=2 stride=2
//   residual channels=8 kernel=3
//   dense_block in=8 depth=2 growth=4 kernel=3
//   flatten
//   dense in=1024 out=4
//   softmax
//
// Blank lines and '#' comments are ignored on parse. to_text always emits
// every field so that parse(to_text(c)) == c and the text is stable.
std::string to_text(const ModelConfig& config);
ModelConfig parse_model_config(std::string_view text);

} // namespace gcnl

#endif // GCNL_MODEL_CONFIG_HPP

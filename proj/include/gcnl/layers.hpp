#ifndef GCNL_LAYERS_HPP
#define GCNL_LAYERS_HPP

#include "gcnl/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gcnl {

struct ConvParams {
    Tensor weights; // [out_channels, in_channels, kernel_h, kernel_w]
    Tensor bias;    // [out_channels]
    std::size_t stride = 1;
    std::size_t padding = 0;
};

struct DenseParams {
    Tensor weights; // [out_features, in_features]
    Tensor bias;    // [out_features]
};

enum class PoolKind { max, average };

struct PoolSpec {
    PoolKind kind = PoolKind::max;
    std::size_t window = 2;
    std::size_t stride = 2;
};

// floor((in + 2*padding - kernel) / stride) + 1; throws ShapeError when
// the kernel does not fit in the padded input.
std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t padding);

// Convolution is cross-correlation (no kernel flip). This is the linear
// part of a conv layer; ReLU is a separate op.
Tensor conv2d_forward(const Tensor& x, const ConvParams& p);

struct ConvGrads {
    Tensor input;
    Tensor weights;
    Tensor bias;
};

ConvGrads conv2d_backward(const Tensor& x, const ConvParams& p, const Tensor& grad_out);

Tensor relu_forward(const Tensor& x);
// Passes grad_out where x > 0; the subgradient at exactly 0 is 0.
Tensor relu_backward(const Tensor& x, const Tensor& grad_out);

// What pool_backward needs to route gradients. For max pooling `argmax`
// holds the flat input index chosen for every output element (first
// row-major position wins ties); it is empty for average pooling.
struct PoolRecord {
    PoolSpec spec;
    Shape input_shape;
    Shape output_shape;
    std::vector<std::size_t> argmax;
};

struct PoolResult {
    Tensor output;
    PoolRecord record;
};

PoolResult pool_forward(const Tensor& x, const PoolSpec& s);
Tensor pool_backward(const PoolRecord& record, const Tensor& grad_out);

// z = f . W^T + b per batch row.
Tensor dense_forward(const Tensor& f, const DenseParams& p);

struct DenseGrads {
    Tensor input;
    Tensor weights;
    Tensor bias;
};

DenseGrads dense_backward(const Tensor& f, const DenseParams& p, const Tensor& grad_out);

// Row-wise softmax over [batch, C] with max-shift for stability.
Tensor softmax(const Tensor& z);

// Channel-axis concatenation / split for [batch, C, H, W] tensors.
Tensor concat_channels(const Tensor& a, const Tensor& b);
struct ChannelSplit {
    Tensor head;
    Tensor tail;
};
ChannelSplit split_channels(const Tensor& x, std::size_t head_channels);

// He-style initialization: N(0, sqrt(2 / fan_in)) weights, zero bias.
ConvParams he_conv(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride,
                   std::size_t padding, std::uint64_t seed);
DenseParams he_dense(std::size_t in_features, std::size_t out_features, std::uint64_t seed);

} // namespace gcnl

#endif // GCNL_LAYERS_HPP

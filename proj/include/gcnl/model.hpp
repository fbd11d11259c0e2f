#ifndef GCNL_MODEL_HPP
#define GCNL_MODEL_HPP

#include "gcnl/layers.hpp"
#include "gcnl/model_config.hpp"
#include "gcnl/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace gcnl {

// ---- residual and dense-connected blocks, usable on their own ----

struct ResidualParams {
    ConvParams first;
    ConvParams second;
};

struct ResidualForward {
    Tensor output;    // relu(pre_sum)
    Tensor pre_first; // conv1(x)
    Tensor hidden;    // relu(pre_first)
    Tensor pre_sum;   // conv2(hidden) + x
};

ResidualForward residual_block_forward(const Tensor& x, const ResidualParams& p);

struct ResidualGrads {
    Tensor input;        // branch_input + skip_input
    Tensor branch_input; // through conv1/conv2
    Tensor skip_input;   // through the identity path
    ConvGrads first;
    ConvGrads second;
};

ResidualGrads residual_block_backward(const Tensor& x, const ResidualParams& p, const ResidualForward& fwd,
                                      const Tensor& grad_out);

struct DenseBlockForward {
    Tensor output;
    std::vector<Tensor> step_inputs; // concatenated input seen by each step
    std::vector<Tensor> step_pre;    // conv output of each step, pre-relu
};

DenseBlockForward dense_block_forward(const Tensor& x, const std::vector<ConvParams>& steps);

struct DenseBlockGrads {
    Tensor input;
    std::vector<ConvGrads> steps;
};

DenseBlockGrads dense_block_backward(const std::vector<ConvParams>& steps, const DenseBlockForward& fwd,
                                     const Tensor& grad_out);

// ---- model ----

struct NamedTensor {
    std::string name;
    Tensor value;
};

// Activations recorded by Model::forward for use by Model::backward. A
// cache is tied to the model object and to the parameter version that
// produced it.
struct ForwardCache {
    struct Conv {
        Tensor input;
    };
    struct Relu {
        Tensor input;
    };
    struct Pool {
        PoolRecord record;
    };
    struct Flatten {
        Shape input_shape;
    };
    struct Dense {
        Tensor input;
    };
    struct Residual {
        Tensor input;
        ResidualForward fwd;
    };
    struct DenseBlock {
        DenseBlockForward fwd;
    };
    struct Softmax {};
    using Entry = std::variant<Conv, Relu, Pool, Flatten, Dense, Residual, DenseBlock, Softmax>;

    std::uint64_t model_id = 0;
    std::uint64_t version = 0;
    std::vector<Entry> entries;
};

struct ForwardResult {
    Tensor probs;
    Tensor logits;
    ForwardCache cache;
};

// A built network. Construction validates the whole layer stack
// symbolically (BuildError names the offending pair of layers) and
// initializes every parameter from config.seed.
class Model {
public:
    explicit Model(ModelConfig config);

    Model(const Model& other);
    Model& operator=(const Model& other);
    Model(Model&&) noexcept = default;
    Model& operator=(Model&&) noexcept = default;

    const ModelConfig& config() const noexcept { return config_; }
    std::size_t num_classes() const noexcept { return config_.classes; }
    const InputShape& input_shape() const noexcept { return config_.input; }

    // In layer order; names are unique and stable ("l3.residual.conv2.weight").
    const std::vector<NamedTensor>& parameters() const noexcept { return params_; }
    std::size_t scalar_parameter_count() const;

    // Both bump the parameter version, invalidating outstanding caches.
    void set_parameter(std::size_t index, Tensor value);
    void set_parameters(std::vector<Tensor> values);

    ForwardResult forward(const Tensor& x) const;
    Tensor predict(const Tensor& x) const { return forward(x).probs; }

    // Gradient of the scalar loss whose logit-gradient is grad_logits, one
    // tensor per parameter in parameters() order.
    std::vector<Tensor> backward(const ForwardCache& cache, const Tensor& grad_logits) const;

private:
    struct ConvLayer {
        std::size_t weight, bias, stride, padding;
    };
    struct PoolLayer {
        PoolSpec spec;
    };
    struct DenseLayer {
        std::size_t weight, bias;
    };
    struct ResidualLayer {
        ConvLayer first, second;
    };
    struct DenseBlockLayer {
        std::vector<ConvLayer> steps;
    };
    struct Marker {
        enum class Kind { relu, flatten, softmax } kind;
    };
    using Layer = std::variant<ConvLayer, PoolLayer, DenseLayer, ResidualLayer, DenseBlockLayer, Marker>;

    ConvLayer add_conv(const std::string& prefix, std::size_t in, std::size_t out, std::size_t kernel,
                       std::size_t stride, std::size_t padding, std::uint64_t seed);
    ConvParams conv_params(const ConvLayer& layer) const;

    ModelConfig config_;
    std::vector<Layer> layers_;
    std::vector<NamedTensor> params_;
    std::uint64_t id_;
    std::uint64_t version_ = 0;
};

} // namespace gcnl

#endif // GCNL_MODEL_HPP

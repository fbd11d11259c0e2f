#include "gcnl/model.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/random.hpp"

#include <algorithm>
#include <atomic>
#include <optional>

namespace gcnl {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t next_model_id()
{
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1);
}

// Symbolic activation shape during build: spatial (c, h, w) or flat n.
struct SymShape {
    bool flat = false;
    std::size_t c = 0, h = 0, w = 0, n = 0;

    std::string describe() const
    {
        if (flat) {
            return "[" + std::to_string(n) + "]";
        }
        return "[" + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + "]";
    }
};

} // namespace

// ---- blocks ----

ResidualForward residual_block_forward(const Tensor& x, const ResidualParams& p)
{
    Tensor pre_first = conv2d_forward(x, p.first);
    Tensor hidden = relu_forward(pre_first);
    Tensor branch = conv2d_forward(hidden, p.second);
    if (branch.shape() != x.shape()) {
        throw ShapeError("residual branch output " + to_string(branch.shape()) + " does not match input " +
                         to_string(x.shape()));
    }
    Tensor pre_sum = add(branch, x);
    Tensor output = relu_forward(pre_sum);
    return {std::move(output), std::move(pre_first), std::move(hidden), std::move(pre_sum)};
}

ResidualGrads residual_block_backward(const Tensor& x, const ResidualParams& p, const ResidualForward& fwd,
                                      const Tensor& grad_out)
{
    const Tensor grad_sum = relu_backward(fwd.pre_sum, grad_out);
    ConvGrads second = conv2d_backward(fwd.hidden, p.second, grad_sum);
    const Tensor grad_pre_first = relu_backward(fwd.pre_first, second.input);
    ConvGrads first = conv2d_backward(x, p.first, grad_pre_first);
    Tensor branch_input = first.input;
    Tensor input = add(branch_input, grad_sum);
    return {std::move(input), std::move(branch_input), grad_sum, std::move(first), std::move(second)};
}

DenseBlockForward dense_block_forward(const Tensor& x, const std::vector<ConvParams>& steps)
{
    DenseBlockForward fwd{x, {}, {}};
    for (const auto& step : steps) {
        fwd.step_inputs.push_back(fwd.output);
        Tensor pre = conv2d_forward(fwd.output, step);
        fwd.output = concat_channels(fwd.output, relu_forward(pre));
        fwd.step_pre.push_back(std::move(pre));
    }
    return fwd;
}

DenseBlockGrads dense_block_backward(const std::vector<ConvParams>& steps, const DenseBlockForward& fwd,
                                     const Tensor& grad_out)
{
    if (steps.size() != fwd.step_inputs.size()) {
        throw ContractError("dense block cache does not match its parameters");
    }
    Tensor grad = grad_out;
    std::vector<ConvGrads> step_grads;
    step_grads.reserve(steps.size());
    for (std::size_t i = steps.size(); i-- > 0;) {
        const std::size_t head = fwd.step_inputs[i].dim(1);
        auto [grad_prev, grad_new] = split_channels(grad, head);
        const Tensor grad_pre = relu_backward(fwd.step_pre[i], grad_new);
        ConvGrads g = conv2d_backward(fwd.step_inputs[i], steps[i], grad_pre);
        grad = add(grad_prev, g.input);
        step_grads.push_back(std::move(g));
    }
    std::reverse(step_grads.begin(), step_grads.end());
    return {std::move(grad), std::move(step_grads)};
}

// ---- model ----

Model::Model(ModelConfig config) : config_(std::move(config)), id_(next_model_id())
{
    if (config_.classes < 2) {
        throw BuildError("model needs at least 2 classes");
    }
    if (config_.input.channels == 0 || config_.input.height == 0 || config_.input.width == 0) {
        throw BuildError("model input dimensions must be positive");
    }
    if (config_.layers.empty()) {
        throw BuildError("model has no layers");
    }

    SymShape shape{false, config_.input.channels, config_.input.height, config_.input.width, 0};
    std::string prev = "input";
    const auto fail = [&](std::size_t i, const std::string& why) {
        throw BuildError("layer " + std::to_string(i) + " (" + std::string(kind_name(config_.layers[i])) +
                         ") is incompatible with " + prev + " producing " + shape.describe() + ": " + why);
    };
    const auto need_spatial = [&](std::size_t i) {
        if (shape.flat) {
            fail(i, "needs a spatial [C,H,W] input");
        }
    };

    for (std::size_t i = 0; i < config_.layers.size(); ++i) {
        const std::string prefix = "l" + std::to_string(i);
        const auto& spec = config_.layers[i];
        if (!shape.flat && shape.c == 0) {
            fail(i, "follows the softmax output");
        }
        std::visit(
            overloaded{
                [&](const layer::Conv& c) {
                    need_spatial(i);
                    if (c.in != shape.c) {
                        fail(i, "expects " + std::to_string(c.in) + " input channels");
                    }
                    if (c.out == 0 || c.kernel == 0 || c.stride == 0) {
                        fail(i, "out, kernel and stride must be positive");
                    }
                    if (shape.h + 2 * c.padding < c.kernel || shape.w + 2 * c.padding < c.kernel) {
                        fail(i, "kernel larger than padded input");
                    }
                    layers_.emplace_back(add_conv(prefix + ".conv", c.in, c.out, c.kernel, c.stride, c.padding,
                                                  derive_seed(config_.seed, i)));
                    shape.c = c.out;
                    shape.h = conv_output_size(shape.h, c.kernel, c.stride, c.padding);
                    shape.w = conv_output_size(shape.w, c.kernel, c.stride, c.padding);
                },
                [&](const layer::Relu&) { layers_.emplace_back(Marker{Marker::Kind::relu}); },
                [&](const layer::Pool& p) {
                    need_spatial(i);
                    if (p.spec.window == 0 || p.spec.stride == 0) {
                        fail(i, "window and stride must be positive");
                    }
                    if (shape.h < p.spec.window || shape.w < p.spec.window) {
                        fail(i, "pool window larger than input");
                    }
                    layers_.emplace_back(PoolLayer{p.spec});
                    shape.h = conv_output_size(shape.h, p.spec.window, p.spec.stride, 0);
                    shape.w = conv_output_size(shape.w, p.spec.window, p.spec.stride, 0);
                },
                [&](const layer::Flatten&) {
                    need_spatial(i);
                    layers_.emplace_back(Marker{Marker::Kind::flatten});
                    shape = SymShape{true, 0, 0, 0, shape.c * shape.h * shape.w};
                },
                [&](const layer::Dense& d) {
                    if (!shape.flat) {
                        fail(i, "needs a flattened input");
                    }
                    if (d.in != shape.n) {
                        fail(i, "expects " + std::to_string(d.in) + " input features");
                    }
                    if (d.out == 0) {
                        fail(i, "out must be positive");
                    }
                    const DenseParams init = he_dense(d.in, d.out, derive_seed(config_.seed, i));
                    DenseLayer dl{params_.size(), params_.size() + 1};
                    params_.push_back({prefix + ".dense.weight", init.weights});
                    params_.push_back({prefix + ".dense.bias", init.bias});
                    layers_.emplace_back(dl);
                    shape.n = d.out;
                },
                [&](const layer::Softmax&) {
                    if (!shape.flat) {
                        fail(i, "needs [C] logits");
                    }
                    if (shape.n != config_.classes) {
                        fail(i, "expects " + std::to_string(config_.classes) + " logits");
                    }
                    if (i + 1 != config_.layers.size()) {
                        fail(i, "softmax must be the final layer");
                    }
                    layers_.emplace_back(Marker{Marker::Kind::softmax});
                    shape.c = 0;
                },
                [&](const layer::Residual& r) {
                    need_spatial(i);
                    if (r.channels != shape.c) {
                        fail(i, "identity skip needs " + std::to_string(r.channels) + " channels");
                    }
                    if (r.kernel == 0 || r.kernel % 2 == 0) {
                        fail(i, "residual kernel must be odd");
                    }
                    const std::size_t pad = r.kernel / 2;
                    const auto seed = derive_seed(config_.seed, i);
                    ResidualLayer rl{add_conv(prefix + ".residual.conv1", r.channels, r.channels, r.kernel, 1, pad,
                                              derive_seed(seed, 0)),
                                     add_conv(prefix + ".residual.conv2", r.channels, r.channels, r.kernel, 1, pad,
                                              derive_seed(seed, 1))};
                    layers_.emplace_back(rl);
                },
                [&](const layer::DenseBlock& d) {
                    need_spatial(i);
                    if (d.in != shape.c) {
                        fail(i, "expects " + std::to_string(d.in) + " input channels");
                    }
                    if (d.depth == 0 || d.growth == 0 || d.kernel == 0 || d.kernel % 2 == 0) {
                        fail(i, "depth and growth must be positive and kernel odd");
                    }
                    const std::size_t pad = d.kernel / 2;
                    const auto seed = derive_seed(config_.seed, i);
                    DenseBlockLayer dl;
                    for (std::size_t s = 0; s < d.depth; ++s) {
                        dl.steps.push_back(add_conv(prefix + ".dense_block.conv" + std::to_string(s + 1),
                                                    d.in + s * d.growth, d.growth, d.kernel, 1, pad,
                                                    derive_seed(seed, s)));
                    }
                    layers_.emplace_back(std::move(dl));
                    shape.c = d.in + d.depth * d.growth;
                },
            },
            spec);
        prev = "layer " + std::to_string(i) + " (" + std::string(kind_name(spec)) + ")";
    }
    if (!std::holds_alternative<layer::Softmax>(config_.layers.back())) {
        throw BuildError("final layer must be softmax, got " + std::string(kind_name(config_.layers.back())));
    }
}

Model::Model(const Model& other)
    : config_(other.config_), layers_(other.layers_), params_(other.params_), id_(next_model_id()),
      version_(other.version_)
{
}

Model& Model::operator=(const Model& other)
{
    if (this != &other) {
        config_ = other.config_;
        layers_ = other.layers_;
        params_ = other.params_;
        id_ = next_model_id();
        version_ = other.version_;
    }
    return *this;
}

Model::ConvLayer Model::add_conv(const std::string& prefix, std::size_t in, std::size_t out, std::size_t kernel,
                                 std::size_t stride, std::size_t padding, std::uint64_t seed)
{
    ConvParams init = he_conv(in, out, kernel, stride, padding, seed);
    ConvLayer layer{params_.size(), params_.size() + 1, stride, padding};
    params_.push_back({prefix + ".weight", std::move(init.weights)});
    params_.push_back({prefix + ".bias", std::move(init.bias)});
    return layer;
}

ConvParams Model::conv_params(const ConvLayer& layer) const
{
    return {params_[layer.weight].value, params_[layer.bias].value, layer.stride, layer.padding};
}

std::size_t Model::scalar_parameter_count() const
{
    std::size_t n = 0;
    for (const auto& p : params_) {
        n += p.value.size();
    }
    return n;
}

void Model::set_parameter(std::size_t index, Tensor value)
{
    if (index >= params_.size()) {
        throw IndexError("parameter index " + std::to_string(index) + " out of range");
    }
    if (value.shape() != params_[index].value.shape()) {
        throw ShapeError("parameter " + params_[index].name + " has shape " + to_string(params_[index].value.shape()) +
                         ", got " + to_string(value.shape()));
    }
    params_[index].value = std::move(value);
    ++version_;
}

void Model::set_parameters(std::vector<Tensor> values)
{
    if (values.size() != params_.size()) {
        throw ShapeError("expected " + std::to_string(params_.size()) + " parameter tensors, got " +
                         std::to_string(values.size()));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].shape() != params_[i].value.shape()) {
            throw ShapeError("parameter " + params_[i].name + " has shape " + to_string(params_[i].value.shape()) +
                             ", got " + to_string(values[i].shape()));
        }
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        params_[i].value = std::move(values[i]);
    }
    ++version_;
}

ForwardResult Model::forward(const Tensor& x) const
{
    const auto& in = config_.input;
    if (x.rank() != 4 || x.dim(1) != in.channels || x.dim(2) != in.height || x.dim(3) != in.width) {
        throw ShapeError("model expects input [batch," + std::to_string(in.channels) + "," +
                         std::to_string(in.height) + "," + std::to_string(in.width) + "], got " +
                         to_string(x.shape()));
    }
    ForwardCache cache;
    cache.model_id = id_;
    cache.version = version_;
    cache.entries.reserve(layers_.size());
    Tensor cur = x;
    std::optional<Tensor> logits;
    std::optional<Tensor> probs;

    for (const auto& layer : layers_) {
        std::visit(overloaded{
                       [&](const ConvLayer& c) {
                           Tensor next = conv2d_forward(cur, conv_params(c));
                           cache.entries.emplace_back(ForwardCache::Conv{std::move(cur)});
                           cur = std::move(next);
                       },
                       [&](const PoolLayer& p) {
                           auto result = pool_forward(cur, p.spec);
                           cache.entries.emplace_back(ForwardCache::Pool{std::move(result.record)});
                           cur = std::move(result.output);
                       },
                       [&](const DenseLayer& d) {
                           Tensor next = dense_forward(cur, {params_[d.weight].value, params_[d.bias].value});
                           cache.entries.emplace_back(ForwardCache::Dense{std::move(cur)});
                           cur = std::move(next);
                       },
                       [&](const ResidualLayer& r) {
                           auto fwd = residual_block_forward(cur, {conv_params(r.first), conv_params(r.second)});
                           Tensor next = fwd.output;
                           cache.entries.emplace_back(ForwardCache::Residual{std::move(cur), std::move(fwd)});
                           cur = std::move(next);
                       },
                       [&](const DenseBlockLayer& d) {
                           std::vector<ConvParams> steps;
                           for (const auto& s : d.steps) {
                               steps.push_back(conv_params(s));
                           }
                           auto fwd = dense_block_forward(cur, steps);
                           Tensor next = fwd.output;
                           cache.entries.emplace_back(ForwardCache::DenseBlock{std::move(fwd)});
                           cur = std::move(next);
                       },
                       [&](const Marker& m) {
                           switch (m.kind) {
                           case Marker::Kind::relu: {
                               Tensor next = relu_forward(cur);
                               cache.entries.emplace_back(ForwardCache::Relu{std::move(cur)});
                               cur = std::move(next);
                               break;
                           }
                           case Marker::Kind::flatten: {
                               const std::size_t batch = cur.dim(0);
                               const std::size_t rest = cur.size() / batch;
                               cache.entries.emplace_back(ForwardCache::Flatten{cur.shape()});
                               cur = reshape(cur, {batch, rest});
                               break;
                           }
                           case Marker::Kind::softmax:
                               cache.entries.emplace_back(ForwardCache::Softmax{});
                               probs = softmax(cur);
                               logits = cur;
                               break;
                           }
                       },
                   },
                   layer);
    }
    return {std::move(*probs), std::move(*logits), std::move(cache)};
}

std::vector<Tensor> Model::backward(const ForwardCache& cache, const Tensor& grad_logits) const
{
    if (cache.model_id != id_ || cache.version != version_ || cache.entries.size() != layers_.size()) {
        throw ContractError("forward cache does not belong to the current state of this model");
    }
    const auto* last = std::get_if<ForwardCache::Softmax>(&cache.entries.back());
    if (last == nullptr || grad_logits.rank() != 2 || grad_logits.dim(1) != config_.classes) {
        throw ShapeError("grad_logits must be [batch, " + std::to_string(config_.classes) + "], got " +
                         to_string(grad_logits.shape()));
    }
    std::vector<std::optional<Tensor>> grads(params_.size());
    Tensor grad = grad_logits;

    for (std::size_t i = layers_.size(); i-- > 0;) {
        const auto& layer = layers_[i];
        const auto& entry = cache.entries[i];
        std::visit(overloaded{
                       [&](const ConvLayer& c) {
                           const auto& e = std::get<ForwardCache::Conv>(entry);
                           ConvGrads g = conv2d_backward(e.input, conv_params(c), grad);
                           grads[c.weight] = std::move(g.weights);
                           grads[c.bias] = std::move(g.bias);
                           grad = std::move(g.input);
                       },
                       [&](const PoolLayer&) {
                           grad = pool_backward(std::get<ForwardCache::Pool>(entry).record, grad);
                       },
                       [&](const DenseLayer& d) {
                           const auto& e = std::get<ForwardCache::Dense>(entry);
                           DenseGrads g = dense_backward(e.input, {params_[d.weight].value, params_[d.bias].value},
                                                         grad);
                           grads[d.weight] = std::move(g.weights);
                           grads[d.bias] = std::move(g.bias);
                           grad = std::move(g.input);
                       },
                       [&](const ResidualLayer& r) {
                           const auto& e = std::get<ForwardCache::Residual>(entry);
                           ResidualGrads g = residual_block_backward(
                               e.input, {conv_params(r.first), conv_params(r.second)}, e.fwd, grad);
                           grads[r.first.weight] = std::move(g.first.weights);
                           grads[r.first.bias] = std::move(g.first.bias);
                           grads[r.second.weight] = std::move(g.second.weights);
                           grads[r.second.bias] = std::move(g.second.bias);
                           grad = std::move(g.input);
                       },
                       [&](const DenseBlockLayer& d) {
                           const auto& e = std::get<ForwardCache::DenseBlock>(entry);
                           std::vector<ConvParams> steps;
                           for (const auto& s : d.steps) {
                               steps.push_back(conv_params(s));
                           }
                           DenseBlockGrads g = dense_block_backward(steps, e.fwd, grad);
                           for (std::size_t s = 0; s < d.steps.size(); ++s) {
                               grads[d.steps[s].weight] = std::move(g.steps[s].weights);
                               grads[d.steps[s].bias] = std::move(g.steps[s].bias);
                           }
                           grad = std::move(g.input);
                       },
                       [&](const Marker& m) {
                           switch (m.kind) {
                           case Marker::Kind::relu:
                               grad = relu_backward(std::get<ForwardCache::Relu>(entry).input, grad);
                               break;
                           case Marker::Kind::flatten:
                               grad = reshape(grad, std::get<ForwardCache::Flatten>(entry).input_shape);
                               break;
                           case Marker::Kind::softmax:
                               // the loss already differentiated through softmax
                               break;
                           }
                       },
                   },
                   layer);
    }

    std::vector<Tensor> out;
    out.reserve(grads.size());
    for (auto& g : grads) {
        out.push_back(std::move(*g));
    }
    return out;
}

} // namespace gcnl

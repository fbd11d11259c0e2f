#include "gcnl/zoo.hpp"

#include "gcnl/errors.hpp"

namespace gcnl {

namespace {

constexpr std::size_t min_spatial = 16;

void check_input(const InputShape& input, std::size_t classes, std::size_t width)
{
    if (input.height < min_spatial || input.width < min_spatial) {
        throw ConfigError("zoo architectures need inputs of at least 16x16, got " + std::to_string(input.height) +
                          "x" + std::to_string(input.width));
    }
    if (input.channels == 0) {
        throw ConfigError("input needs at least one channel");
    }
    if (classes < 2) {
        throw ConfigError("need at least 2 classes");
    }
    if (width < 2) {
        throw ConfigError("zoo width must be >= 2");
    }
}

layer::Conv conv3(std::size_t in, std::size_t out) { return {in, out, 3, 1, 1}; }

layer::Pool max_pool() { return layer::Pool{PoolSpec{PoolKind::max, 2, 2}}; }

std::size_t pooled(std::size_t n) { return (n - 2) / 2 + 1; }

void add_head(ModelConfig& cfg, std::size_t channels)
{
    const std::size_t h = pooled(pooled(cfg.input.height));
    const std::size_t w = pooled(pooled(cfg.input.width));
    cfg.layers.emplace_back(layer::Flatten{});
    cfg.layers.emplace_back(layer::Dense{channels * h * w, cfg.classes});
    cfg.layers.emplace_back(layer::Softmax{});
}

} // namespace

ModelConfig plain_cnn(const InputShape& input, std::size_t classes, std::uint64_t seed, std::size_t width)
{
    check_input(input, classes, width);
    ModelConfig cfg{input, classes, {}, seed};
    auto& l = cfg.layers;
    const std::size_t w2 = 2 * width;
    l.emplace_back(conv3(input.channels, width));
    l.emplace_back(layer::Relu{});
    l.emplace_back(conv3(width, width));
    l.emplace_back(layer::Relu{});
    l.emplace_back(conv3(width, width));
    l.emplace_back(layer::Relu{});
    l.emplace_back(max_pool());
    l.emplace_back(conv3(width, w2));
    l.emplace_back(layer::Relu{});
    l.emplace_back(conv3(w2, w2));
    l.emplace_back(layer::Relu{});
    l.emplace_back(conv3(w2, w2));
    l.emplace_back(layer::Relu{});
    l.emplace_back(max_pool());
    add_head(cfg, w2);
    return cfg;
}

ModelConfig residual_cnn(const InputShape& input, std::size_t classes, std::uint64_t seed, std::size_t width)
{
    check_input(input, classes, width);
    ModelConfig cfg{input, classes, {}, seed};
    auto& l = cfg.layers;
    const std::size_t w2 = 2 * width;
    l.emplace_back(conv3(input.channels, width));
    l.emplace_back(layer::Relu{});
    l.emplace_back(layer::Residual{width, 3});
    l.emplace_back(max_pool());
    l.emplace_back(conv3(width, w2));
    l.emplace_back(layer::Relu{});
    l.emplace_back(layer::Residual{w2, 3});
    l.emplace_back(max_pool());
    add_head(cfg, w2);
    return cfg;
}

ModelConfig dense_cnn(const InputShape& input, std::size_t classes, std::uint64_t seed, std::size_t width)
{
    check_input(input, classes, width);
    ModelConfig cfg{input, classes, {}, seed};
    auto& l = cfg.layers;
    const std::size_t g1 = width / 2;
    const std::size_t g2 = width;
    const std::size_t after_first = width + 2 * g1;
    const std::size_t after_second = width + 2 * g2;
    l.emplace_back(conv3(input.channels, width));
    l.emplace_back(layer::Relu{});
    l.emplace_back(layer::DenseBlock{width, 2, g1, 3});
    l.emplace_back(layer::Conv{after_first, width, 1, 1, 0});
    l.emplace_back(layer::Relu{});
    l.emplace_back(max_pool());
    l.emplace_back(layer::DenseBlock{width, 2, g2, 3});
    l.emplace_back(max_pool());
    add_head(cfg, after_second);
    return cfg;
}

const std::vector<std::string>& zoo_names()
{
    static const std::vector<std::string> names{"plain", "residual", "dense"};
    return names;
}

ModelConfig zoo_config(std::string_view name, const InputShape& input, std::size_t classes, std::uint64_t seed,
                       std::size_t width)
{
    if (name == "plain") {
        return plain_cnn(input, classes, seed, width);
    }
    if (name == "residual") {
        return residual_cnn(input, classes, seed, width);
    }
    if (name == "dense") {
        return dense_cnn(input, classes, seed, width);
    }
    throw ConfigError("unknown model '" + std::string(name) + "' (expected plain, residual or dense)");
}

} // namespace gcnl

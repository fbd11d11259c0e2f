#ifndef GCNL_ZOO_HPP
#define GCNL_ZOO_HPP

#include "gcnl/model_config.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gcnl {

// Three toy-scale architectures, each with six 3x3/1x1 conv layers and two
// 2x2 max pools, differing only in connectivity:
//
//   plain     conv-relu x3, pool, conv-relu x3, pool, dense
//   residual  conv-relu, residual(2 convs), pool, conv-relu, residual(2 convs), pool, dense
//   dense     conv-relu, dense_block(2 convs), 1x1 transition conv-relu, pool,
//             dense_block(2 convs), pool, dense
//
// `width` is the stem channel count (8 at desk scale; 2 gives a model small
// enough for exhaustive gradient checks). Inputs must be at least 16x16.
inline constexpr std::size_t default_width = 8;

ModelConfig plain_cnn(const InputShape& input, std::size_t classes, std::uint64_t seed,
                      std::size_t width = default_width);
ModelConfig residual_cnn(const InputShape& input, std::size_t classes, std::uint64_t seed,
                         std::size_t width = default_width);
ModelConfig dense_cnn(const InputShape& input, std::size_t classes, std::uint64_t seed,
                      std::size_t width = default_width);

// Names accepted by zoo_config: "plain", "residual", "dense".
const std::vector<std::string>& zoo_names();
ModelConfig zoo_config(std::string_view name, const InputShape& input, std::size_t classes, std::uint64_t seed,
                       std::size_t width = default_width);

} // namespace gcnl

#endif // GCNL_ZOO_HPP

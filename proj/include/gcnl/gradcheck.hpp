#ifndef GCNL_GRADCHECK_HPP
#define GCNL_GRADCHECK_HPP

#include "gcnl/loss.hpp"
#include "gcnl/model.hpp"
#include "gcnl/model_config.hpp"

#include <cstddef>
#include <functional>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gcnl {

inline constexpr std::size_t grad_check_parameter_limit = 50'000;
inline constexpr double max_kink_fraction = 0.05;

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::string worst_parameter; // "<name>[<flat index>]"
    std::size_t checked = 0;
    std::size_t skipped_at_kinks = 0;
    double tolerance = 0.0;
    bool pass = false;
};

// Lets tests tamper with the analytic gradients before comparison.
using GradientHook = std::function<void(std::vector<Tensor>&)>;

// Compares every analytic parameter gradient of the fused softmax + focal
// loss against (L(p + eps) - L(p - eps)) / (2 eps). Relative error is
// |a - n| / max(|a|, |n|, 1e-8). Refuses models with more than
// grad_check_parameter_limit scalar parameters.
//
// The central difference is meaningless when p +- eps lands on the other
// side of a ReLU or max-pool switch point, so an element whose perturbed
// passes change any ReLU sign or pool argmax is counted in
// skipped_at_kinks instead of being compared. pass requires the error
// bound and at most max_kink_fraction of the elements skipped.
GradCheckReport grad_check(const Model& model, const Tensor& x, const std::vector<std::size_t>& labels,
                           const FocalConfig& loss, double eps = 1e-5, double tol = 1e-4,
                           const GradientHook& hook = {});

double relative_error(double analytic, double numeric);

// Small enough that checking every parameter takes well under a second.
struct TinyScale {
    InputShape input{1, 16, 16};
    std::size_t classes = 3;
    std::size_t width = 2;
    std::size_t batch = 2;
};

// Builds the named zoo model at tiny scale with a seeded uniform batch and
// seeded labels, then runs grad_check on it.
GradCheckReport grad_check_zoo(std::string_view name, const FocalConfig& loss, std::uint64_t seed,
                               const TinyScale& scale = {});

} // namespace gcnl

#endif // GCNL_GRADCHECK_HPP

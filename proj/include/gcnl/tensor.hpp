#ifndef GCNL_TENSOR_HPP
#define GCNL_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace gcnl {

using Shape = std::vector<std::size_t>;

std::size_t element_count(const Shape& shape);
std::string to_string(const Shape& shape);

namespace fill {
struct Zeros {};
struct Ones {};
struct Constant {
    double value;
};
struct SeededUniform {
    double lo;
    double hi;
    std::uint64_t seed;
};
} // namespace fill

using FillRule = std::variant<fill::Zeros, fill::Ones, fill::Constant, fill::SeededUniform>;

// Dense row-major array of doubles. A Tensor is a value: once constructed
// its shape and contents never change, and every operation below returns a
// new Tensor. Construction rejects empty shapes, zero dimensions and
// non-finite elements.
class Tensor {
public:
    Tensor(Shape shape, std::vector<double> data);
    Tensor(Shape shape, FillRule rule);

    static Tensor zeros(Shape shape) { return Tensor(std::move(shape), fill::Zeros{}); }
    static Tensor ones(Shape shape) { return Tensor(std::move(shape), fill::Ones{}); }
    static Tensor constant(Shape shape, double c) { return Tensor(std::move(shape), fill::Constant{c}); }
    static Tensor uniform(Shape shape, double lo, double hi, std::uint64_t seed) {
        return Tensor(std::move(shape), fill::SeededUniform{lo, hi, seed});
    }
    static Tensor scalar(double value) { return Tensor({1}, std::vector<double>{value}); }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const double> data() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }
    double operator[](std::size_t flat) const noexcept { return data_[flat]; }
    double at(std::initializer_list<std::size_t> index) const;

    friend bool operator==(const Tensor& a, const Tensor& b) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

enum class ElementwiseOp { add, sub, mul };

Tensor elementwise(ElementwiseOp op, const Tensor& a, const Tensor& b);
Tensor elementwise(ElementwiseOp op, const Tensor& a, double b);

inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(ElementwiseOp::add, a, b); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(ElementwiseOp::sub, a, b); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(ElementwiseOp::mul, a, b); }
inline Tensor mul(const Tensor& a, double b) { return elementwise(ElementwiseOp::mul, a, b); }

// Row-major i-k-j accumulation; the summation order is fixed so results
// are reproducible bit for bit.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor reshape(const Tensor& a, Shape new_shape);

double sum(const Tensor& a);

// Throws NumericError naming `what` if any element is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

} // namespace gcnl

#endif // GCNL_TENSOR_HPP

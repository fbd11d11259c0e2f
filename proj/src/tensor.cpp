#include "gcnl/tensor.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/random.hpp"

#include <cmath>
#include <sstream>

namespace gcnl {

namespace {

void validate_shape(const Shape& shape)
{
    if (shape.empty()) {
        throw InvalidShapeError("tensor shape must have at least one dimension");
    }
    for (const auto d : shape) {
        if (d == 0) {
            throw InvalidShapeError("tensor dimensions must be positive, got " + to_string(shape));
        }
    }
}

std::vector<double> make_fill(const Shape& shape, const FillRule& rule)
{
    validate_shape(shape);
    const std::size_t n = element_count(shape);
    return std::visit(
        [n](const auto& r) -> std::vector<double> {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, fill::Zeros>) {
                return std::vector<double>(n, 0.0);
            } else if constexpr (std::is_same_v<R, fill::Ones>) {
                return std::vector<double>(n, 1.0);
            } else if constexpr (std::is_same_v<R, fill::Constant>) {
                return std::vector<double>(n, r.value);
            } else {
                if (!(r.lo <= r.hi)) {
                    throw ShapeError("seeded-uniform fill requires lo <= hi");
                }
                Rng rng(r.seed);
                std::vector<double> out(n);
                for (auto& v : out) {
                    v = rng.uniform(r.lo, r.hi);
                }
                return out;
            }
        },
        rule);
}

} // namespace

std::size_t element_count(const Shape& shape)
{
    std::size_t n = 1;
    for (const auto d : shape) {
        n *= d;
    }
    return n;
}

std::string to_string(const Shape& shape)
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        os << (i ? "," : "") << shape[i];
    }
    os << ']';
    return os.str();
}

void require_finite(std::span<const double> values, const char* what)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw NumericError(std::string(what) + " contains a non-finite value at element " +
                               std::to_string(i));
        }
    }
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data))
{
    validate_shape(shape_);
    if (data_.size() != element_count(shape_)) {
        throw InvalidShapeError("tensor of shape " + to_string(shape_) + " needs " +
                                std::to_string(element_count(shape_)) + " elements, got " +
                                std::to_string(data_.size()));
    }
    require_finite(data_, "tensor");
}

Tensor::Tensor(Shape shape, FillRule rule) : Tensor(shape, make_fill(shape, rule)) {}

std::size_t Tensor::dim(std::size_t axis) const
{
    if (axis >= shape_.size()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + to_string(shape_));
    }
    return shape_[axis];
}

double Tensor::at(std::initializer_list<std::size_t> index) const
{
    if (index.size() != shape_.size()) {
        throw ShapeError("index rank does not match tensor rank");
    }
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (const auto i : index) {
        if (i >= shape_[axis]) {
            throw ShapeError("index out of range for shape " + to_string(shape_));
        }
        flat = flat * shape_[axis] + i;
        ++axis;
    }
    return data_[flat];
}

namespace {

double apply(ElementwiseOp op, double a, double b)
{
    switch (op) {
    case ElementwiseOp::add:
        return a + b;
    case ElementwiseOp::sub:
        return a - b;
    case ElementwiseOp::mul:
        return a * b;
    }
    return 0.0;
}

} // namespace

Tensor elementwise(ElementwiseOp op, const Tensor& a, const Tensor& b)
{
    if (b.shape() == Shape{1} && a.shape() != Shape{1}) {
        return elementwise(op, a, b[0]);
    }
    if (a.shape() != b.shape()) {
        throw ShapeError("elementwise shapes differ: " + to_string(a.shape()) + " vs " + to_string(b.shape()));
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = apply(op, a[i], b[i]);
    }
    return Tensor(a.shape(), std::move(out));
}

Tensor elementwise(ElementwiseOp op, const Tensor& a, double b)
{
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = apply(op, a[i], b);
    }
    return Tensor(a.shape(), std::move(out));
}

Tensor matmul(const Tensor& a, const Tensor& b)
{
    if (a.rank() != 2 || b.rank() != 2) {
        throw ShapeError("matmul needs 2-D operands, got " + to_string(a.shape()) + " and " + to_string(b.shape()));
    }
    const std::size_t m = a.dim(0);
    const std::size_t k = a.dim(1);
    const std::size_t n = b.dim(1);
    if (b.dim(0) != k) {
        throw ShapeError("matmul inner dimensions differ: " + to_string(a.shape()) + " x " + to_string(b.shape()));
    }
    std::vector<double> out(m * n, 0.0);
    const auto ad = a.data();
    const auto bd = b.data();
    for (std::size_t i = 0; i < m; ++i) {
        double* row = out.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = ad[i * k + p];
            const double* brow = bd.data() + p * n;
            for (std::size_t j = 0; j < n; ++j) {
                row[j] += aip * brow[j];
            }
        }
    }
    return Tensor({m, n}, std::move(out));
}

Tensor reshape(const Tensor& a, Shape new_shape)
{
    validate_shape(new_shape);
    if (element_count(new_shape) != a.size()) {
        throw ShapeError("cannot reshape " + to_string(a.shape()) + " to " + to_string(new_shape));
    }
    return Tensor(std::move(new_shape), a.values());
}

double sum(const Tensor& a)
{
    double s = 0.0;
    for (const double v : a.data()) {
        s += v;
    }
    return s;
}

} // namespace gcnl

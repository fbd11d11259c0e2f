#include <gtest/gtest.h>

#include "gcnl/errors.hpp"
#include "gcnl/random.hpp"
#include "gcnl/tensor.hpp"

#include <cmath>
#include <limits>

using gcnl::Tensor;

TEST(Tensor, ZerosAndOnes)
{
    const Tensor z = Tensor::zeros({2, 2});
    EXPECT_EQ(z.shape(), (gcnl::Shape{2, 2}));
    EXPECT_EQ(z.values(), (std::vector<double>{0, 0, 0, 0}));
    EXPECT_EQ(Tensor::ones({3}).values(), (std::vector<double>{1, 1, 1}));
    EXPECT_EQ(Tensor::constant({2}, 2.5).values(), (std::vector<double>{2.5, 2.5}));
}

TEST(Tensor, SeededUniformIsReproducible)
{
    const Tensor a = Tensor::uniform({2}, 0.0, 1.0, 42);
    const Tensor b = Tensor::uniform({2}, 0.0, 1.0, 42);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, Tensor::uniform({2}, 0.0, 1.0, 43));
    const Tensor big = Tensor::uniform({1000}, -2.0, 3.0, 7);
    for (const double v : big.data()) {
        EXPECT_GE(v, -2.0);
        EXPECT_LT(v, 3.0);
    }
}

TEST(Tensor, RejectsBadShapes)
{
    EXPECT_THROW(Tensor::zeros({}), gcnl::InvalidShapeError);
    EXPECT_THROW(Tensor::zeros({2, 0}), gcnl::InvalidShapeError);
    EXPECT_THROW(Tensor({3}, std::vector<double>{1, 2}), gcnl::InvalidShapeError);
}

TEST(Tensor, RejectsNonFinite)
{
    EXPECT_THROW(Tensor({1}, std::vector<double>{std::numeric_limits<double>::quiet_NaN()}), gcnl::NumericError);
    EXPECT_THROW(Tensor({1}, std::vector<double>{std::numeric_limits<double>::infinity()}), gcnl::NumericError);
}

TEST(Tensor, ScalarIsShapeOne)
{
    const Tensor s = Tensor::scalar(3.0);
    EXPECT_EQ(s.shape(), (gcnl::Shape{1}));
    EXPECT_EQ(s[0], 3.0);
}

TEST(Tensor, AtIsRowMajor)
{
    const Tensor t({2, 3}, std::vector<double>{0, 1, 2, 3, 4, 5});
    EXPECT_EQ(t.at({1, 2}), 5.0);
    EXPECT_EQ(t.at({0, 1}), 1.0);
    EXPECT_THROW((void)t.at({2, 0}), gcnl::ShapeError);
    EXPECT_THROW((void)t.at({0}), gcnl::ShapeError);
}

TEST(Elementwise, AddSubMul)
{
    const Tensor a({2}, std::vector<double>{1, 2});
    const Tensor b({2}, std::vector<double>{3, 4});
    EXPECT_EQ(gcnl::add(a, b).values(), (std::vector<double>{4, 6}));
    EXPECT_EQ(gcnl::sub(a, a), Tensor::zeros({2}));
    EXPECT_EQ(gcnl::mul(a, 0.0), Tensor::zeros({2}));
    EXPECT_EQ(gcnl::mul(a, b).values(), (std::vector<double>{3, 8}));
    EXPECT_EQ(gcnl::elementwise(gcnl::ElementwiseOp::sub, a, 1.0).values(), (std::vector<double>{0, 1}));
}

TEST(Elementwise, ShapeMismatch)
{
    EXPECT_THROW(gcnl::add(Tensor::zeros({2}), Tensor::zeros({3})), gcnl::ShapeError);
    EXPECT_THROW(gcnl::add(Tensor::zeros({2, 1}), Tensor::zeros({1, 2})), gcnl::ShapeError);
}

TEST(Elementwise, OverflowIsReported)
{
    const Tensor big = Tensor::constant({1}, 1e308);
    EXPECT_THROW(gcnl::mul(big, 10.0), gcnl::NumericError);
}

TEST(Matmul, KnownProducts)
{
    const Tensor a({2, 2}, std::vector<double>{1, 2, 3, 4});
    const Tensor b({2, 2}, std::vector<double>{5, 6, 7, 8});
    const Tensor eye({2, 2}, std::vector<double>{1, 0, 0, 1});
    EXPECT_EQ(gcnl::matmul(eye, b), b);
    EXPECT_EQ(gcnl::matmul(a, b).values(), (std::vector<double>{19, 22, 43, 50}));
    EXPECT_EQ(gcnl::matmul(a, Tensor::zeros({2, 3})), Tensor::zeros({2, 3}));
}

TEST(Matmul, ShapeErrors)
{
    EXPECT_THROW(gcnl::matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), gcnl::ShapeError);
    EXPECT_THROW(gcnl::matmul(Tensor::zeros({6}), Tensor::zeros({6, 1})), gcnl::ShapeError);
}

namespace {

std::vector<double> triple_loop(const Tensor& a, const Tensor& b)
{
    const std::size_t m = a.dim(0);
    const std::size_t k = a.dim(1);
    const std::size_t n = b.dim(1);
    std::vector<double> c(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t p = 0; p < k; ++p) {
                s += a[i * k + p] * b[p * n + j];
            }
            c[i * n + j] = s;
        }
    }
    return c;
}

} // namespace

TEST(Matmul, MatchesTripleLoopExactlyOnIntegers)
{
    gcnl::Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + rng.below(16);
        const std::size_t k = 1 + rng.below(16);
        const std::size_t n = 1 + rng.below(16);
        std::vector<double> av(m * k);
        std::vector<double> bv(k * n);
        for (auto& v : av) {
            v = static_cast<double>(static_cast<int>(rng.below(21)) - 10);
        }
        for (auto& v : bv) {
            v = static_cast<double>(static_cast<int>(rng.below(21)) - 10);
        }
        const Tensor a({m, k}, av);
        const Tensor b({k, n}, bv);
        EXPECT_EQ(gcnl::matmul(a, b).values(), triple_loop(a, b));
    }
}

TEST(Matmul, MatchesTripleLoopOnReals)
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const std::size_t m = 64;
        const std::size_t k = 48;
        const std::size_t n = 64;
        const Tensor a = Tensor::uniform({m, k}, -1.0, 1.0, seed);
        const Tensor b = Tensor::uniform({k, n}, -1.0, 1.0, seed + 100);
        const auto got = gcnl::matmul(a, b);
        const auto want = triple_loop(a, b);
        for (std::size_t i = 0; i < want.size(); ++i) {
            EXPECT_LE(std::abs(got[i] - want[i]), 1e-12 * std::max(1.0, std::abs(want[i])));
        }
    }
}

TEST(Matmul, IdentityIsExact)
{
    const Tensor a = Tensor::uniform({5, 7}, -1.0, 1.0, 3);
    std::vector<double> eye(49, 0.0);
    for (std::size_t i = 0; i < 7; ++i) {
        eye[i * 7 + i] = 1.0;
    }
    EXPECT_EQ(gcnl::matmul(a, Tensor({7, 7}, eye)), a);
}

TEST(Reshape, RowMajorAndRoundTrip)
{
    const Tensor a({2, 2}, std::vector<double>{1, 2, 3, 4});
    EXPECT_EQ(gcnl::reshape(a, {4}).values(), (std::vector<double>{1, 2, 3, 4}));
    const Tensor b = Tensor::uniform({2, 3}, 0.0, 1.0, 5);
    EXPECT_EQ(gcnl::reshape(gcnl::reshape(b, {6}), {2, 3}), b);
    EXPECT_THROW(gcnl::reshape(Tensor::zeros({4}), {3}), gcnl::ShapeError);
}

TEST(Tensor, OperationsDoNotMutateInputs)
{
    const Tensor a = Tensor::uniform({3, 3}, -1.0, 1.0, 9);
    const Tensor b = Tensor::uniform({3, 3}, -1.0, 1.0, 10);
    const Tensor a0 = a;
    const Tensor b0 = b;
    (void)gcnl::add(a, b);
    (void)gcnl::matmul(a, b);
    (void)gcnl::reshape(a, {9});
    EXPECT_EQ(a, a0);
    EXPECT_EQ(b, b0);
}

TEST(Rng, DeriveSeedSeparatesStreams)
{
    EXPECT_NE(gcnl::derive_seed(1, 0), gcnl::derive_seed(1, 1));
    EXPECT_NE(gcnl::derive_seed(1, 0), gcnl::derive_seed(2, 0));
    EXPECT_EQ(gcnl::derive_seed(5, 3), gcnl::derive_seed(5, 3));
}

TEST(Rng, PermutationIsAPermutation)
{
    gcnl::Rng rng(3);
    auto p = rng.permutation(50);
    std::sort(p.begin(), p.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
        EXPECT_EQ(p[i], i);
    }
}

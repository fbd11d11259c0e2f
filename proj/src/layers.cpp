#include "gcnl/layers.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/random.hpp"

#include <algorithm>
#include <cmath>

namespace gcnl {

namespace {

struct ConvGeometry {
    std::size_t batch, in_ch, height, width;
    std::size_t out_ch, kh, kw;
    std::size_t out_h, out_w;
    std::size_t stride, pad;

    std::size_t patch() const { return in_ch * kh * kw; }
    std::size_t positions() const { return out_h * out_w; }
};

ConvGeometry conv_geometry(const Tensor& x, const ConvParams& p)
{
    if (x.rank() != 4) {
        throw ShapeError("conv2d input must be [batch, channels, H, W], got " + to_string(x.shape()));
    }
    if (p.weights.rank() != 4) {
        throw ShapeError("conv2d weights must be [out, in, kh, kw], got " + to_string(p.weights.shape()));
    }
    if (p.stride < 1) {
        throw ShapeError("conv2d stride must be >= 1");
    }
    ConvGeometry g{};
    g.batch = x.dim(0);
    g.in_ch = x.dim(1);
    g.height = x.dim(2);
    g.width = x.dim(3);
    g.out_ch = p.weights.dim(0);
    g.kh = p.weights.dim(2);
    g.kw = p.weights.dim(3);
    g.stride = p.stride;
    g.pad = p.padding;
    if (p.weights.dim(1) != g.in_ch) {
        throw ShapeError("conv2d channel mismatch: input has " + std::to_string(g.in_ch) + ", weights expect " +
                         std::to_string(p.weights.dim(1)));
    }
    if (p.bias.shape() != Shape{g.out_ch}) {
        throw ShapeError("conv2d bias must be [" + std::to_string(g.out_ch) + "], got " + to_string(p.bias.shape()));
    }
    g.out_h = conv_output_size(g.height, g.kh, g.stride, g.pad);
    g.out_w = conv_output_size(g.width, g.kw, g.stride, g.pad);
    return g;
}

// Lowers one sample [in_ch, H, W] into a [patch, positions] column matrix.
void im2col(const double* src, const ConvGeometry& g, double* cols)
{
    const auto pad = static_cast<std::ptrdiff_t>(g.pad);
    const auto h = static_cast<std::ptrdiff_t>(g.height);
    const auto w = static_cast<std::ptrdiff_t>(g.width);
    std::size_t row = 0;
    for (std::size_t c = 0; c < g.in_ch; ++c) {
        const double* plane = src + c * g.height * g.width;
        for (std::size_t ky = 0; ky < g.kh; ++ky) {
            for (std::size_t kx = 0; kx < g.kw; ++kx, ++row) {
                double* out = cols + row * g.positions();
                for (std::size_t oy = 0; oy < g.out_h; ++oy) {
                    const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - pad;
                    for (std::size_t ox = 0; ox < g.out_w; ++ox) {
                        const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - pad;
                        out[oy * g.out_w + ox] =
                            (iy >= 0 && iy < h && ix >= 0 && ix < w) ? plane[iy * w + ix] : 0.0;
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: accumulates column gradients back into [in_ch, H, W].
void col2im(const double* cols, const ConvGeometry& g, double* dst)
{
    const auto pad = static_cast<std::ptrdiff_t>(g.pad);
    const auto h = static_cast<std::ptrdiff_t>(g.height);
    const auto w = static_cast<std::ptrdiff_t>(g.width);
    std::size_t row = 0;
    for (std::size_t c = 0; c < g.in_ch; ++c) {
        double* plane = dst + c * g.height * g.width;
        for (std::size_t ky = 0; ky < g.kh; ++ky) {
            for (std::size_t kx = 0; kx < g.kw; ++kx, ++row) {
                const double* in = cols + row * g.positions();
                for (std::size_t oy = 0; oy < g.out_h; ++oy) {
                    const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - pad;
                    if (iy < 0 || iy >= h) {
                        continue;
                    }
                    for (std::size_t ox = 0; ox < g.out_w; ++ox) {
                        const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - pad;
                        if (ix >= 0 && ix < w) {
                            plane[iy * w + ix] += in[oy * g.out_w + ox];
                        }
                    }
                }
            }
        }
    }
}

void require_same_shape(const Tensor& a, const Shape& expected, const char* what)
{
    if (a.shape() != expected) {
        throw ShapeError(std::string(what) + " has shape " + to_string(a.shape()) + ", expected " +
                         to_string(expected));
    }
}

} // namespace

std::size_t conv_output_size(std::size_t in, std::size_t kernel, std::size_t stride, std::size_t padding)
{
    if (stride < 1 || kernel < 1) {
        throw ShapeError("kernel and stride must be >= 1");
    }
    if (in + 2 * padding < kernel) {
        throw ShapeError("window " + std::to_string(kernel) + " larger than padded input " +
                         std::to_string(in + 2 * padding));
    }
    return (in + 2 * padding - kernel) / stride + 1;
}

Tensor conv2d_forward(const Tensor& x, const ConvParams& p)
{
    const ConvGeometry g = conv_geometry(x, p);
    const std::size_t patch = g.patch();
    const std::size_t positions = g.positions();
    std::vector<double> cols(patch * positions);
    std::vector<double> out(g.batch * g.out_ch * positions);
    const double* w = p.weights.data().data();
    const double* b = p.bias.data().data();
    const std::size_t in_stride = g.in_ch * g.height * g.width;

    for (std::size_t n = 0; n < g.batch; ++n) {
        im2col(x.data().data() + n * in_stride, g, cols.data());
        double* dst = out.data() + n * g.out_ch * positions;
        for (std::size_t oc = 0; oc < g.out_ch; ++oc) {
            double* row = dst + oc * positions;
            std::fill(row, row + positions, b[oc]);
            const double* wrow = w + oc * patch;
            for (std::size_t k = 0; k < patch; ++k) {
                const double wk = wrow[k];
                const double* col = cols.data() + k * positions;
                for (std::size_t q = 0; q < positions; ++q) {
                    row[q] += wk * col[q];
                }
            }
        }
    }
    return Tensor({g.batch, g.out_ch, g.out_h, g.out_w}, std::move(out));
}

ConvGrads conv2d_backward(const Tensor& x, const ConvParams& p, const Tensor& grad_out)
{
    const ConvGeometry g = conv_geometry(x, p);
    require_same_shape(grad_out, {g.batch, g.out_ch, g.out_h, g.out_w}, "conv2d grad_out");
    const std::size_t patch = g.patch();
    const std::size_t positions = g.positions();
    const std::size_t in_stride = g.in_ch * g.height * g.width;

    std::vector<double> cols(patch * positions);
    std::vector<double> grad_cols(patch * positions);
    std::vector<double> gx(x.size(), 0.0);
    std::vector<double> gw(p.weights.size(), 0.0);
    std::vector<double> gb(g.out_ch, 0.0);
    const double* w = p.weights.data().data();

    for (std::size_t n = 0; n < g.batch; ++n) {
        im2col(x.data().data() + n * in_stride, g, cols.data());
        const double* go = grad_out.data().data() + n * g.out_ch * positions;
        std::fill(grad_cols.begin(), grad_cols.end(), 0.0);
        for (std::size_t oc = 0; oc < g.out_ch; ++oc) {
            const double* grow = go + oc * positions;
            double bsum = 0.0;
            for (std::size_t q = 0; q < positions; ++q) {
                bsum += grow[q];
            }
            gb[oc] += bsum;
            double* gwrow = gw.data() + oc * patch;
            const double* wrow = w + oc * patch;
            for (std::size_t k = 0; k < patch; ++k) {
                const double* col = cols.data() + k * positions;
                double acc = 0.0;
                for (std::size_t q = 0; q < positions; ++q) {
                    acc += grow[q] * col[q];
                }
                gwrow[k] += acc;
                const double wk = wrow[k];
                double* gcol = grad_cols.data() + k * positions;
                for (std::size_t q = 0; q < positions; ++q) {
                    gcol[q] += wk * grow[q];
                }
            }
        }
        col2im(grad_cols.data(), g, gx.data() + n * in_stride);
    }
    return {Tensor(x.shape(), std::move(gx)), Tensor(p.weights.shape(), std::move(gw)),
            Tensor(p.bias.shape(), std::move(gb))};
}

Tensor relu_forward(const Tensor& x)
{
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = x[i] > 0.0 ? x[i] : 0.0;
    }
    return Tensor(x.shape(), std::move(out));
}

Tensor relu_backward(const Tensor& x, const Tensor& grad_out)
{
    require_same_shape(grad_out, x.shape(), "relu grad_out");
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = x[i] > 0.0 ? grad_out[i] : 0.0;
    }
    return Tensor(x.shape(), std::move(out));
}

PoolResult pool_forward(const Tensor& x, const PoolSpec& s)
{
    if (x.rank() != 4) {
        throw ShapeError("pool input must be [batch, channels, H, W], got " + to_string(x.shape()));
    }
    if (s.window < 1 || s.stride < 1) {
        throw ShapeError("pool window and stride must be >= 1");
    }
    const std::size_t planes = x.dim(0) * x.dim(1);
    const std::size_t h = x.dim(2);
    const std::size_t w = x.dim(3);
    const std::size_t oh = conv_output_size(h, s.window, s.stride, 0);
    const std::size_t ow = conv_output_size(w, s.window, s.stride, 0);

    PoolRecord record{s, x.shape(), {x.dim(0), x.dim(1), oh, ow}, {}};
    std::vector<double> out(planes * oh * ow);
    if (s.kind == PoolKind::max) {
        record.argmax.resize(out.size());
    }
    const double inv_area = 1.0 / static_cast<double>(s.window * s.window);
    const double* src = x.data().data();

    for (std::size_t pl = 0; pl < planes; ++pl) {
        const std::size_t base = pl * h * w;
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                const std::size_t o = (pl * oh + oy) * ow + ox;
                const std::size_t y0 = oy * s.stride;
                const std::size_t x0 = ox * s.stride;
                if (s.kind == PoolKind::max) {
                    std::size_t best = base + y0 * w + x0;
                    for (std::size_t ky = 0; ky < s.window; ++ky) {
                        for (std::size_t kx = 0; kx < s.window; ++kx) {
                            const std::size_t idx = base + (y0 + ky) * w + x0 + kx;
                            if (src[idx] > src[best]) {
                                best = idx;
                            }
                        }
                    }
                    record.argmax[o] = best;
                    out[o] = src[best];
                } else {
                    double acc = 0.0;
                    for (std::size_t ky = 0; ky < s.window; ++ky) {
                        for (std::size_t kx = 0; kx < s.window; ++kx) {
                            acc += src[base + (y0 + ky) * w + x0 + kx];
                        }
                    }
                    out[o] = acc * inv_area;
                }
            }
        }
    }
    Shape out_shape = record.output_shape;
    return {Tensor(std::move(out_shape), std::move(out)), std::move(record)};
}

Tensor pool_backward(const PoolRecord& record, const Tensor& grad_out)
{
    require_same_shape(grad_out, record.output_shape, "pool grad_out");
    std::vector<double> gx(element_count(record.input_shape), 0.0);
    const double* go = grad_out.data().data();
    if (record.spec.kind == PoolKind::max) {
        for (std::size_t o = 0; o < grad_out.size(); ++o) {
            gx[record.argmax[o]] += go[o];
        }
        return Tensor(record.input_shape, std::move(gx));
    }

    const std::size_t planes = record.input_shape[0] * record.input_shape[1];
    const std::size_t w = record.input_shape[3];
    const std::size_t h = record.input_shape[2];
    const std::size_t oh = record.output_shape[2];
    const std::size_t ow = record.output_shape[3];
    const std::size_t win = record.spec.window;
    const double inv_area = 1.0 / static_cast<double>(win * win);
    for (std::size_t pl = 0; pl < planes; ++pl) {
        for (std::size_t oy = 0; oy < oh; ++oy) {
            for (std::size_t ox = 0; ox < ow; ++ox) {
                const double share = go[(pl * oh + oy) * ow + ox] * inv_area;
                const std::size_t y0 = oy * record.spec.stride;
                const std::size_t x0 = ox * record.spec.stride;
                for (std::size_t ky = 0; ky < win; ++ky) {
                    for (std::size_t kx = 0; kx < win; ++kx) {
                        gx[pl * h * w + (y0 + ky) * w + x0 + kx] += share;
                    }
                }
            }
        }
    }
    return Tensor(record.input_shape, std::move(gx));
}

Tensor dense_forward(const Tensor& f, const DenseParams& p)
{
    if (f.rank() != 2 || p.weights.rank() != 2) {
        throw ShapeError("dense expects 2-D input and weights, got " + to_string(f.shape()) + " and " +
                         to_string(p.weights.shape()));
    }
    const std::size_t batch = f.dim(0);
    const std::size_t in = f.dim(1);
    const std::size_t out = p.weights.dim(0);
    if (p.weights.dim(1) != in) {
        throw ShapeError("dense expects " + std::to_string(p.weights.dim(1)) + " input features, got " +
                         std::to_string(in));
    }
    require_same_shape(p.bias, {out}, "dense bias");
    std::vector<double> z(batch * out);
    const double* fd = f.data().data();
    const double* wd = p.weights.data().data();
    for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t o = 0; o < out; ++o) {
            double acc = 0.0;
            const double* wrow = wd + o * in;
            const double* frow = fd + n * in;
            for (std::size_t i = 0; i < in; ++i) {
                acc += frow[i] * wrow[i];
            }
            z[n * out + o] = acc + p.bias[o];
        }
    }
    return Tensor({batch, out}, std::move(z));
}

DenseGrads dense_backward(const Tensor& f, const DenseParams& p, const Tensor& grad_out)
{
    if (f.rank() != 2 || p.weights.rank() != 2 || p.weights.dim(1) != f.dim(1)) {
        throw ShapeError("dense_backward shape mismatch between input " + to_string(f.shape()) + " and weights " +
                         to_string(p.weights.shape()));
    }
    const std::size_t batch = f.dim(0);
    const std::size_t in = f.dim(1);
    const std::size_t out = p.weights.dim(0);
    require_same_shape(grad_out, {batch, out}, "dense grad_out");

    std::vector<double> gf(batch * in, 0.0);
    std::vector<double> gw(out * in, 0.0);
    std::vector<double> gb(out, 0.0);
    const double* fd = f.data().data();
    const double* wd = p.weights.data().data();
    const double* go = grad_out.data().data();
    for (std::size_t n = 0; n < batch; ++n) {
        for (std::size_t o = 0; o < out; ++o) {
            const double g = go[n * out + o];
            gb[o] += g;
            double* gwrow = gw.data() + o * in;
            const double* wrow = wd + o * in;
            const double* frow = fd + n * in;
            double* gfrow = gf.data() + n * in;
            for (std::size_t i = 0; i < in; ++i) {
                gwrow[i] += g * frow[i];
                gfrow[i] += g * wrow[i];
            }
        }
    }
    return {Tensor(f.shape(), std::move(gf)), Tensor(p.weights.shape(), std::move(gw)),
            Tensor(p.bias.shape(), std::move(gb))};
}

Tensor softmax(const Tensor& z)
{
    if (z.rank() != 2 || z.dim(1) < 2) {
        throw ShapeError("softmax expects [batch, C] with C >= 2, got " + to_string(z.shape()));
    }
    const std::size_t batch = z.dim(0);
    const std::size_t c = z.dim(1);
    std::vector<double> p(z.size());
    for (std::size_t n = 0; n < batch; ++n) {
        const double* row = z.data().data() + n * c;
        double* out = p.data() + n * c;
        const double m = *std::max_element(row, row + c);
        double total = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            out[j] = std::exp(row[j] - m);
            total += out[j];
        }
        for (std::size_t j = 0; j < c; ++j) {
            out[j] /= total;
        }
    }
    return Tensor(z.shape(), std::move(p));
}

Tensor concat_channels(const Tensor& a, const Tensor& b)
{
    if (a.rank() != 4 || b.rank() != 4 || a.dim(0) != b.dim(0) || a.dim(2) != b.dim(2) || a.dim(3) != b.dim(3)) {
        throw ShapeError("cannot concatenate channels of " + to_string(a.shape()) + " and " + to_string(b.shape()));
    }
    const std::size_t batch = a.dim(0);
    const std::size_t plane = a.dim(2) * a.dim(3);
    const std::size_t ca = a.dim(1) * plane;
    const std::size_t cb = b.dim(1) * plane;
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    for (std::size_t n = 0; n < batch; ++n) {
        out.insert(out.end(), a.data().begin() + n * ca, a.data().begin() + (n + 1) * ca);
        out.insert(out.end(), b.data().begin() + n * cb, b.data().begin() + (n + 1) * cb);
    }
    return Tensor({batch, a.dim(1) + b.dim(1), a.dim(2), a.dim(3)}, std::move(out));
}

ChannelSplit split_channels(const Tensor& x, std::size_t head_channels)
{
    if (x.rank() != 4 || head_channels == 0 || head_channels >= x.dim(1)) {
        throw ShapeError("cannot split " + to_string(x.shape()) + " after channel " + std::to_string(head_channels));
    }
    const std::size_t batch = x.dim(0);
    const std::size_t plane = x.dim(2) * x.dim(3);
    const std::size_t tail_channels = x.dim(1) - head_channels;
    std::vector<double> head;
    std::vector<double> tail;
    head.reserve(batch * head_channels * plane);
    tail.reserve(batch * tail_channels * plane);
    const std::size_t per = x.dim(1) * plane;
    for (std::size_t n = 0; n < batch; ++n) {
        auto begin = x.data().begin() + n * per;
        head.insert(head.end(), begin, begin + head_channels * plane);
        tail.insert(tail.end(), begin + head_channels * plane, begin + per);
    }
    return {Tensor({batch, head_channels, x.dim(2), x.dim(3)}, std::move(head)),
            Tensor({batch, tail_channels, x.dim(2), x.dim(3)}, std::move(tail))};
}

ConvParams he_conv(std::size_t in_channels, std::size_t out_channels, std::size_t kernel, std::size_t stride,
                   std::size_t padding, std::uint64_t seed)
{
    const std::size_t fan_in = in_channels * kernel * kernel;
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Rng rng(seed);
    std::vector<double> w(out_channels * fan_in);
    for (auto& v : w) {
        v = rng.normal(0.0, stddev);
    }
    return {Tensor({out_channels, in_channels, kernel, kernel}, std::move(w)), Tensor::zeros({out_channels}), stride,
            padding};
}

DenseParams he_dense(std::size_t in_features, std::size_t out_features, std::uint64_t seed)
{
    const double stddev = std::sqrt(2.0 / static_cast<double>(in_features));
    Rng rng(seed);
    std::vector<double> w(out_features * in_features);
    for (auto& v : w) {
        v = rng.normal(0.0, stddev);
    }
    return {Tensor({out_features, in_features}, std::move(w)), Tensor::zeros({out_features})};
}

} // namespace gcnl

#include "gcnl/image.hpp"

#include "gcnl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace gcnl {

ImageBuffer::ImageBuffer(std::size_t w, std::size_t h, std::size_t c, std::vector<std::uint8_t> px)
    : width(w), height(h), channels(c), pixels(std::move(px))
{
    if (w == 0 || h == 0) {
        throw InvalidShapeError("image dimensions must be positive");
    }
    if (c != 1 && c != 3) {
        throw InvalidShapeError("image must have 1 or 3 channels, got " + std::to_string(c));
    }
    if (pixels.size() != w * h * c) {
        throw InvalidShapeError("image of " + std::to_string(w) + "x" + std::to_string(h) + "x" + std::to_string(c) +
                                " needs " + std::to_string(w * h * c) + " bytes, got " +
                                std::to_string(pixels.size()));
    }
}

namespace {

bool is_space(std::uint8_t c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

class HeaderReader {
public:
    HeaderReader(std::span<const std::uint8_t> bytes, std::size_t start) : bytes_(bytes), pos_(start) {}

    std::size_t pos() const { return pos_; }

    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    std::size_t read_number(const char* what)
    {
        skip_space_and_comments();
        const std::size_t start = pos_;
        std::size_t value = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000) {
                throw DecodeError(std::string(what) + " is unreasonably large", start);
            }
            ++pos_;
        }
        if (pos_ == start) {
            throw DecodeError(std::string("expected ") + what, pos_);
        }
        return value;
    }

    void expect_single_space()
    {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            throw DecodeError("expected whitespace after maxval", pos_);
        }
        ++pos_;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

ImageBuffer decode_image(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
        throw DecodeError("not a binary PGM (P5) or PPM (P6) file", 0);
    }
    const std::size_t channels = bytes[1] == '5' ? 1 : 3;
    if (bytes.size() < 3 || !(is_space(bytes[2]) || bytes[2] == '#')) {
        throw DecodeError("expected whitespace after magic number", 2);
    }
    HeaderReader reader(bytes, 2);
    reader.skip_space_and_comments();
    const std::size_t width_at = reader.pos();
    const std::size_t width = reader.read_number("width");
    reader.skip_space_and_comments();
    const std::size_t height_at = reader.pos();
    const std::size_t height = reader.read_number("height");
    reader.skip_space_and_comments();
    const std::size_t maxval_at = reader.pos();
    const std::size_t maxval = reader.read_number("maxval");
    if (width == 0) {
        throw DecodeError("image width must be positive", width_at);
    }
    if (height == 0) {
        throw DecodeError("image height must be positive", height_at);
    }
    if (maxval != 255) {
        throw DecodeError("unsupported maxval " + std::to_string(maxval) + " (only 255)", maxval_at);
    }
    reader.expect_single_space();
    const std::size_t data_start = reader.pos();
    const std::size_t expected = width * height * channels;
    if (bytes.size() - data_start < expected) {
        throw DecodeError("truncated pixel data: need " + std::to_string(expected) + " bytes, have " +
                              std::to_string(bytes.size() - data_start),
                          bytes.size());
    }
    std::vector<std::uint8_t> px(bytes.begin() + static_cast<std::ptrdiff_t>(data_start),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(data_start + expected));
    return ImageBuffer(width, height, channels, std::move(px));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

ImageBuffer read_image(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    try {
        return decode_image(bytes);
    } catch (const DecodeError& e) {
        throw DecodeError(path.string() + ": " + e.what(), e.offset());
    }
}

std::vector<std::uint8_t> encode_image(const ImageBuffer& img)
{
    const std::string header = std::string(img.channels == 1 ? "P5" : "P6") + "\n" + std::to_string(img.width) +
                               " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
}

void write_image(const std::filesystem::path& path, const ImageBuffer& img)
{
    const auto bytes = encode_image(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ImageBuffer to_grayscale(const ImageBuffer& img)
{
    if (img.channels == 1) {
        return img;
    }
    std::vector<std::uint8_t> gray(img.width * img.height);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double y = 0.299 * img.pixels[3 * i] + 0.587 * img.pixels[3 * i + 1] + 0.114 * img.pixels[3 * i + 2];
        gray[i] = static_cast<std::uint8_t>(std::clamp(std::round(y), 0.0, 255.0));
    }
    return ImageBuffer(img.width, img.height, 1, std::move(gray));
}

namespace {

struct Tap {
    std::size_t lo, hi;
    double frac;
};

std::vector<Tap> taps(std::size_t src, std::size_t dst)
{
    const double scale = static_cast<double>(src) / static_cast<double>(dst);
    std::vector<Tap> out(dst);
    for (std::size_t i = 0; i < dst; ++i) {
        double s = (static_cast<double>(i) + 0.5) * scale - 0.5;
        s = std::clamp(s, 0.0, static_cast<double>(src - 1));
        const auto lo = static_cast<std::size_t>(std::floor(s));
        out[i] = {lo, std::min(lo + 1, src - 1), s - static_cast<double>(lo)};
    }
    return out;
}

} // namespace

ImageBuffer resize_bilinear(const ImageBuffer& img, std::size_t size)
{
    if (size == 0) {
        throw InvalidShapeError("resize target must be >= 1");
    }
    if (img.width == size && img.height == size) {
        return img;
    }
    const auto xs = taps(img.width, size);
    const auto ys = taps(img.height, size);
    const std::size_t c = img.channels;
    std::vector<std::uint8_t> out(size * size * c);
    const auto px = [&](std::size_t y, std::size_t x, std::size_t ch) {
        return static_cast<double>(img.pixels[(y * img.width + x) * c + ch]);
    };
    for (std::size_t oy = 0; oy < size; ++oy) {
        const Tap& ty = ys[oy];
        for (std::size_t ox = 0; ox < size; ++ox) {
            const Tap& tx = xs[ox];
            for (std::size_t ch = 0; ch < c; ++ch) {
                const double top = px(ty.lo, tx.lo, ch) * (1.0 - tx.frac) + px(ty.lo, tx.hi, ch) * tx.frac;
                const double bottom = px(ty.hi, tx.lo, ch) * (1.0 - tx.frac) + px(ty.hi, tx.hi, ch) * tx.frac;
                const double v = top * (1.0 - ty.frac) + bottom * ty.frac;
                out[(oy * size + ox) * c + ch] = static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
            }
        }
    }
    return ImageBuffer(size, size, c, std::move(out));
}

Tensor normalize(const ImageBuffer& gray)
{
    if (gray.channels != 1) {
        throw ShapeError("normalize expects a single-channel image");
    }
    std::vector<double> v(gray.pixels.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = static_cast<double>(gray.pixels[i]) / 255.0;
    }
    return Tensor({1, gray.height, gray.width}, std::move(v));
}

ImageBuffer denormalize(const Tensor& t)
{
    if (t.rank() != 3 || t.dim(0) != 1) {
        throw ShapeError("denormalize expects [1, H, W], got " + to_string(t.shape()));
    }
    std::vector<std::uint8_t> px(t.size());
    for (std::size_t i = 0; i < px.size(); ++i) {
        px[i] = static_cast<std::uint8_t>(std::clamp(std::round(t[i] * 255.0), 0.0, 255.0));
    }
    return ImageBuffer(t.dim(2), t.dim(1), 1, std::move(px));
}

Tensor preprocess(std::span<const std::uint8_t> bytes, std::size_t size)
{
    return normalize(resize_bilinear(to_grayscale(decode_image(bytes)), size));
}

} // namespace gcnl

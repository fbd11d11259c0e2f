#ifndef GCNL_IMAGE_HPP
#define GCNL_IMAGE_HPP

#include "gcnl/tensor.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace gcnl {

// 8-bit image, row-major with interleaved channels (1 = gray, 3 = RGB).
struct ImageBuffer {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;
    std::vector<std::uint8_t> pixels;

    ImageBuffer() = default;
    ImageBuffer(std::size_t w, std::size_t h, std::size_t c, std::vector<std::uint8_t> px);

    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

// Binary PGM (P5) or PPM (P6) with maxval 255. Throws DecodeError carrying
// the byte offset of the problem.
ImageBuffer decode_image(std::span<const std::uint8_t> bytes);
ImageBuffer read_image(const std::filesystem::path& path);

// P5 for one channel, P6 for three.
std::vector<std::uint8_t> encode_image(const ImageBuffer& img);
void write_image(const std::filesystem::path& path, const ImageBuffer& img);

// BT.601 luma: round(0.299 R + 0.587 G + 0.114 B).
ImageBuffer to_grayscale(const ImageBuffer& img);

// Pixel-center bilinear resampling to size x size.
ImageBuffer resize_bilinear(const ImageBuffer& img, std::size_t size);

// Gray image -> [1, H, W] tensor of pixel / 255.
Tensor normalize(const ImageBuffer& gray);
// Inverse of normalize up to quantization: round(v * 255), clamped.
ImageBuffer denormalize(const Tensor& t);

// decode -> grayscale -> resize -> normalize
Tensor preprocess(std::span<const std::uint8_t> bytes, std::size_t size);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

} // namespace gcnl

#endif // GCNL_IMAGE_HPP

#include "gcnl/synth.hpp"

#include "gcnl/errors.hpp"
#include "gcnl/random.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace gcnl {

namespace {

constexpr double stroke_half_width = 0.11;
constexpr double dot_radius = 0.13;
constexpr double max_shift = 0.10;
constexpr double max_rotation_deg = 10.0;
constexpr double min_brightness = 0.6;
constexpr double noise_sigma = 0.02;
constexpr double max_blobs = 8.0;

struct Point {
    double x, y;
};

double segment_distance(Point p, Point a, Point b)
{
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double ex = p.x - (a.x + t * dx);
    const double ey = p.y - (a.y + t * dy);
    return std::sqrt(ex * ex + ey * ey);
}

// Signed distance (negative inside) of a point in the shape's own frame,
// where the image spans [-1, 1] on both axes with y pointing down.
double shape_distance(const GestureClass& cls, Point p)
{
    switch (cls.kind) {
    case ShapeKind::bar: {
        const double a = cls.angle_deg * std::numbers::pi / 180.0;
        const Point d{0.62 * std::cos(a), -0.62 * std::sin(a)};
        return segment_distance(p, {-d.x, -d.y}, d) - stroke_half_width;
    }
    case ShapeKind::circle:
        return std::abs(std::sqrt(p.x * p.x + p.y * p.y) - 0.5) - stroke_half_width;
    case ShapeKind::cross:
        return std::min(segment_distance(p, {-0.6, 0.0}, {0.6, 0.0}), segment_distance(p, {0.0, -0.6}, {0.0, 0.6})) -
               stroke_half_width;
    case ShapeKind::vee:
        return std::min(segment_distance(p, {-0.5, -0.5}, {0.0, 0.55}), segment_distance(p, {0.0, 0.55}, {0.5, -0.5})) -
               stroke_half_width;
    case ShapeKind::dot_grid: {
        double best = 1e9;
        for (const double gy : {-0.5, 0.0, 0.5}) {
            for (const double gx : {-0.5, 0.0, 0.5}) {
                best = std::min(best, std::hypot(p.x - gx, p.y - gy));
            }
        }
        return best - dot_radius;
    }
    }
    return 1e9;
}

std::string format_angle(double deg)
{
    char buf[32];
    if (deg == std::floor(deg)) {
        std::snprintf(buf, sizeof(buf), "%.0f", deg);
    } else {
        std::snprintf(buf, sizeof(buf), "%g", deg);
    }
    return buf;
}

} // namespace

std::string GestureClass::name() const
{
    switch (kind) {
    case ShapeKind::bar:
        return "bar" + format_angle(angle_deg);
    case ShapeKind::circle:
        return "circle";
    case ShapeKind::cross:
        return "cross";
    case ShapeKind::vee:
        return "vee";
    case ShapeKind::dot_grid:
        return "dot-grid";
    }
    return "unknown";
}

GestureClass parse_gesture_class(std::string_view text)
{
    if (text == "circle") {
        return {ShapeKind::circle, 0.0};
    }
    if (text == "cross") {
        return {ShapeKind::cross, 0.0};
    }
    if (text == "vee") {
        return {ShapeKind::vee, 0.0};
    }
    if (text == "dot-grid") {
        return {ShapeKind::dot_grid, 0.0};
    }
    if (text.starts_with("bar:")) {
        const auto num = text.substr(4);
        double deg = 0.0;
        const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), deg);
        if (ec == std::errc{} && ptr == num.data() + num.size() && std::isfinite(deg)) {
            return {ShapeKind::bar, deg};
        }
    }
    throw ConfigError("unknown gesture class '" + std::string(text) +
                      "' (expected bar:<deg>, circle, cross, vee or dot-grid)");
}

double parse_clutter_level(std::string_view text)
{
    if (text == "none") {
        return 0.0;
    }
    if (text == "low") {
        return 0.25;
    }
    if (text == "mid") {
        return 0.5;
    }
    if (text == "high") {
        return 1.0;
    }
    double v = -1.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !(v >= 0.0 && v <= 1.0)) {
        throw ConfigError("clutter level must be none/low/mid/high or a number in [0,1], got '" + std::string(text) +
                          "'");
    }
    return v;
}

ImageBuffer render_gesture(const GestureClass& cls, std::size_t size, const RenderJitter& jitter, std::uint64_t seed)
{
    if (size == 0) {
        throw InvalidShapeError("render size must be >= 1");
    }
    const double s = static_cast<double>(size);
    const double pixel = 2.0 / s;
    const double rot = jitter.rotation_deg * std::numbers::pi / 180.0;
    const double cr = std::cos(rot);
    const double sr = std::sin(rot);
    const double tx = 2.0 * jitter.shift_x;
    const double ty = 2.0 * jitter.shift_y;

    Rng rng(seed);
    struct Blob {
        double x, y, sigma, amplitude;
    };
    std::vector<Blob> blobs(static_cast<std::size_t>(std::lround(max_blobs * jitter.clutter)));
    for (auto& b : blobs) {
        b = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(0.08, 0.25), rng.uniform(0.1, 0.3)};
    }

    std::vector<std::uint8_t> px(size * size);
    for (std::size_t iy = 0; iy < size; ++iy) {
        const double y = (static_cast<double>(iy) + 0.5) * pixel - 1.0;
        for (std::size_t ix = 0; ix < size; ++ix) {
            const double x = (static_cast<double>(ix) + 0.5) * pixel - 1.0;
            // inverse transform into the shape's frame
            const double ux = x - tx;
            const double uy = y - ty;
            const Point local{cr * ux + sr * uy, -sr * ux + cr * uy};
            const double d = shape_distance(cls, local);
            double v = jitter.brightness * std::clamp(0.5 - d / pixel, 0.0, 1.0);
            for (const auto& b : blobs) {
                const double dx = x - b.x;
                const double dy = y - b.y;
                v += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
            }
            if (jitter.noise_sigma > 0.0) {
                v += rng.normal(0.0, jitter.noise_sigma);
            }
            v = std::clamp(v, 0.0, 1.0);
            px[iy * size + ix] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    }
    return ImageBuffer(size, size, 1, std::move(px));
}

Dataset synth_gestures(const SynthParams& params)
{
    if (params.classes.size() < 2) {
        throw ConfigError("synthetic dataset needs at least 2 gesture classes");
    }
    if (params.classes.size() > 100) {
        throw ConfigError("synthetic dataset supports at most 100 classes");
    }
    if (params.n_per_class < 1) {
        throw ConfigError("n_per_class must be >= 1");
    }
    if (params.size < 1) {
        throw ConfigError("image size must be >= 1");
    }
    if (!(params.clutter >= 0.0 && params.clutter <= 1.0)) {
        throw ConfigError("clutter level must be in [0,1]");
    }

    Dataset ds;
    ds.provenance = {Provenance::Kind::synthetic, params.seed, {}};
    for (std::size_t c = 0; c < params.classes.size(); ++c) {
        char prefix[8];
        std::snprintf(prefix, sizeof(prefix), "%02zu_", c);
        ds.class_names.push_back(prefix + params.classes[c].name());
    }
    ds.samples.reserve(params.classes.size() * params.n_per_class);
    for (std::size_t c = 0; c < params.classes.size(); ++c) {
        for (std::size_t i = 0; i < params.n_per_class; ++i) {
            const std::uint64_t sample_seed = derive_seed(params.seed, (static_cast<std::uint64_t>(c) << 32) | i);
            Rng rng(sample_seed);
            RenderJitter j;
            j.clutter = params.clutter;
            if (params.jitter) {
                j.shift_x = rng.uniform(-max_shift, max_shift);
                j.shift_y = rng.uniform(-max_shift, max_shift);
                j.rotation_deg = rng.uniform(-max_rotation_deg, max_rotation_deg);
                j.brightness = rng.uniform(min_brightness, 1.0);
                j.noise_sigma = noise_sigma;
            }
            const ImageBuffer img = render_gesture(params.classes[c], params.size, j, rng.next_u64());
            ds.samples.push_back({normalize(img), c,
                                  "synth/" + std::to_string(params.seed) + "/" + ds.class_names[c] + "/" +
                                      std::to_string(i)});
        }
    }
    return ds;
}

std::vector<GestureClass> default_gesture_classes(std::size_t count)
{
    static const std::array<GestureClass, 8> pool{{
        {ShapeKind::bar, 45.0},
        {ShapeKind::circle, 0.0},
        {ShapeKind::cross, 0.0},
        {ShapeKind::vee, 0.0},
        {ShapeKind::dot_grid, 0.0},
        {ShapeKind::bar, 135.0},
        {ShapeKind::bar, 0.0},
        {ShapeKind::bar, 90.0},
    }};
    if (count < 2 || count > pool.size()) {
        throw ConfigError("default gesture set has 2 to " + std::to_string(pool.size()) + " classes");
    }
    return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count)};
}

} // namespace gcnl

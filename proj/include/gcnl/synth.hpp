#ifndef GCNL_SYNTH_HPP
#define GCNL_SYNTH_HPP

#include "gcnl/dataset.hpp"
#include "gcnl/image.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gcnl {

enum class ShapeKind { bar, circle, cross, vee, dot_grid };

struct GestureClass {
    ShapeKind kind = ShapeKind::circle;
    double angle_deg = 0.0; // bar only

    // "bar45", "circle", "cross", "vee", "dot-grid"
    std::string name() const;
};

// Accepts "bar:<degrees>", "circle", "cross", "vee", "dot-grid".
GestureClass parse_gesture_class(std::string_view text);

// Named clutter levels: none 0, low 0.25, mid 0.5, high 1.0; numeric
// values in [0, 1] are accepted as-is.
double parse_clutter_level(std::string_view text);

struct SynthParams {
    std::uint64_t seed = 0;
    std::vector<GestureClass> classes;
    std::size_t n_per_class = 100;
    std::size_t size = 32;
    double clutter = 0.5;
    // When false, every random perturbation except clutter is disabled:
    // no translation, rotation, brightness scaling or pixel noise.
    bool jitter = true;
};

// Per-sample perturbation, all drawn from the sample's own seed.
struct RenderJitter {
    double shift_x = 0.0;    // fraction of image width, |.| <= 0.1
    double shift_y = 0.0;
    double rotation_deg = 0.0; // |.| <= 10
    double brightness = 1.0;   // [0.6, 1.0]
    double noise_sigma = 0.0;  // 0.02 when jittered
    double clutter = 0.0;
};

// Renders one sample. The shape is drawn anti-aliased at `brightness`,
// clutter blobs and Gaussian noise are added in [0,1] units, and the
// result is clamped and quantized to 8 bits.
ImageBuffer render_gesture(const GestureClass& cls, std::size_t size, const RenderJitter& jitter, std::uint64_t seed);

// Class c is named "<cc>_<shape>" (two-digit index prefix) so the
// lexicographic order used by load_directory matches the label order.
Dataset synth_gestures(const SynthParams& params);

std::vector<GestureClass> default_gesture_classes(std::size_t count);

} // namespace gcnl

#endif // GCNL_SYNTH_HPP

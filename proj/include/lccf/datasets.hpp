#pragma once

#include "lccf/kernel_cf.hpp"
#include "lccf/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace lccf {

// ---- image files -----------------------------------------------------------

/// 8-bit grayscale (colour is converted) scaled to [0, 1].
ImagePlane load_image(const std::filesystem::path& path);

/// Writes [0, 1] intensities as 8-bit PNG or PGM (chosen by extension).
void save_image(const std::filesystem::path& path, const ImagePlane& image);

/// Width and height without decoding pixel data where the format allows it.
std::pair<int, int> probe_image_size(const std::filesystem::path& path);

// ---- detection corpora -----------------------------------------------------

struct EyePair {
    GridPoint left;
    GridPoint right;

    friend bool operator==(const EyePair&, const EyePair&) = default;
};

struct DetectionSample {
    std::filesystem::path image;  // absolute or relative to the working directory
    GridPoint peak;
    std::optional<EyePair> eyes;

    ImagePlane load() const { return load_image(image); }

    friend bool operator==(const DetectionSample&, const DetectionSample&) = default;
};

/// CSV with header image,peak_row,peak_col[,le_row,le_col,re_row,re_col].
/// Image paths are resolved against the manifest's directory.
std::vector<DetectionSample> load_detection_corpus(const std::filesystem::path& manifest);

/// Image paths are written relative to the manifest's directory when possible.
void write_detection_manifest(const std::filesystem::path& manifest, const std::vector<DetectionSample>& samples);

// ---- corruption ------------------------------------------------------------

enum class CorruptionKind { gaussian_noise, occlusion };

struct CorruptionSpec {
    CorruptionKind kind = CorruptionKind::gaussian_noise;
    double noise_variance = 0.05;
    double occlusion_fraction = 0.1;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Zero-mean i.i.d. Gaussian field of the given variance (unclamped).
ImagePlane gaussian_noise_field(int width, int height, double variance, std::uint64_t seed);

/// image + noise, clamped to [0, 1].
ImagePlane add_gaussian_noise(const ImagePlane& image, double variance, std::uint64_t seed);

struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
};

/// Rectangle of round(fraction * W * H) pixels (at least one), aspect w/h drawn
/// uniformly in [0.5, 2] within what fits, uniform position.
Rect occlusion_rect(int width, int height, double fraction, std::uint64_t seed);

/// Fills occlusion_rect(...) with 0.
ImagePlane add_occlusion(const ImagePlane& image, double fraction, std::uint64_t seed);

ImagePlane apply_corruption(const ImagePlane& image, const CorruptionSpec& spec);

// ---- synthetic data --------------------------------------------------------

struct SynthDetectionImage {
    ImagePlane image;  // [0, 1]
    GridPoint target;  // right-eye glyph centre
    EyePair eyes;
};

/// Textured "face" scenes with two eye glyphs; the right one is the target.
/// Sample i depends only on (seed, i).
std::vector<SynthDetectionImage> synth_detection_corpus(int n, int width, int height, std::uint64_t seed);

struct MotionSpec {
    int frame_width = 240;
    int frame_height = 180;
    int x0 = 20;  // 0-based top-left at frame 0
    int y0 = 60;
    int target_width = 32;
    int target_height = 32;
    double vx = 1.5;  // pixels per frame
    double vy = 0.0;
    double amplitude_x = 0.0;  // optional sinusoidal component
    double amplitude_y = 0.0;
    double period = 50.0;
    bool allow_out_of_view = false;
};

struct OcclusionEvent {
    int first_frame = -1;  // inclusive, 0-based; negative disables
    int last_frame = -1;
    double fraction = 0.5;  // of the target width, covered from the left

    bool active(int frame) const noexcept { return first_frame >= 0 && frame >= first_frame && frame <= last_frame; }
};

struct SynthSequence {
    std::vector<ImagePlane> frames;
    std::vector<BBox> boxes;  // 0-based
};

SynthSequence synth_tracking_sequence(int n_frames, const MotionSpec& motion, const OcclusionEvent& occlusion,
                                      std::uint64_t seed, double noise_variance = 0.0);

/// Numerically ordered image files in `dir` (or `dir/img`).
std::vector<std::filesystem::path> list_sequence_frames(const std::filesystem::path& dir);

}  // namespace lccf

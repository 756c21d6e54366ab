#pragma once

#include "lccf/signal.hpp"

#include <string>
#include <vector>

namespace lccf {

enum class FeatureKind { gray, hog };

struct FeatureConfig {
    FeatureKind kind = FeatureKind::hog;
    int orientations = 5;
    int cell_width = 5;
    int cell_height = 5;
    int block_width = 5;
    int block_height = 5;

    static FeatureConfig gray();
    static FeatureConfig hog(int orientations = 5, int cell = 5, int block = 5);

    void validate() const;

    /// Stable textual form, e.g. "hog;orientations=5;cell=5x5;block=5x5".
    std::string descriptor() const;
    static FeatureConfig parse(const std::string& descriptor);

    int channels() const noexcept { return kind == FeatureKind::gray ? 1 : orientations; }
    int effective_cell_width() const noexcept { return kind == FeatureKind::gray ? 1 : cell_width; }
    int effective_cell_height() const noexcept { return kind == FeatureKind::gray ? 1 : cell_height; }

    friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

struct FeatureMap {
    FeatureConfig config;
    int cell_width = 1;
    int cell_height = 1;
    std::vector<ImagePlane> channels;

    int num_channels() const noexcept { return static_cast<int>(channels.size()); }
    int rows() const noexcept { return channels.empty() ? 0 : channels.front().height(); }
    int cols() const noexcept { return channels.empty() ? 0 : channels.front().width(); }
};

FeatureMap extract_gray(const ImagePlane& image, const FeatureConfig& config);

/// Unsigned-orientation HOG: centered-difference gradients with replicated borders,
/// magnitude votes linearly split between the two nearest of `orientations` bins
/// over [0, pi), summed per cell, then L2-normalised over the block around each cell.
FeatureMap extract_hog(const ImagePlane& image, const FeatureConfig& config);

/// Dispatches on config.kind.
FeatureMap extract_features(const ImagePlane& image, const FeatureConfig& config);

/// Elementwise product of every channel with `window`.
void apply_window(FeatureMap& features, const ImagePlane& window);

/// Per-channel fft2.
std::vector<Spectrum> feature_spectra(const FeatureMap& features);

}  // namespace lccf

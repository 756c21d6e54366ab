#pragma once

#include "lccf/features.hpp"
#include "lccf/sadmm.hpp"
#include "lccf/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

namespace lccf {

struct ResponseConfig {
    /// Gaussian variance of the desired response, in feature-grid units.
    double variance = 2.0;
};

/// Multi-channel filter in the frequency domain. The response spectrum of a
/// feature stack x is sum_k x_k(d) * h_k(d) per bin d.
struct FilterSpectrum {
    std::vector<Spectrum> channels;
    FeatureConfig feature;
    ResponseConfig response;

    int num_channels() const noexcept { return static_cast<int>(channels.size()); }
    int width() const noexcept { return channels.empty() ? 0 : channels.front().width(); }
    int height() const noexcept { return channels.empty() ? 0 : channels.front().height(); }

    /// Channel-major, row-major concatenation of all bins.
    SolutionVector flatten() const;
    static FilterSpectrum from_flat(std::span<const Complex> flat, int channels, int width, int height,
                                    const FeatureConfig& feature = {}, const ResponseConfig& response = {});
};

struct TrainingSample {
    std::vector<Spectrum> features;  // one spectrum per channel
    Spectrum response;
};

struct TrainingSet {
    std::vector<TrainingSample> samples;
    double lambda = 1e-4;

    int num_channels() const;
    int width() const;
    int height() const;
    void validate() const;
};

struct LcLcfConfig {
    int maxiter = 12;
    double sigma0 = 0.25;
    double eta = 0.7;
    double lambda = 1e-4;
    double initial_fraction = 0.5;

    void validate() const;
};

struct LcLcfIteration {
    int iteration = 0;  // 1-based
    double epsilon = 0.0;
    double sigma = 0.0;  // penalty used for this iteration's solve
    int subset_size = 0;
    // Filled only when LcLcfOptions::record_iterates is set.
    SolutionVector h;  // h^{t+1}
    SolutionVector g;  // g^{t+1}
};

struct LcLcfOptions {
    /// Extra solutions placed in the subspace history before iterating.
    std::vector<SolutionVector> anchor_history;
    bool record_iterates = false;
};

struct LcLcfResult {
    FilterSpectrum filter;
    SolutionVector initial;  // h^0 = g^0
    std::vector<LcLcfIteration> trace;
};

/// Ridge-regression filter: per bin, (lambda I + sum_i X_i^H X_i) h = sum_i X_i^H y_i.
/// Throws NumericError naming the bin when a system is singular.
FilterSpectrum solve_mccf(const TrainingSet& set);

/// Latent-constrained training. Uses config.lambda (set.lambda is ignored).
/// The initial subset holds floor(initial_fraction * N) samples; iteration t
/// (1-based) solves over B + floor(t * (N - B) / maxiter) samples in set order.
LcLcfResult solve_lc_lcf(const TrainingSet& set, const LcLcfConfig& config, const LcLcfOptions& options = {});

/// E_L(h) = 0.5 sum_i |y_i - X_i h|^2 + 0.5 lambda |h|^2 over the whole set.
double linear_objective(const TrainingSet& set, const FilterSpectrum& filter, double lambda);

ImagePlane apply_filter(const FilterSpectrum& filter, const FeatureMap& features);

struct Peak {
    int row = 0;
    int col = 0;
    double score = 0.0;
};

/// Global maximum; ties resolve to the smallest row, then the smallest column.
Peak detect_peak(const ImagePlane& response);

/// Normalise, extract features, and build the sample's spectra. `target` is in
/// image pixels and maps to feature cell (row / cell_h, col / cell_w).
TrainingSample make_training_sample(const ImagePlane& image, GridPoint target, const FeatureConfig& feature,
                                    const ResponseConfig& response);

struct Detection {
    double row = 0.0;  // pixel coordinates of the cell centre
    double col = 0.0;
    double score = 0.0;
};

Detection detect_in_image(const FilterSpectrum& filter, const ImagePlane& image);

// Model file: "LCCF", u16 version, u32 K, W, H, u32 descriptor length + UTF-8
// feature descriptor, then K*W*H (re, im) f64 pairs. All little-endian.
inline constexpr std::uint16_t model_format_version = 1;

void write_model(std::ostream& out, const FilterSpectrum& filter);
FilterSpectrum read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const FilterSpectrum& filter);
FilterSpectrum load_model(const std::filesystem::path& path);

}  // namespace lccf

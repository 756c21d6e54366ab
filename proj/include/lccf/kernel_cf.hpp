#pragma once

#include "lccf/features.hpp"
#include "lccf/sadmm.hpp"
#include "lccf/signal.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace lccf {

/// Dual variable of the kernelised filter (alpha or its subspace image beta).
using DualSpectrum = Spectrum;

/// How the squared feature distance is scaled before the Gaussian.
/// `none` evaluates exp(-|z - x|^2 / sigma^2); `per_element` divides the
/// distance by the number of feature values first, the usual tracking form.
enum class KernelNormalization { none, per_element };

Spectrum kernel_autocorrelation(const FeatureMap& x, double kernel_sigma,
                                KernelNormalization norm = KernelNormalization::none);

/// Spectrum of k(tau) = exp(-max(0, |x|^2 + |z|^2 - 2 sum_k corr(z_k, x_k)(tau)) / sigma^2).
Spectrum kernel_crosscorrelation(const FeatureMap& z, const FeatureMap& x, double kernel_sigma,
                                 KernelNormalization norm = KernelNormalization::none);

/// alpha = y / (kxx + lambda), elementwise.
DualSpectrum solve_kcf(const Spectrum& kxx, const Spectrum& yhat, double lambda);

/// eta * alpha_kcf + (1 - eta) * beta with eta = (kxx + lambda) / (kxx + lambda + sigma).
/// sigma == 0 returns alpha_kcf untouched.
DualSpectrum lc_kcf_alpha_update(const DualSpectrum& alpha_kcf, const DualSpectrum& beta, const Spectrum& kxx,
                                 double lambda, double sigma);

struct BBox {
    int x = 0;  // 0-based top-left column
    int y = 0;  // 0-based top-left row
    int w = 0;
    int h = 0;

    double center_x() const noexcept { return x + w / 2.0; }
    double center_y() const noexcept { return y + h / 2.0; }

    friend bool operator==(const BBox&, const BBox&) = default;
};

enum class TrackerMode {
    kcf,     // plain kernelised filter: no penalty, no latent history
    lc_kcf,  // latent-constrained update of the dual variable
};

struct TrackerConfig {
    TrackerMode mode = TrackerMode::lc_kcf;
    double lambda = 1e-4;
    double sigma0 = 1e-4;
    double c = 2.0;
    int history = 16;  // window T over past alphas; 0 disables the history
    double padding = 1.5;
    double kernel_sigma = 0.5;
    double rho = 0.1;
    double output_sigma_factor = 0.1;
    KernelNormalization kernel_norm = KernelNormalization::per_element;
    FeatureConfig feature = FeatureConfig::hog(5, 4, 4);

    void validate() const;
};

struct TrackerState {
    BBox bbox;
    FeatureMap model;  // appearance template x
    DualSpectrum alpha;
    DualSpectrum beta;
    SubspaceHistory alpha_history;
    PenaltySchedule penalty;
    int frame_index = 0;

    // Fixed at initialisation.
    int window_width = 0;
    int window_height = 0;
    Spectrum yhat;
    ImagePlane taper;
};

struct StepResult {
    BBox bbox;
    double score = 0.0;
    double sigma = 0.0;    // penalty after this step
    double epsilon = 0.0;  // |alpha^{t+1} - alpha^t|
    ImagePlane response;
};

TrackerState init_tracker(const ImagePlane& frame, const BBox& bbox, const TrackerConfig& config);

/// Locate the target in `frame`, then retrain on the new location.
StepResult track_step(TrackerState& state, const ImagePlane& frame, const TrackerConfig& config);

struct TrackRecord {
    BBox bbox;
    double score = 0.0;
    double sigma = 0.0;
    double epsilon = 0.0;
};

std::vector<TrackRecord> track_sequence(const std::vector<ImagePlane>& frames, const BBox& init_bbox,
                                        const TrackerConfig& config);

/// Replicate-border crop of size width x height centred on (cx, cy).
ImagePlane crop_window(const ImagePlane& frame, int cx, int cy, int width, int height);

// Ground truth: one "x,y,w,h" line per frame (comma, tab or space separated),
// 1-based top-left corner. Returned boxes are 0-based.
std::vector<BBox> read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const std::filesystem::path& path, const std::vector<BBox>& boxes);

/// frame_index,x,y,w,h,peak_score,sigma,epsilon with 1-based x,y.
void write_track_csv(const std::filesystem::path& path, const std::vector<TrackRecord>& records);
std::vector<TrackRecord> read_track_csv(const std::filesystem::path& path);

}  // namespace lccf

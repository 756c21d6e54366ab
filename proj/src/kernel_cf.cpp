#include "lccf/kernel_cf.hpp"

#include "lccf/error.hpp"
#include "lccf/linear_cf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lccf {

namespace {

double feature_energy(const FeatureMap& f)
{
    double sum = 0.0;
    for (const auto& ch : f.channels)
        for (double v : ch.values())
            sum += v * v;
    return sum;
}

void check_same_grid(const FeatureMap& a, const FeatureMap& b)
{
    if (a.num_channels() != b.num_channels() || a.rows() != b.rows() || a.cols() != b.cols())
        throw ConfigError("kernel correlation: feature maps differ in shape");
    if (a.num_channels() < 1)
        throw ConfigError("kernel correlation: empty feature map");
}

Spectrum gaussian_kernel(const FeatureMap& z, const FeatureMap& x, double kernel_sigma, KernelNormalization norm)
{
    check_same_grid(z, x);
    if (!(kernel_sigma > 0.0))
        throw ConfigError("kernel_sigma must be positive");
    const int w = x.cols();
    const int h = x.rows();
    Spectrum cross(w, h);
    for (int k = 0; k < x.num_channels(); ++k) {
        const Spectrum zf = fft2(z.channels[k]);
        const Spectrum xf = fft2(x.channels[k]);
        auto dst = cross.values();
        for (std::size_t d = 0; d < dst.size(); ++d)
            dst[d] += zf.values()[d] * std::conj(xf.values()[d]);
    }
    const ImagePlane corr = ifft2(cross);
    const double base = feature_energy(x) + feature_energy(z);
    const double scale = norm == KernelNormalization::per_element
                             ? static_cast<double>(x.num_channels()) * w * h
                             : 1.0;
    const double inv_var = 1.0 / (kernel_sigma * kernel_sigma);
    ImagePlane k(w, h);
    auto kv = k.values();
    auto cv = corr.values();
    for (std::size_t i = 0; i < kv.size(); ++i) {
        const double dist = std::max(0.0, base - 2.0 * cv[i]) / scale;
        kv[i] = std::exp(-dist * inv_var);
    }
    return fft2(k);
}

// Gaussian label with its peak at (0, 0), wrapping around the borders.
Spectrum wrapped_label(int cols, int rows, double variance)
{
    const auto centred = gaussian_response(cols, rows, {rows / 2, cols / 2}, variance);
    return fft2(circshift(centred.plane, -(rows / 2), -(cols / 2)));
}

FeatureMap crop_features(const ImagePlane& frame, const BBox& box, const TrackerState& state,
                         const TrackerConfig& config)
{
    const int cx = box.x + box.w / 2;
    const int cy = box.y + box.h / 2;
    ImagePlane patch = crop_window(frame, cx, cy, state.window_width, state.window_height);
    if (config.feature.kind == FeatureKind::gray) {
        try {
            patch = normalize_image(patch);
        } catch (const DataError&) {
            patch = ImagePlane(patch.width(), patch.height(), 0.0);
        }
    }
    FeatureMap f = extract_features(patch, config.feature);
    apply_window(f, state.taper);
    return f;
}

void check_frame(const ImagePlane& frame, const BBox& box)
{
    if (frame.empty())
        throw DataError("tracker: empty frame");
    if (box.w < 1 || box.h < 1)
        throw DataError("tracker: degenerate bounding box");
    if (box.w > frame.width() || box.h > frame.height())
        throw DataError("tracker: frame " + std::to_string(frame.width()) + "x" + std::to_string(frame.height()) +
                        " is smaller than the target box");
}

BBox clamp_box(BBox box, const ImagePlane& frame)
{
    check_frame(frame, box);
    box.x = std::clamp(box.x, 0, frame.width() - box.w);
    box.y = std::clamp(box.y, 0, frame.height() - box.h);
    return box;
}

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string token;
    for (char ch : line) {
        if (ch == ',' || ch == '\t' || ch == ' ' || ch == '\r') {
            if (!token.empty())
                out.push_back(token);
            token.clear();
        } else {
            token.push_back(ch);
        }
    }
    if (!token.empty())
        out.push_back(token);
    return out;
}

}  // namespace

Spectrum kernel_autocorrelation(const FeatureMap& x, double kernel_sigma, KernelNormalization norm)
{
    return gaussian_kernel(x, x, kernel_sigma, norm);
}

Spectrum kernel_crosscorrelation(const FeatureMap& z, const FeatureMap& x, double kernel_sigma,
                                 KernelNormalization norm)
{
    return gaussian_kernel(z, x, kernel_sigma, norm);
}

DualSpectrum solve_kcf(const Spectrum& kxx, const Spectrum& yhat, double lambda)
{
    if (!kxx.same_shape(yhat))
        throw ConfigError("solve_kcf: kernel and label spectra differ in shape");
    if (!(lambda >= 0.0))
        throw ConfigError("solve_kcf: lambda must be non-negative");
    DualSpectrum alpha(kxx.width(), kxx.height());
    for (std::size_t d = 0; d < alpha.size(); ++d) {
        const Complex denom = kxx.values()[d] + lambda;
        if (std::abs(denom) < 1e-12)
            throw NumericError("solve_kcf: singular denominator at bin " + std::to_string(d));
        alpha.values()[d] = yhat.values()[d] / denom;
    }
    return alpha;
}

DualSpectrum lc_kcf_alpha_update(const DualSpectrum& alpha_kcf, const DualSpectrum& beta, const Spectrum& kxx,
                                 double lambda, double sigma)
{
    if (!alpha_kcf.same_shape(beta) || !alpha_kcf.same_shape(kxx))
        throw ConfigError("lc_kcf_alpha_update: spectra differ in shape");
    if (!(sigma >= 0.0))
        throw ConfigError("lc_kcf_alpha_update: sigma must be non-negative");
    if (sigma == 0.0)
        return alpha_kcf;
    DualSpectrum out(alpha_kcf.width(), alpha_kcf.height());
    for (std::size_t d = 0; d < out.size(); ++d) {
        const Complex base = kxx.values()[d] + lambda;
        const Complex denom = base + sigma;
        if (std::abs(denom) < 1e-12)
            throw NumericError("lc_kcf_alpha_update: singular denominator at bin " + std::to_string(d));
        const Complex eta = base / denom;
        out.values()[d] = eta * alpha_kcf.values()[d] + (1.0 - eta) * beta.values()[d];
    }
    return out;
}

void TrackerConfig::validate() const
{
    if (!(lambda > 0.0))
        throw ConfigError("tracker: lambda must be positive");
    if (!(sigma0 >= 0.0))
        throw ConfigError("tracker: sigma0 must be non-negative");
    if (!(c >= 1.0))
        throw ConfigError("tracker: c must be >= 1");
    if (history < 0)
        throw ConfigError("tracker: history window must be >= 0");
    if (!(padding >= 0.0))
        throw ConfigError("tracker: padding must be non-negative");
    if (!(kernel_sigma > 0.0) || !(output_sigma_factor > 0.0))
        throw ConfigError("tracker: kernel_sigma and output_sigma_factor must be positive");
    if (!(rho >= 0.0 && rho <= 1.0))
        throw ConfigError("tracker: rho must lie in [0, 1]");
    feature.validate();
}

ImagePlane crop_window(const ImagePlane& frame, int cx, int cy, int width, int height)
{
    ImagePlane out(width, height);
    const int x0 = cx - width / 2;
    const int y0 = cy - height / 2;
    for (int r = 0; r < height; ++r) {
        const int sr = std::clamp(y0 + r, 0, frame.height() - 1);
        for (int c = 0; c < width; ++c) {
            const int sc = std::clamp(x0 + c, 0, frame.width() - 1);
            out.at(r, c) = frame.at(sr, sc);
        }
    }
    return out;
}

TrackerState init_tracker(const ImagePlane& frame, const BBox& bbox, const TrackerConfig& config)
{
    config.validate();
    TrackerState state;
    state.bbox = clamp_box(bbox, frame);

    const int cw = config.feature.effective_cell_width();
    const int ch = config.feature.effective_cell_height();
    const int cols = std::max(2, static_cast<int>(std::lround(state.bbox.w * (1.0 + config.padding) / cw)));
    const int rows = std::max(2, static_cast<int>(std::lround(state.bbox.h * (1.0 + config.padding) / ch)));
    state.window_width = cols * cw;
    state.window_height = rows * ch;
    state.taper = cosine_window(cols, rows);

    const double label_sigma =
        config.output_sigma_factor * std::sqrt(static_cast<double>(state.bbox.w) * state.bbox.h) / cw;
    state.yhat = wrapped_label(cols, rows, label_sigma * label_sigma);

    state.model = crop_features(frame, state.bbox, state, config);
    const Spectrum kxx = kernel_autocorrelation(state.model, config.kernel_sigma, config.kernel_norm);
    state.alpha = solve_kcf(kxx, state.yhat, config.lambda);
    state.beta = state.alpha;

    state.penalty.sigma = config.mode == TrackerMode::kcf ? 0.0 : config.sigma0;
    state.penalty.c = config.c;
    if (config.mode == TrackerMode::lc_kcf && config.history > 0) {
        state.alpha_history = SubspaceHistory(static_cast<std::size_t>(config.history));
        state.alpha_history.push({state.alpha.values().begin(), state.alpha.values().end()});
    }
    return state;
}

StepResult track_step(TrackerState& state, const ImagePlane& frame, const TrackerConfig& config)
{
    // Detection at the previous location.
    const FeatureMap z = crop_features(frame, state.bbox, state, config);
    const Spectrum kzx = kernel_crosscorrelation(z, state.model, config.kernel_sigma, config.kernel_norm);
    Spectrum product(kzx.width(), kzx.height());
    for (std::size_t d = 0; d < product.size(); ++d)
        product.values()[d] = kzx.values()[d] * state.alpha.values()[d];
    StepResult result;
    result.response = ifft2(product);
    const Peak peak = detect_peak(result.response);
    const int rows = result.response.height();
    const int cols = result.response.width();
    const int dr = peak.row > rows / 2 ? peak.row - rows : peak.row;
    const int dc = peak.col > cols / 2 ? peak.col - cols : peak.col;
    BBox moved = state.bbox;
    moved.x += dc * config.feature.effective_cell_width();
    moved.y += dr * config.feature.effective_cell_height();
    state.bbox = clamp_box(moved, frame);
    result.score = peak.score;

    // Retrain on the new location.
    const FeatureMap x = crop_features(frame, state.bbox, state, config);
    const Spectrum kxx = kernel_autocorrelation(x, config.kernel_sigma, config.kernel_norm);
    DualSpectrum alpha_kcf = solve_kcf(kxx, state.yhat, config.lambda);

    DualSpectrum next;
    if (config.mode == TrackerMode::lc_kcf)
        next = lc_kcf_alpha_update(alpha_kcf, state.beta, kxx, config.lambda, state.penalty.sigma);
    else
        next = std::move(alpha_kcf);

    const double eps = distance(next.values(), state.alpha.values());
    if (config.mode == TrackerMode::lc_kcf) {
        state.penalty = update_penalty(state.penalty, eps, PenaltyMode::strict);
        if (!state.alpha_history.empty()) {
            SolutionVector beta = project_subspace(next.values(), state.alpha_history);
            state.alpha_history.push({next.values().begin(), next.values().end()});
            state.beta = Spectrum(next.width(), next.height(), std::move(beta));
        }
    }
    state.alpha = std::move(next);

    for (int k = 0; k < state.model.num_channels(); ++k) {
        auto dst = state.model.channels[k].values();
        auto src = x.channels[k].values();
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] = (1.0 - config.rho) * dst[i] + config.rho * src[i];
    }
    ++state.frame_index;

    result.bbox = state.bbox;
    result.sigma = state.penalty.sigma;
    result.epsilon = eps;
    return result;
}

std::vector<TrackRecord> track_sequence(const std::vector<ImagePlane>& frames, const BBox& init_bbox,
                                        const TrackerConfig& config)
{
    if (frames.empty())
        throw DataError("track_sequence: no frames");
    TrackerState state = init_tracker(frames.front(), init_bbox, config);
    std::vector<TrackRecord> out;
    out.reserve(frames.size());
    out.push_back({state.bbox, 1.0, state.penalty.sigma, 0.0});
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const StepResult step = track_step(state, frames[i], config);
        out.push_back({step.bbox, step.score, step.sigma, step.epsilon});
    }
    return out;
}

std::vector<BBox> read_ground_truth(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open ground truth " + path.string());
    std::vector<BBox> boxes;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty())
            continue;
        if (fields.size() != 4)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 4 values, got " +
                            std::to_string(fields.size()));
        double v[4];
        for (int i = 0; i < 4; ++i) {
            std::size_t used = 0;
            try {
                v[i] = std::stod(fields[i], &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != fields[i].size() || !std::isfinite(v[i]))
                throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed value '" +
                                fields[i] + "'");
        }
        boxes.push_back({static_cast<int>(std::lround(v[0])) - 1, static_cast<int>(std::lround(v[1])) - 1,
                         static_cast<int>(std::lround(v[2])), static_cast<int>(std::lround(v[3]))});
    }
    return boxes;
}

void write_ground_truth(const std::filesystem::path& path, const std::vector<BBox>& boxes)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    for (const auto& b : boxes)
        out << b.x + 1 << ',' << b.y + 1 << ',' << b.w << ',' << b.h << '\n';
}

void write_track_csv(const std::filesystem::path& path, const std::vector<TrackRecord>& records)
{
    std::ofstream out(path);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << "frame_index,x,y,w,h,peak_score,sigma,epsilon\n";
    out.precision(17);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out << i + 1 << ',' << r.bbox.x + 1 << ',' << r.bbox.y + 1 << ',' << r.bbox.w << ',' << r.bbox.h << ','
            << r.score << ',' << r.sigma << ',' << r.epsilon << '\n';
    }
}

std::vector<TrackRecord> read_track_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("frame_index", 0) != 0)
        throw DataError(path.string() + ": missing header");
    std::vector<TrackRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r")
            continue;
        std::istringstream is(line);
        std::string field;
        std::vector<double> v;
        while (std::getline(is, field, ','))
            v.push_back(std::strtod(field.c_str(), nullptr));
        if (v.size() != 8)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 8 columns");
        TrackRecord r;
        r.bbox = {static_cast<int>(v[1]) - 1, static_cast<int>(v[2]) - 1, static_cast<int>(v[3]),
                  static_cast<int>(v[4])};
        r.score = v[5];
        r.sigma = v[6];
        r.epsilon = v[7];
        out.push_back(r);
    }
    return out;
}

}  // namespace lccf

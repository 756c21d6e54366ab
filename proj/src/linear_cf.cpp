#include "lccf/linear_cf.hpp"

#include "lccf/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace lccf {

namespace {

using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

// Accumulates the per-bin normal equations sum_i X_i(d)^H X_i(d) and
// sum_i X_i(d)^H y_i(d), in sample order.
class NormalEquations {
public:
    NormalEquations(int channels, int width, int height)
        : k_(channels), width_(width), height_(height),
          bins_(static_cast<std::size_t>(width) * height),
          gram_(bins_ * k_ * k_, Complex{}), rhs_(bins_ * k_, Complex{})
    {
    }

    void add(const TrainingSample& sample)
    {
        for (std::size_t d = 0; d < bins_; ++d) {
            Complex* g = &gram_[d * k_ * k_];
            Complex* r = &rhs_[d * k_];
            const Complex y = sample.response.values()[d];
            for (int a = 0; a < k_; ++a) {
                const Complex xa = std::conj(sample.features[a].values()[d]);
                r[a] += xa * y;
                for (int b = 0; b < k_; ++b)
                    g[a * k_ + b] += xa * sample.features[b].values()[d];
            }
        }
    }

    // Solves (G + shift I) h = r + prior_weight * prior per bin.
    SolutionVector solve(double shift, std::span<const Complex> prior = {}, double prior_weight = 0.0) const
    {
        double max_diag = 0.0;
        for (std::size_t d = 0; d < bins_; ++d)
            for (int a = 0; a < k_; ++a)
                max_diag = std::max(max_diag, gram_[d * k_ * k_ + a * k_ + a].real() + shift);
        const double tol = 1e-12 * max_diag;

        SolutionVector h(bins_ * k_);
        ComplexMatrix system(k_, k_);
        ComplexVector rhs(k_);
        Eigen::LLT<ComplexMatrix> llt(k_);
        for (std::size_t d = 0; d < bins_; ++d) {
            const Complex* g = &gram_[d * k_ * k_];
            for (int a = 0; a < k_; ++a) {
                rhs(a) = rhs_[d * k_ + a];
                if (!prior.empty())
                    rhs(a) += prior_weight * prior[a * bins_ + d];
                for (int b = 0; b < k_; ++b)
                    system(a, b) = g[a * k_ + b];
                system(a, a) += shift;
            }
            if (k_ == 1) {
                const double pivot = system(0, 0).real();
                if (!(pivot > tol))
                    throw_singular(d);
                h[d] = rhs(0) / pivot;
                continue;
            }
            llt.compute(system);
            bool ok = llt.info() == Eigen::Success;
            if (ok) {
                const auto& l = llt.matrixLLT();
                for (int a = 0; a < k_; ++a)
                    ok = ok && std::norm(l(a, a)) > tol;
            }
            if (!ok)
                throw_singular(d);
            const ComplexVector sol = llt.solve(rhs);
            for (int a = 0; a < k_; ++a)
                h[a * bins_ + d] = sol(a);
        }
        return h;
    }

private:
    [[noreturn]] void throw_singular(std::size_t d) const
    {
        const int row = static_cast<int>(d / width_);
        const int col = static_cast<int>(d % width_);
        throw NumericError("singular normal equations at frequency bin (row " + std::to_string(row) + ", col " +
                           std::to_string(col) + "); increase lambda or add data");
    }

    int k_;
    int width_;
    int height_;
    std::size_t bins_;
    std::vector<Complex> gram_;
    std::vector<Complex> rhs_;
};

double residual_norm(std::span<const Complex> a, std::span<const Complex> b)
{
    return distance(a, b);
}

// Little-endian primitives for the model file.
void put_u16(std::ostream& out, std::uint16_t v)
{
    const char bytes[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
    out.write(bytes, 2);
}

void put_u32(std::ostream& out, std::uint32_t v)
{
    char bytes[4];
    for (int i = 0; i < 4; ++i)
        bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v)
{
    const auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i)
        bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}

std::uint64_t get_le(std::istream& in, int n)
{
    unsigned char bytes[8] = {};
    in.read(reinterpret_cast<char*>(bytes), n);
    if (!in)
        throw DataError("model file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i)
        v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return v;
}

}  // namespace

SolutionVector FilterSpectrum::flatten() const
{
    SolutionVector flat;
    flat.reserve(channels.size() * static_cast<std::size_t>(width()) * height());
    for (const auto& ch : channels)
        flat.insert(flat.end(), ch.values().begin(), ch.values().end());
    return flat;
}

FilterSpectrum FilterSpectrum::from_flat(std::span<const Complex> flat, int channels, int width, int height,
                                         const FeatureConfig& feature, const ResponseConfig& response)
{
    const std::size_t bins = static_cast<std::size_t>(width) * height;
    if (flat.size() != bins * channels)
        throw ConfigError("FilterSpectrum::from_flat: size mismatch");
    FilterSpectrum out;
    out.feature = feature;
    out.response = response;
    for (int k = 0; k < channels; ++k)
        out.channels.emplace_back(width, height,
                                  std::vector<Complex>(flat.begin() + k * bins, flat.begin() + (k + 1) * bins));
    return out;
}

int TrainingSet::num_channels() const
{
    return samples.empty() ? 0 : static_cast<int>(samples.front().features.size());
}

int TrainingSet::width() const
{
    return samples.empty() ? 0 : samples.front().response.width();
}

int TrainingSet::height() const
{
    return samples.empty() ? 0 : samples.front().response.height();
}

void TrainingSet::validate() const
{
    if (samples.empty())
        throw ConfigError("training set is empty");
    if (!(lambda >= 0.0))
        throw ConfigError("training set lambda must be non-negative");
    const int k = num_channels();
    if (k < 1)
        throw ConfigError("training samples need at least one channel");
    const auto& ref = samples.front().response;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        if (static_cast<int>(s.features.size()) != k)
            throw ConfigError("training sample " + std::to_string(i) + " has a different channel count");
        if (!s.response.same_shape(ref))
            throw ConfigError("training sample " + std::to_string(i) + " has a different response size");
        for (const auto& f : s.features)
            if (!f.same_shape(ref))
                throw ConfigError("training sample " + std::to_string(i) + " has mismatched channel dimensions");
    }
}

void LcLcfConfig::validate() const
{
    if (maxiter < 1)
        throw ConfigError("lc-lcf: maxiter must be >= 1");
    if (!(sigma0 > 0.0))
        throw ConfigError("lc-lcf: sigma0 must be positive");
    if (!(eta > 0.0 && eta <= 1.0))
        throw ConfigError("lc-lcf: eta must lie in (0, 1]");
    if (!(lambda >= 0.0))
        throw ConfigError("lc-lcf: lambda must be non-negative");
    if (!(initial_fraction > 0.0 && initial_fraction <= 1.0))
        throw ConfigError("lc-lcf: initial_fraction must lie in (0, 1]");
}

FilterSpectrum solve_mccf(const TrainingSet& set)
{
    set.validate();
    NormalEquations eqs(set.num_channels(), set.width(), set.height());
    for (const auto& s : set.samples)
        eqs.add(s);
    return FilterSpectrum::from_flat(eqs.solve(set.lambda), set.num_channels(), set.width(), set.height());
}

LcLcfResult solve_lc_lcf(const TrainingSet& set, const LcLcfConfig& config, const LcLcfOptions& options)
{
    set.validate();
    config.validate();
    const int n = static_cast<int>(set.samples.size());
    const int initial = static_cast<int>(std::floor(config.initial_fraction * n));
    if (initial < 1)
        throw ConfigError("lc-lcf: initial subset is empty; need initial_fraction * N >= 1");

    const int k = set.num_channels();
    const int w = set.width();
    const int h = set.height();
    NormalEquations eqs(k, w, h);
    int used = 0;
    auto grow_to = [&](int target) {
        for (; used < target; ++used)
            eqs.add(set.samples[used]);
    };

    grow_to(initial);
    LcLcfResult result;
    result.initial = eqs.solve(config.lambda);
    SolutionVector current = result.initial;
    SolutionVector anchor = result.initial;  // g^t

    SubspaceHistory history;
    for (const auto& extra : options.anchor_history)
        history.push(extra);
    history.push(current);

    PenaltySchedule penalty;
    penalty.sigma = config.sigma0;
    penalty.eta = config.eta;

    for (int t = 1; t <= config.maxiter; ++t) {
        const int subset = initial + static_cast<int>((static_cast<long long>(t) * (n - initial)) / config.maxiter);
        grow_to(subset);

        const double sigma = penalty.sigma;
        SolutionVector next = eqs.solve(config.lambda + sigma, anchor, sigma);
        const double eps = residual_norm(next, current);
        penalty = update_penalty(penalty, eps, PenaltyMode::scaled);
        SolutionVector next_anchor = project_subspace(next, history);
        history.push(next);

        LcLcfIteration it;
        it.iteration = t;
        it.epsilon = eps;
        it.sigma = sigma;
        it.subset_size = subset;
        if (options.record_iterates) {
            it.h = next;
            it.g = next_anchor;
        }
        result.trace.push_back(std::move(it));

        current = std::move(next);
        anchor = std::move(next_anchor);
    }

    result.filter = FilterSpectrum::from_flat(current, k, w, h);
    return result;
}

double linear_objective(const TrainingSet& set, const FilterSpectrum& filter, double lambda)
{
    set.validate();
    if (filter.num_channels() != set.num_channels() || filter.width() != set.width() ||
        filter.height() != set.height())
        throw ConfigError("linear_objective: filter does not match the training set");
    const std::size_t bins = static_cast<std::size_t>(set.width()) * set.height();
    double data = 0.0;
    for (const auto& s : set.samples) {
        for (std::size_t d = 0; d < bins; ++d) {
            Complex pred{};
            for (int c = 0; c < filter.num_channels(); ++c)
                pred += s.features[c].values()[d] * filter.channels[c].values()[d];
            data += std::norm(s.response.values()[d] - pred);
        }
    }
    double reg = 0.0;
    for (const auto& ch : filter.channels)
        reg += squared_norm(ch.values());
    // Parseval: the spatial sums are the spectral ones over W*H.
    return (0.5 * data + 0.5 * lambda * reg) / static_cast<double>(bins);
}

ImagePlane apply_filter(const FilterSpectrum& filter, const FeatureMap& features)
{
    if (features.num_channels() != filter.num_channels())
        throw ConfigError("apply_filter: filter has " + std::to_string(filter.num_channels()) +
                          " channels, features have " + std::to_string(features.num_channels()));
    if (features.cols() != filter.width() || features.rows() != filter.height())
        throw ConfigError("apply_filter: feature grid " + std::to_string(features.cols()) + "x" +
                          std::to_string(features.rows()) + " does not match filter " +
                          std::to_string(filter.width()) + "x" + std::to_string(filter.height()));
    Spectrum total(filter.width(), filter.height());
    for (int c = 0; c < filter.num_channels(); ++c) {
        const Spectrum xf = fft2(features.channels[c]);
        auto dst = total.values();
        auto hf = filter.channels[c].values();
        for (std::size_t d = 0; d < dst.size(); ++d)
            dst[d] += xf.values()[d] * hf[d];
    }
    return ifft2(total);
}

Peak detect_peak(const ImagePlane& response)
{
    if (response.empty())
        throw ConfigError("detect_peak: empty response");
    Peak best{0, 0, response.at(0, 0)};
    for (int r = 0; r < response.height(); ++r)
        for (int c = 0; c < response.width(); ++c)
            if (response.at(r, c) > best.score)
                best = {r, c, response.at(r, c)};
    return best;
}

TrainingSample make_training_sample(const ImagePlane& image, GridPoint target, const FeatureConfig& feature,
                                    const ResponseConfig& response)
{
    const FeatureMap fm = extract_features(normalize_image(image), feature);
    const GridPoint cell{std::min(target.row / fm.cell_height, fm.rows() - 1),
                         std::min(target.col / fm.cell_width, fm.cols() - 1)};
    TrainingSample s;
    s.features = feature_spectra(fm);
    s.response = fft2(gaussian_response(fm.cols(), fm.rows(), cell, response.variance).plane);
    return s;
}

Detection detect_in_image(const FilterSpectrum& filter, const ImagePlane& image)
{
    const FeatureMap fm = extract_features(normalize_image(image), filter.feature);
    const Peak p = detect_peak(apply_filter(filter, fm));
    return {static_cast<double>(p.row * fm.cell_height + fm.cell_height / 2),
            static_cast<double>(p.col * fm.cell_width + fm.cell_width / 2), p.score};
}

void write_model(std::ostream& out, const FilterSpectrum& filter)
{
    if (filter.channels.empty())
        throw ConfigError("write_model: empty filter");
    out.write("LCCF", 4);
    put_u16(out, model_format_version);
    put_u32(out, static_cast<std::uint32_t>(filter.num_channels()));
    put_u32(out, static_cast<std::uint32_t>(filter.width()));
    put_u32(out, static_cast<std::uint32_t>(filter.height()));
    const std::string desc = filter.feature.descriptor();
    put_u32(out, static_cast<std::uint32_t>(desc.size()));
    out.write(desc.data(), static_cast<std::streamsize>(desc.size()));
    for (const auto& ch : filter.channels)
        for (const auto& v : ch.values()) {
            put_f64(out, v.real());
            put_f64(out, v.imag());
        }
    if (!out)
        throw DataError("write_model: stream failure");
}

FilterSpectrum read_model(std::istream& in)
{
    char magic[4] = {};
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "LCCF")
        throw DataError("not an LCCF model file (bad magic)");
    const auto version = static_cast<std::uint16_t>(get_le(in, 2));
    if (version != model_format_version)
        throw DataError("unsupported model format version " + std::to_string(version));
    const auto k = static_cast<int>(get_le(in, 4));
    const auto w = static_cast<int>(get_le(in, 4));
    const auto h = static_cast<int>(get_le(in, 4));
    const auto len = static_cast<std::size_t>(get_le(in, 4));
    if (k < 1 || w < 1 || h < 1 || len > 4096)
        throw DataError("model header has invalid dimensions");
    std::string desc(len, '\0');
    in.read(desc.data(), static_cast<std::streamsize>(len));
    if (!in)
        throw DataError("model file truncated");
    FeatureConfig feature;
    try {
        feature = FeatureConfig::parse(desc);
    } catch (const ConfigError& e) {
        throw DataError(std::string("model descriptor: ") + e.what());
    }
    if (feature.channels() != k)
        throw DataError("model descriptor implies " + std::to_string(feature.channels()) + " channels, header says " +
                        std::to_string(k));
    const std::size_t count = static_cast<std::size_t>(k) * w * h;
    SolutionVector flat(count);
    for (auto& v : flat) {
        const double re = std::bit_cast<double>(get_le(in, 8));
        const double im = std::bit_cast<double>(get_le(in, 8));
        v = {re, im};
    }
    return FilterSpectrum::from_flat(flat, k, w, h, feature);
}

void save_model(const std::filesystem::path& path, const FilterSpectrum& filter)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open " + path.string() + " for writing");
    write_model(out, filter);
}

FilterSpectrum load_model(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open model " + path.string());
    return read_model(in);
}

}  // namespace lccf

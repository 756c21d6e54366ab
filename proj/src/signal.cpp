#include "lccf/signal.hpp"

#include "lccf/error.hpp"

#include <opencv2/core.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace lccf {

namespace {

void check_dims(int width, int height)
{
    if (width < 1 || height < 1)
        throw ConfigError("plane dimensions must be positive, got " + std::to_string(width) + "x" +
                          std::to_string(height));
}

// cv::Mat header over our own buffer; no copy.
cv::Mat complex_view(std::span<Complex> values, int width, int height)
{
    return cv::Mat(height, width, CV_64FC2, values.data());
}

}  // namespace

ImagePlane::ImagePlane(int width, int height, double fill)
    : width_(width), height_(height)
{
    check_dims(width, height);
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

ImagePlane::ImagePlane(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values))
{
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * height)
        throw ConfigError("plane value count does not match its dimensions");
}

Spectrum::Spectrum(int width, int height, Complex fill)
    : width_(width), height_(height)
{
    check_dims(width, height);
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Spectrum::Spectrum(int width, int height, std::vector<Complex> values)
    : width_(width), height_(height), values_(std::move(values))
{
    check_dims(width, height);
    if (values_.size() != static_cast<std::size_t>(width) * height)
        throw ConfigError("spectrum value count does not match its dimensions");
}

bool all_finite(std::span<const double> values) noexcept
{
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

bool all_finite(std::span<const Complex> values) noexcept
{
    return std::all_of(values.begin(), values.end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

double squared_norm(std::span<const Complex> values) noexcept
{
    double sum = 0.0;
    for (const auto& v : values)
        sum += std::norm(v);
    return sum;
}

Spectrum fft2(const ImagePlane& plane)
{
    if (plane.empty())
        throw ConfigError("fft2: empty plane");
    if (!all_finite(plane.values()))
        throw NumericError("fft2: non-finite input");

    std::vector<Complex> buffer(plane.size());
    std::transform(plane.values().begin(), plane.values().end(), buffer.begin(),
                   [](double v) { return Complex(v, 0.0); });
    Spectrum out(plane.width(), plane.height(), std::move(buffer));
    cv::Mat view = complex_view(out.values(), out.width(), out.height());
    cv::dft(view, view);
    return out;
}

Spectrum fft2(const Spectrum& spec)
{
    if (spec.empty())
        throw ConfigError("fft2: empty spectrum");
    if (!all_finite(spec.values()))
        throw NumericError("fft2: non-finite input");
    Spectrum out = spec;
    cv::Mat view = complex_view(out.values(), out.width(), out.height());
    cv::dft(view, view);
    return out;
}

Spectrum ifft2_complex(const Spectrum& spec)
{
    if (spec.empty())
        throw ConfigError("ifft2: empty spectrum");
    if (!all_finite(spec.values()))
        throw NumericError("ifft2: non-finite input");
    Spectrum out = spec;
    cv::Mat view = complex_view(out.values(), out.width(), out.height());
    cv::dft(view, view, cv::DFT_INVERSE | cv::DFT_SCALE);
    return out;
}

ImagePlane ifft2(const Spectrum& spec)
{
    const Spectrum full = ifft2_complex(spec);
    ImagePlane out(full.width(), full.height());
    double residue = 0.0;
    double scale = 1.0;
    auto dst = out.values();
    auto src = full.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i].real();
        residue = std::max(residue, std::abs(src[i].imag()));
        scale = std::max(scale, std::abs(src[i].real()));
    }
    if (residue > 1e-6 * scale)
        throw NumericError("ifft2: imaginary residue " + std::to_string(residue) +
                           " indicates a spectrum that is not conjugate-symmetric");
    return out;
}

DesiredResponse gaussian_response(int width, int height, GridPoint peak, double variance)
{
    check_dims(width, height);
    if (peak.row < 0 || peak.row >= height || peak.col < 0 || peak.col >= width)
        throw ConfigError("gaussian_response: peak (" + std::to_string(peak.row) + "," +
                          std::to_string(peak.col) + ") outside the plane");
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw ConfigError("gaussian_response: variance must be positive");

    ImagePlane plane(width, height);
    for (int r = 0; r < height; ++r) {
        const double dr = r - peak.row;
        for (int c = 0; c < width; ++c) {
            const double dc = c - peak.col;
            plane.at(r, c) = std::exp(-(dr * dr + dc * dc) / (2.0 * variance));
        }
    }
    return {std::move(plane), peak, variance};
}

ImagePlane normalize_image(const ImagePlane& plane)
{
    if (plane.size() < 2)
        throw ConfigError("normalize_image: need at least two pixels");
    if (!all_finite(plane.values()))
        throw NumericError("normalize_image: non-finite input");

    const auto values = plane.values();
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    double peak = 0.0;
    for (double v : values) {
        mean += v;
        peak = std::max(peak, std::abs(v));
    }
    mean /= n;
    double var = 0.0;
    for (double v : values)
        var += (v - mean) * (v - mean);
    var /= n;
    const double stddev = std::sqrt(var);
    if (!(stddev > 1e-12 * std::max(1.0, peak)))
        throw DataError("normalize_image: degenerate image with zero variance");

    ImagePlane out(plane.width(), plane.height());
    auto dst = out.values();
    for (std::size_t i = 0; i < values.size(); ++i)
        dst[i] = (values[i] - mean) / stddev;
    return out;
}

ImagePlane cosine_window(int width, int height)
{
    if (width < 2 || height < 2)
        throw ConfigError("cosine_window: width and height must be at least 2");
    auto hann = [](int n) {
        std::vector<double> w(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
        return w;
    };
    const auto wr = hann(height);
    const auto wc = hann(width);
    ImagePlane out(width, height);
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c)
            out.at(r, c) = wr[r] * wc[c];
    return out;
}

ImagePlane circshift(const ImagePlane& plane, int drow, int dcol)
{
    const int h = plane.height();
    const int w = plane.width();
    ImagePlane out(w, h);
    for (int r = 0; r < h; ++r) {
        const int sr = ((r - drow) % h + h) % h;
        for (int c = 0; c < w; ++c) {
            const int sc = ((c - dcol) % w + w) % w;
            out.at(r, c) = plane.at(sr, sc);
        }
    }
    return out;
}

}  // namespace lccf

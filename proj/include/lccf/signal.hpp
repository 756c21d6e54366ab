#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lccf {

using Complex = std::complex<double>;

struct GridPoint {
    int row = 0;
    int col = 0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Real-valued 2-D plane stored row-major.
class ImagePlane {
public:
    ImagePlane() = default;
    ImagePlane(int width, int height, double fill = 0.0);
    ImagePlane(int width, int height, std::vector<double> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& at(int row, int col) { return values_[static_cast<std::size_t>(row) * width_ + col]; }
    double at(int row, int col) const { return values_[static_cast<std::size_t>(row) * width_ + col]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool same_shape(const ImagePlane& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Complex 2-D plane of frequency bins, same layout as ImagePlane.
class Spectrum {
public:
    Spectrum() = default;
    Spectrum(int width, int height, Complex fill = {});
    Spectrum(int width, int height, std::vector<Complex> values);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    Complex& at(int row, int col) { return values_[static_cast<std::size_t>(row) * width_ + col]; }
    const Complex& at(int row, int col) const { return values_[static_cast<std::size_t>(row) * width_ + col]; }

    std::span<Complex> values() noexcept { return values_; }
    std::span<const Complex> values() const noexcept { return values_; }

    bool same_shape(const Spectrum& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Complex> values_;
};

struct DesiredResponse {
    ImagePlane plane;
    GridPoint peak;
    double variance = 0.0;
};

bool all_finite(std::span<const double> values) noexcept;
bool all_finite(std::span<const Complex> values) noexcept;

// Forward transform is unnormalized; the inverse carries the 1/(W*H) factor,
// so elementwise products of spectra compose as circular correlations.
Spectrum fft2(const ImagePlane& plane);
Spectrum fft2(const Spectrum& spec);

/// Inverse transform of a (conjugate-symmetric) spectrum back to a real plane.
/// Throws NumericError when the imaginary residue exceeds 1e-6 of the plane scale.
ImagePlane ifft2(const Spectrum& spec);
Spectrum ifft2_complex(const Spectrum& spec);

DesiredResponse gaussian_response(int width, int height, GridPoint peak, double variance);

/// Zero mean, unit population standard deviation. Throws DataError on a constant plane.
ImagePlane normalize_image(const ImagePlane& plane);

/// Separable Hann taper, zero on the border rows and columns.
ImagePlane cosine_window(int width, int height);

/// Cyclic shift: out(r, c) = in(r - drow, c - dcol) with wrap-around.
ImagePlane circshift(const ImagePlane& plane, int drow, int dcol);

/// Sum of squared moduli over every bin.
double squared_norm(std::span<const Complex> values) noexcept;

}  // namespace lccf

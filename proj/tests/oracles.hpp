#pragma once
// Slow, obviously-correct reference implementations used by the tests.

#include "lccf/features.hpp"
#include "lccf/rng.hpp"
#include "lccf/signal.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

using lccf::Complex;
using lccf::ImagePlane;
using lccf::Spectrum;

inline int wrap(int i, int n)
{
    return ((i % n) + n) % n;
}

inline ImagePlane random_plane(int w, int h, lccf::Rng& rng, double lo = -1.0, double hi = 1.0)
{
    ImagePlane p(w, h);
    for (double& v : p.values())
        v = rng.uniform(lo, hi);
    return p;
}

inline Spectrum random_spectrum(int w, int h, lccf::Rng& rng)
{
    Spectrum s(w, h);
    for (auto& v : s.values())
        v = {rng.normal(), rng.normal()};
    return s;
}

inline Spectrum naive_dft(const ImagePlane& p)
{
    const int w = p.width(), h = p.height();
    Spectrum out(w, h);
    for (int u = 0; u < h; ++u)
        for (int v = 0; v < w; ++v) {
            Complex acc = 0.0;
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c) {
                    const double ang = -2.0 * std::numbers::pi * (double(u) * r / h + double(v) * c / w);
                    acc += p.at(r, c) * Complex(std::cos(ang), std::sin(ang));
                }
            out.at(u, v) = acc;
        }
    return out;
}

// out(t) = sum_p a(p + t) b(p), cyclic.
inline ImagePlane circular_correlation(const ImagePlane& a, const ImagePlane& b)
{
    const int w = a.width(), h = a.height();
    ImagePlane out(w, h);
    for (int tr = 0; tr < h; ++tr)
        for (int tc = 0; tc < w; ++tc) {
            double acc = 0.0;
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c)
                    acc += a.at(wrap(r + tr, h), wrap(c + tc, w)) * b.at(r, c);
            out.at(tr, tc) = acc;
        }
    return out;
}

// out(t) = sum_p a(t - p) b(p), cyclic.
inline ImagePlane circular_convolution(const ImagePlane& a, const ImagePlane& b)
{
    const int w = a.width(), h = a.height();
    ImagePlane out(w, h);
    for (int tr = 0; tr < h; ++tr)
        for (int tc = 0; tc < w; ++tc) {
            double acc = 0.0;
            for (int r = 0; r < h; ++r)
                for (int c = 0; c < w; ++c)
                    acc += a.at(wrap(tr - r, h), wrap(tc - c, w)) * b.at(r, c);
            out.at(tr, tc) = acc;
        }
    return out;
}

// Matrix C with (C h)(p) = sum_q x(p - q) h(q); row/col index = r * w + c.
inline Eigen::MatrixXd convolution_matrix(const ImagePlane& x)
{
    const int w = x.width(), h = x.height(), d = w * h;
    Eigen::MatrixXd m(d, d);
    for (int pr = 0; pr < h; ++pr)
        for (int pc = 0; pc < w; ++pc)
            for (int qr = 0; qr < h; ++qr)
                for (int qc = 0; qc < w; ++qc)
                    m(pr * w + pc, qr * w + qc) = x.at(wrap(pr - qr, h), wrap(pc - qc, w));
    return m;
}

inline Eigen::VectorXd to_vector(const ImagePlane& p)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = p.values()[i];
    return v;
}

inline ImagePlane to_plane(const Eigen::VectorXd& v, int w, int h)
{
    ImagePlane p(w, h);
    for (int i = 0; i < w * h; ++i)
        p.values()[static_cast<std::size_t>(i)] = v(i);
    return p;
}

// Multi-channel ridge regression in the spatial domain:
// min_h sum_i |y_i - sum_k conv(x_ik, h_k)|^2 + lambda |h|^2.
inline std::vector<ImagePlane> dense_mccf(const std::vector<std::vector<ImagePlane>>& x,
                                          const std::vector<ImagePlane>& y, double lambda)
{
    const int k = static_cast<int>(x.front().size());
    const int w = y.front().width(), h = y.front().height(), d = w * h;
    Eigen::MatrixXd gram = lambda * Eigen::MatrixXd::Identity(k * d, k * d);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k * d);
    for (std::size_t i = 0; i < x.size(); ++i) {
        Eigen::MatrixXd a(d, k * d);
        for (int c = 0; c < k; ++c)
            a.block(0, c * d, d, d) = convolution_matrix(x[i][static_cast<std::size_t>(c)]);
        gram += a.transpose() * a;
        rhs += a.transpose() * to_vector(y[i]);
    }
    const Eigen::VectorXd sol = gram.ldlt().solve(rhs);
    std::vector<ImagePlane> out;
    for (int c = 0; c < k; ++c)
        out.push_back(to_plane(sol.segment(c * d, d), w, h));
    return out;
}

inline double two_pass_mean(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

inline double two_pass_std(const std::vector<double>& v)
{
    const double m = two_pass_mean(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size()));
}

// Straight per-pixel HOG following the documented recipe.
inline std::vector<ImagePlane> naive_hog(const ImagePlane& img, int bins, int cell, int block)
{
    const int w = img.width(), h = img.height();
    const int cols = w / cell, rows = h / cell;
    auto px = [&](int r, int c) { return img.at(std::clamp(r, 0, h - 1), std::clamp(c, 0, w - 1)); };
    std::vector<ImagePlane> hist(static_cast<std::size_t>(bins), ImagePlane(cols, rows));
    for (int r = 0; r < rows * cell; ++r)
        for (int c = 0; c < cols * cell; ++c) {
            const double gx = px(r, c + 1) - px(r, c - 1);
            const double gy = px(r + 1, c) - px(r - 1, c);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0)
                continue;
            double ang = std::atan2(gy, gx);
            while (ang < 0.0)
                ang += std::numbers::pi;
            while (ang >= std::numbers::pi)
                ang -= std::numbers::pi;
            const double pos = ang / (std::numbers::pi / bins);
            const int b0 = static_cast<int>(std::floor(pos)) % bins;
            const double frac = pos - std::floor(pos);
            const int b1 = (b0 + 1) % bins;
            hist[static_cast<std::size_t>(b0)].at(r / cell, c / cell) += mag * (1.0 - frac);
            hist[static_cast<std::size_t>(b1)].at(r / cell, c / cell) += mag * frac;
        }
    std::vector<ImagePlane> out(static_cast<std::size_t>(bins), ImagePlane(cols, rows));
    const int lo = -(block - 1) / 2;
    const int hi = block / 2;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double energy = 0.0;
            for (int dr = lo; dr <= hi; ++dr)
                for (int dc = lo; dc <= hi; ++dc) {
                    const int rr = r + dr, cc = c + dc;
                    if (rr < 0 || cc < 0 || rr >= rows || cc >= cols)
                        continue;
                    for (const auto& ch : hist)
                        energy += ch.at(rr, cc) * ch.at(rr, cc);
                }
            const double norm = std::sqrt(energy + 1e-10);
            for (int b = 0; b < bins; ++b)
                out[static_cast<std::size_t>(b)].at(r, c) = hist[static_cast<std::size_t>(b)].at(r, c) / norm;
        }
    return out;
}

// Scratch directory under the build tree, emptied on creation.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    const auto p = std::filesystem::temp_directory_path() / ("lccf_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace oracle

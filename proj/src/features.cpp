#include "lccf/features.hpp"

#include "lccf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lccf {

FeatureConfig FeatureConfig::gray()
{
    FeatureConfig cfg;
    cfg.kind = FeatureKind::gray;
    cfg.orientations = 1;
    cfg.cell_width = cfg.cell_height = 1;
    cfg.block_width = cfg.block_height = 1;
    return cfg;
}

FeatureConfig FeatureConfig::hog(int orientations, int cell, int block)
{
    FeatureConfig cfg;
    cfg.kind = FeatureKind::hog;
    cfg.orientations = orientations;
    cfg.cell_width = cfg.cell_height = cell;
    cfg.block_width = cfg.block_height = block;
    return cfg;
}

void FeatureConfig::validate() const
{
    if (orientations < 1)
        throw ConfigError("feature config: orientations must be >= 1");
    if (cell_width < 1 || cell_height < 1)
        throw ConfigError("feature config: cell dimensions must be >= 1");
    if (block_width < 1 || block_height < 1)
        throw ConfigError("feature config: block dimensions must be >= 1");
}

std::string FeatureConfig::descriptor() const
{
    std::ostringstream os;
    if (kind == FeatureKind::gray) {
        os << "gray";
    } else {
        os << "hog;orientations=" << orientations << ";cell=" << cell_width << "x" << cell_height
           << ";block=" << block_width << "x" << block_height;
    }
    return os.str();
}

FeatureConfig FeatureConfig::parse(const std::string& descriptor)
{
    std::istringstream is(descriptor);
    std::string token;
    std::getline(is, token, ';');
    if (token == "gray")
        return gray();
    if (token != "hog")
        throw ConfigError("unknown feature descriptor '" + descriptor + "'");

    FeatureConfig cfg = hog();
    auto parse_pair = [&](const std::string& value, int& a, int& b) {
        const auto x = value.find('x');
        if (x == std::string::npos)
            throw ConfigError("malformed size '" + value + "' in feature descriptor");
        a = std::stoi(value.substr(0, x));
        b = std::stoi(value.substr(x + 1));
    };
    while (std::getline(is, token, ';')) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw ConfigError("malformed feature descriptor field '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        try {
            if (key == "orientations")
                cfg.orientations = std::stoi(value);
            else if (key == "cell")
                parse_pair(value, cfg.cell_width, cfg.cell_height);
            else if (key == "block")
                parse_pair(value, cfg.block_width, cfg.block_height);
            else
                throw ConfigError("unknown feature descriptor field '" + key + "'");
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ConfigError*>(&e))
                throw;
            throw ConfigError("malformed feature descriptor field '" + token + "'");
        }
    }
    cfg.validate();
    return cfg;
}

FeatureMap extract_gray(const ImagePlane& image, const FeatureConfig& config)
{
    if (image.empty())
        throw ConfigError("extract_gray: empty image");
    if (!all_finite(image.values()))
        throw NumericError("extract_gray: non-finite input");
    FeatureMap out;
    out.config = config;
    out.config.kind = FeatureKind::gray;
    out.cell_width = out.cell_height = 1;
    out.channels.push_back(image);
    return out;
}

FeatureMap extract_hog(const ImagePlane& image, const FeatureConfig& config)
{
    config.validate();
    if (!all_finite(image.values()))
        throw NumericError("extract_hog: non-finite input");
    const int cw = config.cell_width;
    const int ch = config.cell_height;
    const int cols = image.width() / cw;
    const int rows = image.height() / ch;
    if (rows < 1 || cols < 1)
        throw ConfigError("extract_hog: image smaller than one cell");

    const int bins = config.orientations;
    const int h = image.height();
    const int w = image.width();
    const double bin_width = std::numbers::pi / bins;

    // histogram[(cell_row * cols + cell_col) * bins + b]
    std::vector<double> hist(static_cast<std::size_t>(rows) * cols * bins, 0.0);

    for (int r = 0; r < rows * ch; ++r) {
        const int up = std::max(r - 1, 0);
        const int down = std::min(r + 1, h - 1);
        for (int c = 0; c < cols * cw; ++c) {
            const int left = std::max(c - 1, 0);
            const int right = std::min(c + 1, w - 1);
            const double gx = image.at(r, right) - image.at(r, left);
            const double gy = image.at(down, c) - image.at(up, c);
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0)
                continue;
            double theta = std::atan2(gy, gx);
            if (theta < 0.0)
                theta += std::numbers::pi;
            if (theta >= std::numbers::pi)
                theta -= std::numbers::pi;
            const double pos = theta / bin_width;
            const double lower = std::floor(pos);
            const double frac = pos - lower;
            const int b0 = static_cast<int>(lower) % bins;
            const int b1 = (b0 + 1) % bins;
            double* cell = &hist[(static_cast<std::size_t>(r / ch) * cols + c / cw) * bins];
            cell[b0] += mag * (1.0 - frac);
            cell[b1] += mag * frac;
        }
    }

    // Blocks are measured in cells, centred on the cell being normalised.
    const int block_rows = std::max(1, (config.block_height + ch - 1) / ch);
    const int block_cols = std::max(1, (config.block_width + cw - 1) / cw);
    constexpr double eps = 1e-5;

    std::vector<double> cell_energy(static_cast<std::size_t>(rows) * cols, 0.0);
    for (std::size_t i = 0; i < cell_energy.size(); ++i)
        for (int b = 0; b < bins; ++b)
            cell_energy[i] += hist[i * bins + b] * hist[i * bins + b];

    FeatureMap out;
    out.config = config;
    out.cell_width = cw;
    out.cell_height = ch;
    out.channels.assign(static_cast<std::size_t>(bins), ImagePlane(cols, rows));
    for (int i = 0; i < rows; ++i) {
        const int r0 = std::max(0, i - (block_rows - 1) / 2);
        const int r1 = std::min(rows - 1, i + block_rows / 2);
        for (int j = 0; j < cols; ++j) {
            const int c0 = std::max(0, j - (block_cols - 1) / 2);
            const int c1 = std::min(cols - 1, j + block_cols / 2);
            double energy = 0.0;
            for (int br = r0; br <= r1; ++br)
                for (int bc = c0; bc <= c1; ++bc)
                    energy += cell_energy[static_cast<std::size_t>(br) * cols + bc];
            const double norm = std::sqrt(energy + eps * eps);
            const double* cell = &hist[(static_cast<std::size_t>(i) * cols + j) * bins];
            for (int b = 0; b < bins; ++b)
                out.channels[b].at(i, j) = cell[b] / norm;
        }
    }
    return out;
}

FeatureMap extract_features(const ImagePlane& image, const FeatureConfig& config)
{
    return config.kind == FeatureKind::gray ? extract_gray(image, config) : extract_hog(image, config);
}

void apply_window(FeatureMap& features, const ImagePlane& window)
{
    for (auto& channel : features.channels) {
        if (!channel.same_shape(window))
            throw ConfigError("apply_window: window does not match the feature grid");
        auto dst = channel.values();
        auto src = window.values();
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] *= src[i];
    }
}

std::vector<Spectrum> feature_spectra(const FeatureMap& features)
{
    std::vector<Spectrum> out;
    out.reserve(features.channels.size());
    for (const auto& channel : features.channels)
        out.push_back(fft2(channel));
    return out;
}

}  // namespace lccf

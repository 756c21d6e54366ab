#pragma once

#include "lccf/kernel_cf.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace lccf {

struct Point2 {
    double row = 0.0;
    double col = 0.0;
};

struct LocalizationResult {
    Point2 predicted;
    Point2 truth;
    double normalizer = 1.0;  // interocular distance, or 1 for plain pixel deviation

    double error() const;
};

enum class CurveKind { localization, precision, success };

const char* curve_kind_name(CurveKind kind) noexcept;
CurveKind parse_curve_kind(const std::string& name);

struct Curve {
    CurveKind kind = CurveKind::localization;
    std::vector<double> thresholds;  // ascending
    std::vector<double> values;      // fractions in [0, 1]
};

/// |pred - truth| / |left_eye - right_eye|.
double interocular_distance(Point2 pred, Point2 truth, Point2 left_eye, Point2 right_eye);

/// Fraction of distances strictly below tau.
double localization_rate(const std::vector<double>& distances, double tau);

double pixel_deviation(Point2 pred, Point2 truth);

/// Inclusive grid start, start + step, ... up to stop (with a half-step tolerance).
std::vector<double> threshold_grid(double start, double stop, double step);

Curve localization_curve(const std::vector<double>& distances, const std::vector<double>& taus);

double center_error(const BBox& a, const BBox& b);
double intersection_over_union(const BBox& a, const BBox& b);

/// Per threshold, fraction of frames whose centre distance is <= threshold.
Curve precision_curve(const std::vector<BBox>& predicted, const std::vector<BBox>& truth,
                      const std::vector<double>& thresholds);

struct SuccessResult {
    Curve curve;
    double auc = 0.0;  // mean success over 0:0.05:1
};

/// Per threshold, fraction of frames with IoU >= threshold.
SuccessResult success_curve(const std::vector<BBox>& predicted, const std::vector<BBox>& truth,
                            const std::vector<double>& thresholds);

double mean_center_error(const std::vector<BBox>& predicted, const std::vector<BBox>& truth);

using CurveMetadata = std::map<std::string, std::string>;

/// "# key=value" lines, then kind,threshold,value rows ordered by kind and threshold.
void emit_curves(const std::vector<Curve>& curves, const std::filesystem::path& path,
                 const CurveMetadata& metadata = {});

struct CurveFile {
    CurveMetadata metadata;
    std::vector<Curve> curves;
};

CurveFile read_curves(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace lccf

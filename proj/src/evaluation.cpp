#include "lccf/evaluation.hpp"

#include "lccf/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lccf {

namespace {

void check_lengths(const std::vector<BBox>& predicted, const std::vector<BBox>& truth)
{
    if (predicted.size() != truth.size())
        throw DataError("box sequences differ in length: " + std::to_string(predicted.size()) + " vs " +
                        std::to_string(truth.size()));
    if (predicted.empty())
        throw DataError("box sequences are empty");
}

void check_thresholds(const std::vector<double>& thresholds)
{
    if (thresholds.empty())
        throw ConfigError("threshold list is empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!std::isfinite(thresholds[i]))
            throw ConfigError("threshold list contains a non-finite value");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
            throw ConfigError("thresholds must be strictly ascending");
    }
}

double parse_double(const std::string& text, const std::string& where)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw DataError(where + ": not a number: '" + text + "'");
    return v;
}

}  // namespace

double LocalizationResult::error() const
{
    if (!(normalizer > 0.0))
        throw ConfigError("localization normalizer must be positive");
    return pixel_deviation(predicted, truth) / normalizer;
}

const char* curve_kind_name(CurveKind kind) noexcept
{
    switch (kind) {
    case CurveKind::localization:
        return "localization";
    case CurveKind::precision:
        return "precision";
    case CurveKind::success:
        return "success";
    }
    return "?";
}

CurveKind parse_curve_kind(const std::string& name)
{
    for (auto k : {CurveKind::localization, CurveKind::precision, CurveKind::success})
        if (name == curve_kind_name(k))
            return k;
    throw DataError("unknown curve kind '" + name + "'");
}

double interocular_distance(Point2 pred, Point2 truth, Point2 left_eye, Point2 right_eye)
{
    const double iod = pixel_deviation(left_eye, right_eye);
    if (iod == 0.0)
        throw DataError("interocular distance: eye landmarks coincide");
    return pixel_deviation(pred, truth) / iod;
}

double localization_rate(const std::vector<double>& distances, double tau)
{
    if (distances.empty())
        throw DataError("localization rate: no distances");
    if (!(tau > 0.0))
        throw ConfigError("localization rate: tau must be positive");
    const auto hits = std::count_if(distances.begin(), distances.end(), [tau](double d) { return d < tau; });
    return static_cast<double>(hits) / static_cast<double>(distances.size());
}

double pixel_deviation(Point2 pred, Point2 truth)
{
    return std::hypot(pred.row - truth.row, pred.col - truth.col);
}

std::vector<double> threshold_grid(double start, double stop, double step)
{
    if (!(step > 0.0) || !(stop >= start))
        throw ConfigError("threshold grid: need step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 0.5)) + 1;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    // snap to 12 decimals so 0.02:0.02:0.3 yields 0.12, not 0.12000000000000001
    for (long i = 0; i < n; ++i)
        out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    return out;
}

Curve localization_curve(const std::vector<double>& distances, const std::vector<double>& taus)
{
    check_thresholds(taus);
    Curve c{CurveKind::localization, taus, {}};
    for (double t : taus)
        c.values.push_back(localization_rate(distances, t));
    return c;
}

double center_error(const BBox& a, const BBox& b)
{
    return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

double intersection_over_union(const BBox& a, const BBox& b)
{
    if (a.w <= 0 || a.h <= 0 || b.w <= 0 || b.h <= 0)
        throw DataError("IoU: boxes must have positive area");
    const long iw = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
    const long ih = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
    const double inter = static_cast<double>(iw * ih);
    const double uni = static_cast<double>(long(a.w) * a.h) + static_cast<double>(long(b.w) * b.h) - inter;
    return inter / uni;
}

Curve precision_curve(const std::vector<BBox>& predicted, const std::vector<BBox>& truth,
                      const std::vector<double>& thresholds)
{
    check_lengths(predicted, truth);
    check_thresholds(thresholds);
    std::vector<double> err;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        err.push_back(center_error(predicted[i], truth[i]));
    Curve c{CurveKind::precision, thresholds, {}};
    for (double t : thresholds) {
        const auto hits = std::count_if(err.begin(), err.end(), [t](double e) { return e <= t; });
        c.values.push_back(static_cast<double>(hits) / static_cast<double>(err.size()));
    }
    return c;
}

SuccessResult success_curve(const std::vector<BBox>& predicted, const std::vector<BBox>& truth,
                            const std::vector<double>& thresholds)
{
    check_lengths(predicted, truth);
    check_thresholds(thresholds);
    std::vector<double> iou;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        iou.push_back(intersection_over_union(predicted[i], truth[i]));
    auto rate = [&](double t) {
        const auto hits = std::count_if(iou.begin(), iou.end(), [t](double v) { return v >= t; });
        return static_cast<double>(hits) / static_cast<double>(iou.size());
    };
    SuccessResult out;
    out.curve = {CurveKind::success, thresholds, {}};
    for (double t : thresholds)
        out.curve.values.push_back(rate(t));
    const auto grid = threshold_grid(0.0, 1.0, 0.05);
    double sum = 0.0;
    for (double t : grid)
        sum += rate(t);
    out.auc = sum / static_cast<double>(grid.size());
    return out;
}

double mean_center_error(const std::vector<BBox>& predicted, const std::vector<BBox>& truth)
{
    check_lengths(predicted, truth);
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        sum += center_error(predicted[i], truth[i]);
    return sum / static_cast<double>(predicted.size());
}

std::string format_double(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void emit_curves(const std::vector<Curve>& curves, const std::filesystem::path& path, const CurveMetadata& metadata)
{
    for (const auto& c : curves) {
        if (c.thresholds.size() != c.values.size())
            throw ConfigError(std::string("curve '") + curve_kind_name(c.kind) + "' has mismatched lengths");
        if (!std::is_sorted(c.thresholds.begin(), c.thresholds.end()))
            throw ConfigError(std::string("curve '") + curve_kind_name(c.kind) + "' thresholds are not ascending");
    }
    struct Row {
        CurveKind kind;
        double threshold;
        double value;
    };
    std::vector<Row> rows;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.values.size(); ++i)
            rows.push_back({c.kind, c.thresholds[i], c.values[i]});
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return a.kind != b.kind ? a.kind < b.kind : a.threshold < b.threshold;
    });

    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write curves to " + path.string());
    for (const auto& [k, v] : metadata) {
        if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
            throw ConfigError("curve metadata key/value contains a reserved character: " + k);
        out << "# " << k << '=' << v << '\n';
    }
    out << "kind,threshold,value\n";
    for (const auto& r : rows)
        out << curve_kind_name(r.kind) << ',' << format_double(r.threshold) << ',' << format_double(r.value) << '\n';
    if (!out)
        throw DataError("write failed for " + path.string());
}

CurveFile read_curves(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open curves file " + path.string());
    CurveFile file;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (line.empty())
            continue;
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw DataError(where + ": metadata line without '='");
            file.metadata[line.substr(2, eq - 2)] = line.substr(eq + 1);
            continue;
        }
        if (!header) {
            if (line != "kind,threshold,value")
                throw DataError(where + ": expected header kind,threshold,value");
            header = true;
            continue;
        }
        std::istringstream is(line);
        std::string kind, thr, val;
        if (!std::getline(is, kind, ',') || !std::getline(is, thr, ',') || !std::getline(is, val))
            throw DataError(where + ": expected three columns");
        const CurveKind k = parse_curve_kind(kind);
        if (file.curves.empty() || file.curves.back().kind != k)
            file.curves.push_back({k, {}, {}});
        file.curves.back().thresholds.push_back(parse_double(thr, where));
        file.curves.back().values.push_back(parse_double(val, where));
    }
    if (!header)
        throw DataError(path.string() + ": missing header");
    return file;
}

}  // namespace lccf

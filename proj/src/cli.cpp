#include "lccf/cli.hpp"

#include "lccf/datasets.hpp"
#include "lccf/error.hpp"
#include "lccf/evaluation.hpp"
#include "lccf/kernel_cf.hpp"
#include "lccf/linear_cf.hpp"
#include "lccf/rng.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace lccf {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// One tunable of a command: dotted config key, long flag, default, help text.
struct Param {
    std::string key;
    std::string flag;
    json fallback;
    std::string help;
};

json parse_flag_value(const Param& p, const std::string& text)
{
    const std::string where = "--" + p.flag;
    try {
        std::size_t used = 0;
        if (p.fallback.is_boolean()) {
            if (text == "true" || text == "1")
                return true;
            if (text == "false" || text == "0")
                return false;
            throw ConfigError(where + ": expected true or false, got '" + text + "'");
        }
        if (p.fallback.is_number_integer()) {
            const long long v = std::stoll(text, &used);
            if (used == text.size())
                return v;
        } else if (p.fallback.is_number()) {
            const double v = std::stod(text, &used);
            if (used == text.size())
                return v;
        } else {
            return text;
        }
    } catch (const std::invalid_argument&) {
    } catch (const std::out_of_range&) {
    }
    throw ConfigError(where + ": cannot parse '" + text + "'");
}

json check_file_value(const Param& p, const json& v)
{
    const std::string where = "config key '" + p.key + "'";
    if (p.fallback.is_boolean()) {
        if (!v.is_boolean())
            throw ConfigError(where + " must be a boolean");
        return v;
    }
    if (p.fallback.is_number_integer()) {
        if (v.is_number_integer())
            return v;
        if (v.is_number_float() && std::floor(v.get<double>()) == v.get<double>())
            return static_cast<long long>(v.get<double>());
        throw ConfigError(where + " must be an integer");
    }
    if (p.fallback.is_number()) {
        if (!v.is_number())
            throw ConfigError(where + " must be a number");
        return v.get<double>();
    }
    if (!v.is_string())
        throw ConfigError(where + " must be a string");
    return v;
}

// Defaults, then the JSON config file, then explicit flags.
class Resolver {
public:
    Resolver(CLI::App* cmd, std::vector<Param> params) : params_(std::move(params)), text_(params_.size())
    {
        cmd->add_option("--config", config_path_, "JSON file with flat dotted keys");
        for (std::size_t i = 0; i < params_.size(); ++i)
            options_.push_back(cmd->add_option("--" + params_[i].flag, text_[i], params_[i].help));
    }

    json resolve() const
    {
        json out = json::object();
        for (const auto& p : params_)
            out[p.key] = p.fallback;
        if (!config_path_.empty()) {
            std::ifstream in(config_path_);
            if (!in)
                throw ConfigError("cannot open config file " + config_path_);
            json file;
            try {
                file = json::parse(in);
            } catch (const json::exception& e) {
                throw ConfigError("config file " + config_path_ + ": " + e.what());
            }
            if (!file.is_object())
                throw ConfigError("config file must hold a JSON object");
            for (const auto& [k, v] : file.items()) {
                const Param* p = find(k);
                if (!p)
                    throw ConfigError("unknown config key '" + k + "'");
                out[k] = check_file_value(*p, v);
            }
        }
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (options_[i]->count() > 0)
                out[params_[i].key] = parse_flag_value(params_[i], text_[i]);
        return out;
    }

private:
    const Param* find(const std::string& key) const
    {
        for (const auto& p : params_)
            if (p.key == key)
                return &p;
        return nullptr;
    }

    std::vector<Param> params_;
    std::vector<std::string> text_;
    std::vector<CLI::Option*> options_;
    std::string config_path_;
};

std::string need_path(const json& cfg, const std::string& key)
{
    const auto v = cfg.at(key).get<std::string>();
    if (v.empty())
        throw ConfigError("missing required setting '" + key + "'");
    return v;
}

int get_int(const json& cfg, const std::string& key)
{
    const auto v = cfg.at(key).get<long long>();
    if (v < INT32_MIN || v > INT32_MAX)
        throw ConfigError("setting '" + key + "' is out of range");
    return static_cast<int>(v);
}

std::uint64_t get_seed(const json& cfg)
{
    const auto v = cfg.at("seed").get<long long>();
    if (v < 0)
        throw ConfigError("seed must be non-negative");
    return static_cast<std::uint64_t>(v);
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

fs::path prepare_out(const json& cfg)
{
    const fs::path out = need_path(cfg, "out");
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out))
        throw DataError("cannot create output directory " + out.string());
    return out;
}

std::vector<Param> feature_params(const std::string& kind, int orientations, int cell, int block)
{
    return {
        {"feature.kind", "feature", kind, "gray or hog"},
        {"feature.orientations", "orientations", orientations, "HOG orientation bins"},
        {"feature.cell", "cell", cell, "HOG cell size in pixels"},
        {"feature.block", "block", block, "HOG normalisation block in cells"},
    };
}

FeatureConfig feature_from(const json& cfg)
{
    const auto kind = cfg.at("feature.kind").get<std::string>();
    FeatureConfig f;
    if (kind == "gray")
        f = FeatureConfig::gray();
    else if (kind == "hog")
        f = FeatureConfig::hog(get_int(cfg, "feature.orientations"), get_int(cfg, "feature.cell"),
                               get_int(cfg, "feature.block"));
    else
        throw ConfigError("feature must be gray or hog, got '" + kind + "'");
    f.validate();
    return f;
}

std::vector<double> parse_grid(const std::string& text)
{
    // start:step:stop
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size())
            throw ConfigError("grid '" + text + "' must be start:step:stop");
        parts.push_back(v);
    }
    if (parts.size() != 3)
        throw ConfigError("grid '" + text + "' must be start:step:stop");
    return threshold_grid(parts[0], parts[2], parts[1]);
}

std::string manifest_name(const DetectionSample& s, const fs::path& manifest)
{
    std::error_code ec;
    const auto rel = fs::relative(s.image, manifest.parent_path().empty() ? fs::path(".") : manifest.parent_path(), ec);
    return (!ec && !rel.empty() ? rel : s.image).generic_string();
}

// ---- train -----------------------------------------------------------------

std::vector<Param> train_params()
{
    std::vector<Param> p = {
        {"manifest", "manifest", "", "training manifest CSV"},
        {"out", "out", "", "output directory"},
        {"solver", "solver", "lc-lcf", "mccf or lc-lcf"},
        {"seed", "seed", 0, "seed for the training order shuffle"},
        {"shuffle", "shuffle", true, "shuffle the training order before solving"},
        {"lambda", "lambda", 1e-4, "ridge regulariser"},
        {"response.variance", "response-variance", 2.0, "desired response variance in cells"},
        {"lc_lcf.maxiter", "maxiter", 12, "outer iterations"},
        {"lc_lcf.sigma0", "sigma0", 0.25, "initial penalty"},
        {"lc_lcf.eta", "eta", 0.7, "penalty decrease ratio"},
        {"lc_lcf.initial_fraction", "initial-fraction", 0.5, "fraction of samples in the initial subset"},
    };
    for (auto& f : feature_params("hog", 5, 5, 5))
        p.push_back(f);
    return p;
}

int cmd_train(const json& cfg)
{
    const fs::path manifest = need_path(cfg, "manifest");
    const auto solver = cfg.at("solver").get<std::string>();
    if (solver != "mccf" && solver != "lc-lcf")
        throw ConfigError("solver must be mccf or lc-lcf, got '" + solver + "'");
    const FeatureConfig feature = feature_from(cfg);
    const ResponseConfig response{cfg.at("response.variance").get<double>()};
    if (!(response.variance > 0.0))
        throw ConfigError("response variance must be positive");
    LcLcfConfig lc;
    lc.maxiter = get_int(cfg, "lc_lcf.maxiter");
    lc.sigma0 = cfg.at("lc_lcf.sigma0").get<double>();
    lc.eta = cfg.at("lc_lcf.eta").get<double>();
    lc.lambda = cfg.at("lambda").get<double>();
    lc.initial_fraction = cfg.at("lc_lcf.initial_fraction").get<double>();
    if (solver == "lc-lcf")
        lc.validate();
    if (!(lc.lambda >= 0.0))
        throw ConfigError("lambda must be non-negative");
    const fs::path out = prepare_out(cfg);
    write_json(out / "config.json", cfg);

    auto samples = load_detection_corpus(manifest);
    if (samples.empty())
        throw DataError("training manifest " + manifest.string() + " has no samples");
    if (cfg.at("shuffle").get<bool>())
        seeded_shuffle(samples, get_seed(cfg));

    TrainingSet set;
    set.lambda = lc.lambda;
    int width = 0, height = 0;
    for (const auto& s : samples) {
        const ImagePlane img = s.load();
        if (set.samples.empty()) {
            width = img.width();
            height = img.height();
        } else if (img.width() != width || img.height() != height) {
            throw DataError("training image " + s.image.string() + " is " + std::to_string(img.width()) + "x" +
                            std::to_string(img.height()) + ", expected " + std::to_string(width) + "x" +
                            std::to_string(height));
        }
        set.samples.push_back(make_training_sample(img, s.peak, feature, response));
    }

    FilterSpectrum filter;
    std::vector<LcLcfIteration> trace;
    if (solver == "mccf") {
        filter = solve_mccf(set);
    } else {
        auto result = solve_lc_lcf(set, lc);
        filter = std::move(result.filter);
        trace = std::move(result.trace);
    }
    filter.feature = feature;
    filter.response = response;
    save_model(out / "model.lccf", filter);

    std::ofstream tr(out / "trace.csv", std::ios::binary);
    if (!tr)
        throw DataError("cannot write trace.csv");
    tr << "iteration,epsilon,sigma,subset_size\n";
    for (const auto& it : trace)
        tr << it.iteration << ',' << format_double(it.epsilon) << ',' << format_double(it.sigma) << ','
           << it.subset_size << '\n';
    tr.close();

    json summary = {
        {"command", "train"},
        {"solver", solver},
        {"samples", set.samples.size()},
        {"channels", filter.num_channels()},
        {"width", filter.width()},
        {"height", filter.height()},
        {"iterations", trace.size()},
        {"objective", linear_objective(set, filter, lc.lambda)},
        {"outputs", {"model.lccf", "trace.csv"}},
    };
    write_json(out / "summary.json", summary);
    return exit_ok;
}

// ---- detect ----------------------------------------------------------------

std::vector<Param> detect_params()
{
    return {
        {"model", "model", "", "model file from train"},
        {"manifest", "manifest", "", "test manifest CSV"},
        {"out", "out", "", "output directory"},
    };
}

int cmd_detect(const json& cfg)
{
    const fs::path manifest = need_path(cfg, "manifest");
    const fs::path model_path = need_path(cfg, "model");
    const fs::path out = prepare_out(cfg);
    write_json(out / "config.json", cfg);

    const FilterSpectrum filter = load_model(model_path);
    const auto samples = load_detection_corpus(manifest);

    std::ofstream csv(out / "detections.csv", std::ios::binary);
    if (!csv)
        throw DataError("cannot write detections.csv");
    csv << "image,pred_row,pred_col,score\n";
    for (const auto& s : samples) {
        const Detection d = detect_in_image(filter, s.load());
        csv << manifest_name(s, manifest) << ',' << format_double(d.row) << ',' << format_double(d.col) << ','
            << format_double(d.score) << '\n';
    }
    csv.close();

    write_json(out / "summary.json", {{"command", "detect"},
                                      {"images", samples.size()},
                                      {"feature", filter.feature.descriptor()},
                                      {"outputs", {"detections.csv"}}});
    return exit_ok;
}

struct DetectionRow {
    std::string image;
    double row = 0.0;
    double col = 0.0;
    double score = 0.0;
};

std::vector<DetectionRow> read_detections(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open detections " + path.string());
    std::vector<DetectionRow> rows;
    std::string line;
    int line_no = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (!header) {
            if (line != "image,pred_row,pred_col,score")
                throw DataError(where + ": expected header image,pred_row,pred_col,score");
            header = true;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ','))
            f.push_back(tok);
        if (f.size() != 4)
            throw DataError(where + ": expected 4 columns");
        DetectionRow r;
        r.image = f[0];
        try {
            r.row = std::stod(f[1]);
            r.col = std::stod(f[2]);
            r.score = std::stod(f[3]);
        } catch (const std::exception&) {
            throw DataError(where + ": malformed number");
        }
        rows.push_back(r);
    }
    if (!header)
        throw DataError(path.string() + ": missing header");
    return rows;
}

// ---- eval-detect -----------------------------------------------------------

std::vector<Param> eval_detect_params()
{
    return {
        {"detections", "detections", "", "detections CSV from detect"},
        {"manifest", "manifest", "", "manifest with the ground truth"},
        {"out", "out", "", "output directory"},
        {"tau_grid", "tau-grid", "0.02:0.02:0.3", "interocular thresholds start:step:stop"},
        {"pixel_grid", "pixel-grid", "1:1:20", "pixel thresholds used without eye landmarks"},
    };
}

int cmd_eval_detect(const json& cfg)
{
    const fs::path manifest = need_path(cfg, "manifest");
    const fs::path det_path = need_path(cfg, "detections");
    const auto taus = parse_grid(cfg.at("tau_grid").get<std::string>());
    const auto pixels = parse_grid(cfg.at("pixel_grid").get<std::string>());
    const fs::path out = prepare_out(cfg);
    write_json(out / "config.json", cfg);

    const auto samples = load_detection_corpus(manifest);
    const auto rows = read_detections(det_path);
    if (rows.size() != samples.size())
        throw DataError("detections have " + std::to_string(rows.size()) + " rows, manifest has " +
                        std::to_string(samples.size()));
    if (samples.empty())
        throw DataError("nothing to evaluate: empty manifest");

    const bool eyes = std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.eyes.has_value(); });
    std::vector<double> dist, dev;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& s = samples[i];
        if (rows[i].image != manifest_name(s, manifest))
            throw DataError("detection row " + std::to_string(i + 1) + " is for '" + rows[i].image +
                            "', manifest has '" + manifest_name(s, manifest) + "'");
        const Point2 pred{rows[i].row, rows[i].col};
        const Point2 truth{static_cast<double>(s.peak.row), static_cast<double>(s.peak.col)};
        dev.push_back(pixel_deviation(pred, truth));
        if (eyes)
            dist.push_back(interocular_distance(
                pred, truth, {double(s.eyes->left.row), double(s.eyes->left.col)},
                {double(s.eyes->right.row), double(s.eyes->right.col)}));
    }

    json summary = {{"command", "eval-detect"}, {"images", samples.size()}, {"outputs", {"curves.csv"}}};
    std::vector<Curve> curves;
    CurveMetadata meta;
    double mean_dev = 0.0;
    for (double d : dev)
        mean_dev += d;
    mean_dev /= static_cast<double>(dev.size());
    summary["mean_pixel_deviation"] = mean_dev;
    meta["mean_pixel_deviation"] = format_double(mean_dev);
    if (eyes) {
        curves.push_back(localization_curve(dist, taus));
        summary["normalizer"] = "interocular";
        const auto at = std::find_if(taus.begin(), taus.end(), [](double t) { return std::abs(t - 0.1) < 1e-9; });
        if (at != taus.end()) {
            const double r = curves.back().values[static_cast<std::size_t>(at - taus.begin())];
            summary["localization_rate_at_0.1"] = r;
            meta["localization_rate_at_0.1"] = format_double(r);
        }
    } else {
        curves.push_back(localization_curve(dev, pixels));
        summary["normalizer"] = "pixel";
    }
    meta["normalizer"] = summary["normalizer"].get<std::string>();
    emit_curves(curves, out / "curves.csv", meta);
    write_json(out / "summary.json", summary);
    return exit_ok;
}

// ---- track -----------------------------------------------------------------

std::vector<Param> track_params()
{
    const TrackerConfig d;
    std::vector<Param> p = {
        {"sequence", "sequence", "", "sequence directory (frames in it or in img/)"},
        {"out", "out", "", "output directory"},
        {"tracker", "tracker", "lc-kcf", "kcf or lc-kcf"},
        {"ground_truth", "ground-truth", "", "ground truth file; defaults to groundtruth_rect.txt in the sequence"},
        {"init", "init", "", "initial box x,y,w,h (1-based); overrides the ground truth"},
        {"seed", "seed", 0, "recorded for reproducibility; tracking is deterministic"},
        {"tracker.lambda", "lambda", d.lambda, "ridge regulariser"},
        {"tracker.sigma0", "sigma0", d.sigma0, "initial penalty"},
        {"tracker.c", "c", d.c, "penalty growth factor"},
        {"tracker.history", "history", d.history, "latent history length T; 0 disables it"},
        {"tracker.padding", "padding", d.padding, "search window padding"},
        {"tracker.kernel_sigma", "kernel-sigma", d.kernel_sigma, "Gaussian kernel bandwidth"},
        {"tracker.rho", "rho", d.rho, "template interpolation rate"},
        {"tracker.output_sigma_factor", "output-sigma-factor", d.output_sigma_factor, "label bandwidth factor"},
        {"tracker.kernel_norm", "kernel-norm", "per_element", "none or per_element"},
    };
    for (auto& f : feature_params("hog", d.feature.orientations, d.feature.cell_width, d.feature.block_width))
        p.push_back(f);
    return p;
}

BBox parse_box(const std::string& text)
{
    std::vector<int> v;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stoi(tok, &used));
            if (used != tok.size())
                v.clear();
        } catch (const std::exception&) {
            v.clear();
        }
        if (v.empty())
            break;
    }
    if (v.size() != 4)
        throw ConfigError("--init must be x,y,w,h, got '" + text + "'");
    return {v[0] - 1, v[1] - 1, v[2], v[3]};
}

fs::path default_ground_truth(const fs::path& seq)
{
    for (const char* name : {"groundtruth_rect.txt", "groundtruth.txt"})
        if (fs::exists(seq / name))
            return seq / name;
    return {};
}

int cmd_track(json cfg)
{
    const fs::path seq = need_path(cfg, "sequence");
    const auto tracker = cfg.at("tracker").get<std::string>();
    TrackerConfig tc;
    if (tracker == "kcf") {
        tc.mode = TrackerMode::kcf;
        cfg["tracker.sigma0"] = 0.0;
        cfg["tracker.history"] = 0;
    } else if (tracker == "lc-kcf") {
        tc.mode = TrackerMode::lc_kcf;
    } else {
        throw ConfigError("tracker must be kcf or lc-kcf, got '" + tracker + "'");
    }
    tc.lambda = cfg.at("tracker.lambda").get<double>();
    tc.sigma0 = cfg.at("tracker.sigma0").get<double>();
    tc.c = cfg.at("tracker.c").get<double>();
    tc.history = get_int(cfg, "tracker.history");
    tc.padding = cfg.at("tracker.padding").get<double>();
    tc.kernel_sigma = cfg.at("tracker.kernel_sigma").get<double>();
    tc.rho = cfg.at("tracker.rho").get<double>();
    tc.output_sigma_factor = cfg.at("tracker.output_sigma_factor").get<double>();
    const auto norm = cfg.at("tracker.kernel_norm").get<std::string>();
    if (norm == "none")
        tc.kernel_norm = KernelNormalization::none;
    else if (norm == "per_element")
        tc.kernel_norm = KernelNormalization::per_element;
    else
        throw ConfigError("kernel-norm must be none or per_element");
    tc.feature = feature_from(cfg);
    tc.validate();
    get_seed(cfg);

    BBox init;
    const auto init_text = cfg.at("init").get<std::string>();
    if (!init_text.empty()) {
        init = parse_box(init_text);
    } else {
        fs::path gt = cfg.at("ground_truth").get<std::string>();
        if (gt.empty())
            gt = default_ground_truth(seq);
        if (gt.empty())
            throw DataError("no ground truth in " + seq.string() + " and no --init box");
        cfg["ground_truth"] = gt.string();
        const auto boxes = read_ground_truth(gt);
        if (boxes.empty())
            throw DataError("ground truth " + gt.string() + " is empty");
        init = boxes.front();
    }

    const fs::path out = prepare_out(cfg);
    write_json(out / "config.json", cfg);

    const auto paths = list_sequence_frames(seq);
    if (paths.empty())
        throw DataError("no image frames in " + seq.string());
    std::vector<ImagePlane> frames;
    frames.reserve(paths.size());
    for (const auto& p : paths)
        frames.push_back(load_image(p));
    for (const auto& f : frames)
        if (f.width() != frames.front().width() || f.height() != frames.front().height())
            throw DataError("sequence frames differ in size");

    const auto records = track_sequence(frames, init, tc);
    write_track_csv(out / "boxes.csv", records);
    write_json(out / "summary.json", {{"command", "track"},
                                      {"tracker", tracker},
                                      {"frames", records.size()},
                                      {"final_sigma", records.back().sigma},
                                      {"outputs", {"boxes.csv"}}});
    return exit_ok;
}

// ---- eval-track ------------------------------------------------------------

std::vector<Param> eval_track_params()
{
    return {
        {"boxes", "boxes", "", "boxes CSV from track"},
        {"ground_truth", "ground-truth", "", "ground truth file, or a sequence directory holding one"},
        {"out", "out", "", "output directory"},
        {"label", "label", "", "free-form attribute tag copied into the outputs"},
    };
}

int cmd_eval_track(const json& cfg)
{
    const fs::path boxes_path = need_path(cfg, "boxes");
    fs::path gt = need_path(cfg, "ground_truth");
    if (fs::is_directory(gt)) {
        const fs::path found = default_ground_truth(gt);
        if (found.empty())
            throw DataError("no ground truth file in " + gt.string());
        gt = found;
    }
    const fs::path out = prepare_out(cfg);
    write_json(out / "config.json", cfg);

    const auto records = read_track_csv(boxes_path);
    const auto truth = read_ground_truth(gt);
    if (records.size() != truth.size())
        throw DataError("boxes have " + std::to_string(records.size()) + " frames, ground truth has " +
                        std::to_string(truth.size()));
    std::vector<BBox> pred;
    for (const auto& r : records)
        pred.push_back(r.bbox);

    const Curve precision = precision_curve(pred, truth, threshold_grid(1.0, 50.0, 1.0));
    const SuccessResult success = success_curve(pred, truth, threshold_grid(0.0, 1.0, 0.05));
    const double p20 = precision.values[19];
    const double mce = mean_center_error(pred, truth);

    CurveMetadata meta{{"precision_at_20px", format_double(p20)},
                       {"success_auc", format_double(success.auc)},
                       {"mean_center_error", format_double(mce)},
                       {"frames", std::to_string(pred.size())}};
    const auto label = cfg.at("label").get<std::string>();
    if (!label.empty())
        meta["label"] = label;
    emit_curves({precision, success.curve}, out / "curves.csv", meta);

    json summary = {{"command", "eval-track"},
                    {"frames", pred.size()},
                    {"precision_at_20px", p20},
                    {"success_auc", success.auc},
                    {"mean_center_error", mce},
                    {"outputs", {"curves.csv"}}};
    if (!label.empty())
        summary["label"] = label;
    write_json(out / "summary.json", summary);
    return exit_ok;
}

// ---- corrupt ---------------------------------------------------------------

std::vector<Param> corrupt_params()
{
    return {
        {"manifest", "manifest", "", "clean manifest CSV"},
        {"out", "out", "", "output directory"},
        {"seed", "seed", 0, "base seed; image i uses a seed derived from (seed, i)"},
        {"corruption.kind", "kind", "noise", "noise or occlusion"},
        {"corruption.variance", "variance", 0.1, "Gaussian noise variance on [0,1] intensities"},
        {"corruption.fraction", "fraction", 0.1, "occluded fraction of the image area"},
    };
}

int cmd_corrupt(const json& cfg)
{
    const fs::path manifest = need_path(cfg, "manifest");
    CorruptionSpec spec;
    const auto kind = cfg.at("corruption.kind").get<std::string>();
    if (kind == "noise")
        spec.kind = CorruptionKind::gaussian_noise;
    else if (kind == "occlusion")
        spec.kind = CorruptionKind::occlusion;
    else
        throw ConfigError("corruption kind must be noise or occlusion, got '" + kind + "'");
    spec.noise_variance = cfg.at("corruption.variance").get<double>();
    spec.occlusion_fraction = cfg.at("corruption.fraction").get<double>();
    spec.validate();
    const std::uint64_t seed = get_seed(cfg);
    const fs::path out = prepare_out(cfg);
    write_json(out / "config.json", cfg);

    const auto samples = load_detection_corpus(manifest);
    fs::create_directories(out / "images");
    std::vector<DetectionSample> merged = samples;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CorruptionSpec s = spec;
        s.rng_seed = derive_seed(seed, i);
        const ImagePlane img = apply_corruption(samples[i].load(), s);
        char name[32];
        std::snprintf(name, sizeof name, "%05zu_%s.png", i, kind.c_str());
        DetectionSample c = samples[i];
        c.image = out / "images" / name;
        save_image(c.image, img);
        merged.push_back(std::move(c));
    }
    write_detection_manifest(out / "manifest.csv", merged);
    write_json(out / "summary.json", {{"command", "corrupt"},
                                      {"clean", samples.size()},
                                      {"corrupted", samples.size()},
                                      {"rows", merged.size()},
                                      {"outputs", {"manifest.csv", "images"}}});
    return exit_ok;
}

// ---- synth -----------------------------------------------------------------

std::vector<Param> synth_params()
{
    const MotionSpec m;
    return {
        {"kind", "kind", "detect", "detect or track"},
        {"out", "out", "", "output directory"},
        {"seed", "seed", 0, "base seed"},
        {"detect.n", "n", 10, "number of detection images"},
        {"detect.width", "width", 128, "detection image width"},
        {"detect.height", "height", 128, "detection image height"},
        {"track.frames", "frames", 100, "sequence length"},
        {"track.frame_width", "frame-width", m.frame_width, "frame width"},
        {"track.frame_height", "frame-height", m.frame_height, "frame height"},
        {"track.x0", "x0", m.x0, "initial top-left column (0-based)"},
        {"track.y0", "y0", m.y0, "initial top-left row (0-based)"},
        {"track.target_width", "target-width", m.target_width, "target width"},
        {"track.target_height", "target-height", m.target_height, "target height"},
        {"track.vx", "vx", m.vx, "horizontal velocity in pixels per frame"},
        {"track.vy", "vy", m.vy, "vertical velocity in pixels per frame"},
        {"track.amplitude_x", "amplitude-x", m.amplitude_x, "sinusoidal horizontal amplitude"},
        {"track.amplitude_y", "amplitude-y", m.amplitude_y, "sinusoidal vertical amplitude"},
        {"track.period", "period", m.period, "sinusoid period in frames"},
        {"track.noise_variance", "noise-variance", 0.0, "per-frame Gaussian noise variance"},
        {"track.occlusion_first", "occlusion-first", -1, "first occluded frame (0-based); negative disables"},
        {"track.occlusion_last", "occlusion-last", -1, "last occluded frame (0-based)"},
        {"track.occlusion_fraction", "occlusion-fraction", 0.5, "occluded fraction of the target width"},
    };
}

int cmd_synth(const json& cfg)
{
    const auto kind = cfg.at("kind").get<std::string>();
    if (kind != "detect" && kind != "track")
        throw ConfigError("synth kind must be detect or track, got '" + kind + "'");
    const std::uint64_t seed = get_seed(cfg);

    if (kind == "detect") {
        const int n = get_int(cfg, "detect.n");
        const int w = get_int(cfg, "detect.width");
        const int h = get_int(cfg, "detect.height");
        const auto images = synth_detection_corpus(n, w, h, seed);
        const fs::path out = prepare_out(cfg);
        write_json(out / "config.json", cfg);
        fs::create_directories(out / "images");
        std::vector<DetectionSample> samples;
        for (std::size_t i = 0; i < images.size(); ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "face_%05zu.png", i);
            const fs::path p = out / "images" / name;
            save_image(p, images[i].image);
            samples.push_back({p, images[i].target, images[i].eyes});
        }
        write_detection_manifest(out / "manifest.csv", samples);
        write_json(out / "summary.json",
                   {{"command", "synth"}, {"kind", kind}, {"images", n}, {"outputs", {"manifest.csv", "images"}}});
        return exit_ok;
    }

    MotionSpec m;
    m.frame_width = get_int(cfg, "track.frame_width");
    m.frame_height = get_int(cfg, "track.frame_height");
    m.x0 = get_int(cfg, "track.x0");
    m.y0 = get_int(cfg, "track.y0");
    m.target_width = get_int(cfg, "track.target_width");
    m.target_height = get_int(cfg, "track.target_height");
    m.vx = cfg.at("track.vx").get<double>();
    m.vy = cfg.at("track.vy").get<double>();
    m.amplitude_x = cfg.at("track.amplitude_x").get<double>();
    m.amplitude_y = cfg.at("track.amplitude_y").get<double>();
    m.period = cfg.at("track.period").get<double>();
    if (!(m.period > 0.0))
        throw ConfigError("period must be positive");
    OcclusionEvent occ;
    occ.first_frame = get_int(cfg, "track.occlusion_first");
    occ.last_frame = get_int(cfg, "track.occlusion_last");
    occ.fraction = cfg.at("track.occlusion_fraction").get<double>();
    const int frames = get_int(cfg, "track.frames");
    const auto seq = synth_tracking_sequence(frames, m, occ, seed, cfg.at("track.noise_variance").get<double>());

    const fs::path out = prepare_out(cfg);
    write_json(out / "config.json", cfg);
    fs::create_directories(out / "img");
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "%04zu.png", i + 1);
        save_image(out / "img" / name, seq.frames[i]);
    }
    write_ground_truth(out / "groundtruth_rect.txt", seq.boxes);
    write_json(out / "summary.json", {{"command", "synth"},
                                      {"kind", kind},
                                      {"frames", frames},
                                      {"outputs", {"img", "groundtruth_rect.txt"}}});
    return exit_ok;
}

}  // namespace

int run_cli(int argc, const char* const* argv)
{
    CLI::App app{"Latent-constrained correlation filters: training, detection, tracking and evaluation"};
    app.require_subcommand(1);

    struct Command {
        CLI::App* app;
        std::unique_ptr<Resolver> resolver;
        std::function<int(const json&)> run;
    };
    std::vector<Command> commands;
    auto add = [&](const char* name, const char* help, std::vector<Param> params, std::function<int(const json&)> run) {
        CLI::App* sub = app.add_subcommand(name, help);
        commands.push_back({sub, std::make_unique<Resolver>(sub, std::move(params)), std::move(run)});
    };
    add("train", "train an MCCF or LC-LCF detector from a manifest", train_params(), cmd_train);
    add("detect", "run a trained detector over a manifest", detect_params(), cmd_detect);
    add("eval-detect", "localization curves for detections", eval_detect_params(), cmd_eval_detect);
    add("track", "track a target through an image sequence", track_params(), [](const json& c) { return cmd_track(c); });
    add("eval-track", "precision and success curves for a tracked sequence", eval_track_params(), cmd_eval_track);
    add("corrupt", "noisy or occluded copies of a corpus plus a merged manifest", corrupt_params(), cmd_corrupt);
    add("synth", "generate a synthetic detection corpus or tracking sequence", synth_params(), cmd_synth);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "lccf: " << e.what() << '\n';
        return exit_config;
    }

    try {
        for (auto& c : commands)
            if (c.app->parsed())
                return c.run(c.resolver->resolve());
    } catch (const ConfigError& e) {
        std::cerr << "lccf: configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const DataError& e) {
        std::cerr << "lccf: data error: " << e.what() << '\n';
        return exit_data;
    } catch (const NumericError& e) {
        std::cerr << "lccf: numerical failure: " << e.what() << '\n';
        return exit_numeric;
    } catch (const json::exception& e) {
        std::cerr << "lccf: configuration error: " << e.what() << '\n';
        return exit_config;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "lccf: data error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "lccf: " << e.what() << '\n';
        return 1;
    }
    return exit_config;
}

}  // namespace lccf

#include "lccf/cli.hpp"
#include "lccf/datasets.hpp"
#include "lccf/error.hpp"
#include "lccf/features.hpp"
#include "lccf/kernel_cf.hpp"
#include "lccf/linear_cf.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace lccf;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ImagePlane to_plane(const RealArray& a)
{
    if (a.ndim() != 2)
        throw ConfigError("expected a 2-D array");
    const auto h = static_cast<int>(a.shape(0));
    const auto w = static_cast<int>(a.shape(1));
    return ImagePlane(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

RealArray from_plane(const ImagePlane& p)
{
    RealArray out({p.height(), p.width()});
    std::copy(p.values().begin(), p.values().end(), out.mutable_data());
    return out;
}

Spectrum to_spectrum(const ComplexArray& a)
{
    if (a.ndim() != 2)
        throw ConfigError("expected a 2-D array");
    return Spectrum(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)),
                    std::vector<Complex>(a.data(), a.data() + a.size()));
}

ComplexArray from_spectrum(const Spectrum& s)
{
    ComplexArray out({s.height(), s.width()});
    std::copy(s.values().begin(), s.values().end(), out.mutable_data());
    return out;
}

FeatureConfig feature_config(const std::string& kind, int orientations, int cell, int block)
{
    if (kind == "gray")
        return FeatureConfig::gray();
    if (kind == "hog")
        return FeatureConfig::hog(orientations, cell, block);
    throw ConfigError("feature kind must be gray or hog, got '" + kind + "'");
}

// (K, H, W) complex array of the filter spectra.
ComplexArray filter_array(const FilterSpectrum& f)
{
    ComplexArray out({f.num_channels(), f.height(), f.width()});
    Complex* dst = out.mutable_data();
    for (const auto& ch : f.channels)
        dst = std::copy(ch.values().begin(), ch.values().end(), dst);
    return out;
}

BBox to_box(const std::array<int, 4>& b)
{
    return {b[0], b[1], b[2], b[3]};
}

}  // namespace

PYBIND11_MODULE(_lccf, m)
{
    m.doc() = "Latent-constrained correlation filters";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def("fft2", [](const RealArray& a) { return from_spectrum(fft2(to_plane(a))); },
          "Unnormalised 2-D DFT of a real array.");
    m.def("ifft2", [](const ComplexArray& a) { return from_plane(ifft2(to_spectrum(a))); },
          "Inverse DFT (1/(W*H) scaling); rejects spectra that are not Hermitian.");
    m.def(
        "gaussian_response",
        [](int width, int height, int row, int col, double variance) {
            return from_plane(gaussian_response(width, height, {row, col}, variance).plane);
        },
        py::arg("width"), py::arg("height"), py::arg("row"), py::arg("col"), py::arg("variance") = 2.0);

    m.def(
        "extract_features",
        [](const RealArray& image, const std::string& kind, int orientations, int cell, int block) {
            const FeatureMap f = extract_features(to_plane(image), feature_config(kind, orientations, cell, block));
            RealArray out({f.num_channels(), f.rows(), f.cols()});
            double* dst = out.mutable_data();
            for (const auto& ch : f.channels)
                dst = std::copy(ch.values().begin(), ch.values().end(), dst);
            return out;
        },
        py::arg("image"), py::arg("kind") = "hog", py::arg("orientations") = 5, py::arg("cell") = 5,
        py::arg("block") = 5, "Feature stack of shape (channels, rows, cols).");

    py::class_<FilterSpectrum>(m, "Filter")
        .def_property_readonly("spectra", &filter_array)
        .def_property_readonly("descriptor", [](const FilterSpectrum& f) { return f.feature.descriptor(); })
        .def("save", [](const FilterSpectrum& f, const std::filesystem::path& p) { save_model(p, f); })
        .def(
            "detect",
            [](const FilterSpectrum& f, const RealArray& image) {
                const Detection d = detect_in_image(f, to_plane(image));
                return py::make_tuple(d.row, d.col, d.score);
            },
            "Returns (row, col, score) of the response peak in image pixels.")
        .def("response", [](const FilterSpectrum& f, const RealArray& image) {
            const FeatureMap fm = extract_features(normalize_image(to_plane(image)), f.feature);
            return from_plane(apply_filter(f, fm));
        });
    m.def("load_model", [](const std::filesystem::path& p) { return load_model(p); });

    m.def(
        "train_detector",
        [](const std::vector<RealArray>& images, const std::vector<std::pair<int, int>>& peaks,
           const std::string& solver, double lambda, const std::string& feature, int orientations, int cell,
           int block, double variance, int maxiter, double initial_fraction) {
            if (images.size() != peaks.size())
                throw ConfigError("images and peaks differ in length");
            const FeatureConfig fc = feature_config(feature, orientations, cell, block);
            const ResponseConfig rc{variance};
            TrainingSet set;
            set.lambda = lambda;
            for (std::size_t i = 0; i < images.size(); ++i)
                set.samples.push_back(
                    make_training_sample(to_plane(images[i]), {peaks[i].first, peaks[i].second}, fc, rc));
            FilterSpectrum f;
            if (solver == "mccf") {
                f = solve_mccf(set);
            } else if (solver == "lc-lcf") {
                LcLcfConfig cfg;
                cfg.lambda = lambda;
                cfg.maxiter = maxiter;
                cfg.initial_fraction = initial_fraction;
                f = solve_lc_lcf(set, cfg).filter;
            } else {
                throw ConfigError("solver must be mccf or lc-lcf, got '" + solver + "'");
            }
            f.feature = fc;
            f.response = rc;
            return f;
        },
        py::arg("images"), py::arg("peaks"), py::arg("solver") = "lc-lcf", py::arg("lambda_") = 1e-4,
        py::arg("feature") = "hog", py::arg("orientations") = 5, py::arg("cell") = 5, py::arg("block") = 5,
        py::arg("variance") = 2.0, py::arg("maxiter") = 12, py::arg("initial_fraction") = 0.5,
        "Train on images with one (row, col) target each, in the given order.");

    m.def(
        "track",
        [](const std::vector<RealArray>& frames, const std::array<int, 4>& init, const std::string& tracker,
           const std::string& feature, int orientations, int cell, int block, double lambda, double sigma0,
           int history) {
            TrackerConfig cfg;
            if (tracker == "kcf") {
                cfg.mode = TrackerMode::kcf;
                sigma0 = 0.0;
                history = 0;
            } else if (tracker != "lc-kcf") {
                throw ConfigError("tracker must be kcf or lc-kcf, got '" + tracker + "'");
            }
            cfg.feature = feature_config(feature, orientations, cell, block);
            cfg.lambda = lambda;
            cfg.sigma0 = sigma0;
            cfg.history = history;
            std::vector<ImagePlane> planes;
            for (const auto& f : frames)
                planes.push_back(to_plane(f));
            std::vector<TrackRecord> recs;
            {
                py::gil_scoped_release release;
                recs = track_sequence(planes, to_box(init), cfg);
            }
            py::array_t<int> boxes({static_cast<py::ssize_t>(recs.size()), py::ssize_t{4}});
            py::array_t<double> scores(static_cast<py::ssize_t>(recs.size()));
            auto b = boxes.mutable_unchecked<2>();
            auto s = scores.mutable_unchecked<1>();
            for (std::size_t i = 0; i < recs.size(); ++i) {
                const auto& r = recs[i];
                b(i, 0) = r.bbox.x;
                b(i, 1) = r.bbox.y;
                b(i, 2) = r.bbox.w;
                b(i, 3) = r.bbox.h;
                s(i) = r.score;
            }
            return py::make_tuple(boxes, scores);
        },
        py::arg("frames"), py::arg("init"), py::arg("tracker") = "lc-kcf", py::arg("feature") = "hog",
        py::arg("orientations") = 5, py::arg("cell") = 4, py::arg("block") = 4, py::arg("lambda_") = 1e-4,
        py::arg("sigma0") = 1e-4, py::arg("history") = 16,
        "Track from a 0-based (x, y, w, h) box; returns (boxes[N, 4], peak_scores[N]).");

    m.def(
        "synth_detection_corpus",
        [](int n, int width, int height, std::uint64_t seed) {
            py::list out;
            for (const auto& s : synth_detection_corpus(n, width, height, seed))
                out.append(py::make_tuple(from_plane(s.image), py::make_tuple(s.target.row, s.target.col),
                                          py::make_tuple(s.eyes.left.row, s.eyes.left.col)));
            return out;
        },
        py::arg("n"), py::arg("width") = 128, py::arg("height") = 128, py::arg("seed") = 0,
        "List of (image, (row, col) target, (row, col) left eye).");

    m.def(
        "synth_tracking_sequence",
        [](int frames, std::uint64_t seed, int occlusion_first, int occlusion_last, double occlusion_fraction,
           double noise_variance) {
            const SynthSequence s = synth_tracking_sequence(
                frames, MotionSpec{}, {occlusion_first, occlusion_last, occlusion_fraction}, seed, noise_variance);
            py::list planes;
            for (const auto& f : s.frames)
                planes.append(from_plane(f));
            py::array_t<int> boxes({static_cast<py::ssize_t>(s.boxes.size()), py::ssize_t{4}});
            auto b = boxes.mutable_unchecked<2>();
            for (std::size_t i = 0; i < s.boxes.size(); ++i) {
                b(i, 0) = s.boxes[i].x;
                b(i, 1) = s.boxes[i].y;
                b(i, 2) = s.boxes[i].w;
                b(i, 3) = s.boxes[i].h;
            }
            return py::make_tuple(planes, boxes);
        },
        py::arg("frames") = 100, py::arg("seed") = 0, py::arg("occlusion_first") = -1,
        py::arg("occlusion_last") = -1, py::arg("occlusion_fraction") = 0.5, py::arg("noise_variance") = 0.0,
        "Returns (frames, boxes[N, 4]) with 0-based boxes.");

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "lccf");
            std::vector<const char*> argv;
            for (const auto& a : args)
                argv.push_back(a.c_str());
            return run_cli(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"), "Run a command-line invocation in-process and return its exit code.");
}

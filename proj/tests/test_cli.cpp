#include "oracles.hpp"

#include "lccf/cli.hpp"
#include "lccf/datasets.hpp"
#include "lccf/linear_cf.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace lccf;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int run(std::vector<std::string> args)
{
    args.insert(args.begin(), "lccf");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

json read_json(const fs::path& p)
{
    std::ifstream in(p);
    return json::parse(in);
}

std::vector<std::string> lines(const fs::path& p)
{
    std::istringstream in(oracle::slurp(p));
    std::vector<std::string> out;
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

int run_tool(const std::string& args)
{
    const std::string cmd = std::string("\"") + LCCF_TOOL_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("argument errors exit with the configuration code")
{
    CHECK(run({}) == exit_config);
    CHECK(run({"bogus"}) == exit_config);
    CHECK(run({"synth", "--no-such-flag", "1"}) == exit_config);
    CHECK(run({"synth", "--help"}) == exit_ok);
    CHECK(run({"synth", "--kind", "video", "--out", oracle::scratch_dir("cli_bad").string()}) == exit_config);
    CHECK(run({"synth", "--n", "abc", "--out", oracle::scratch_dir("cli_bad2").string()}) == exit_config);
    CHECK(run({"train", "--out", oracle::scratch_dir("cli_bad3").string()}) == exit_config);
}

TEST_CASE("config file layering")
{
    const auto dir = oracle::scratch_dir("cli_layers");
    std::ofstream(dir / "cfg.json") << R"({"detect.n": 3, "detect.width": 64, "detect.height": 64, "seed": 4})";
    REQUIRE(run({"synth", "--config", (dir / "cfg.json").string(), "--out", (dir / "a").string()}) == exit_ok);
    json cfg = read_json(dir / "a" / "config.json");
    CHECK(cfg["detect.n"] == 3);
    CHECK(cfg["seed"] == 4);
    CHECK(cfg["kind"] == "detect");
    CHECK(lines(dir / "a" / "manifest.csv").size() == 4);

    REQUIRE(run({"synth", "--config", (dir / "cfg.json").string(), "--n", "2", "--out", (dir / "b").string()}) ==
            exit_ok);
    CHECK(read_json(dir / "b" / "config.json")["detect.n"] == 2);
    CHECK(read_json(dir / "b" / "summary.json")["command"] == "synth");

    std::ofstream(dir / "unknown.json") << R"({"detect.m": 3})";
    CHECK(run({"synth", "--config", (dir / "unknown.json").string(), "--out", (dir / "c").string()}) == exit_config);
    std::ofstream(dir / "typed.json") << R"({"detect.n": "three"})";
    CHECK(run({"synth", "--config", (dir / "typed.json").string(), "--out", (dir / "c").string()}) == exit_config);
    std::ofstream(dir / "broken.json") << "{";
    CHECK(run({"synth", "--config", (dir / "broken.json").string(), "--out", (dir / "c").string()}) == exit_config);
}

TEST_CASE("detection pipeline end to end")
{
    const auto dir = oracle::scratch_dir("cli_detect");
    const std::string out = dir.string();
    REQUIRE(run({"synth", "--n", "8", "--width", "64", "--height", "64", "--seed", "1", "--out", out + "/corpus"}) ==
            exit_ok);
    const auto manifest = dir / "corpus" / "manifest.csv";
    const auto corpus = load_detection_corpus(manifest);
    REQUIRE(corpus.size() == 8);
    CHECK(corpus[0].eyes.has_value());

    REQUIRE(run({"corrupt", "--manifest", manifest.string(), "--kind", "noise", "--variance", "0.05", "--out",
                 out + "/noisy"}) == exit_ok);
    const auto noisy = load_detection_corpus(dir / "noisy" / "manifest.csv");
    REQUIRE(noisy.size() == 16);
    CHECK(fs::equivalent(noisy[0].image, corpus[0].image));
    CHECK(noisy[8].peak == corpus[0].peak);
    REQUIRE(run({"corrupt", "--manifest", manifest.string(), "--kind", "occlusion", "--out", out + "/occ"}) ==
            exit_ok);
    CHECK(load_detection_corpus(dir / "occ" / "manifest.csv").size() == 16);

    for (const char* solver : {"mccf", "lc-lcf"}) {
        const std::string tdir = out + "/train_" + solver;
        REQUIRE(run({"train", "--manifest", (dir / "noisy" / "manifest.csv").string(), "--solver", solver,
                     "--maxiter", "4", "--out", tdir}) == exit_ok);
        const FilterSpectrum model = load_model(tdir + "/model.lccf");
        CHECK(model.num_channels() == 5);
        CHECK(model.width() == 12);
        CHECK(model.feature == FeatureConfig::hog(5, 5, 5));
        const auto trace = lines(tdir + "/trace.csv");
        CHECK(trace[0] == "iteration,epsilon,sigma,subset_size");
        CHECK(trace.size() == (std::string(solver) == "mccf" ? 1u : 5u));
        const json summary = read_json(tdir + "/summary.json");
        CHECK(summary["samples"] == 16);
        CHECK(summary["objective"].get<double>() > 0.0);

        REQUIRE(run({"detect", "--model", tdir + "/model.lccf", "--manifest", manifest.string(), "--out",
                     tdir + "/det"}) == exit_ok);
        const auto det = lines(tdir + "/det/detections.csv");
        REQUIRE(det.size() == 9);
        CHECK(det[0] == "image,pred_row,pred_col,score");
        CHECK(det[1].rfind("images/", 0) == 0);

        REQUIRE(run({"eval-detect", "--detections", tdir + "/det/detections.csv", "--manifest", manifest.string(),
                     "--out", tdir + "/eval"}) == exit_ok);
        const json es = read_json(tdir + "/eval/summary.json");
        CHECK(es["normalizer"] == "interocular");
        const double rate = es["localization_rate_at_0.1"].get<double>();
        CHECK(rate >= 0.0);
        CHECK(rate <= 1.0);
        const auto curve = lines(tdir + "/eval/curves.csv");
        CHECK(std::count_if(curve.begin(), curve.end(), [](const std::string& l) {
                  return l.rfind("localization,", 0) == 0;
              }) == 15);
    }

    // same inputs and seed give identical model bytes
    REQUIRE(run({"train", "--manifest", (dir / "noisy" / "manifest.csv").string(), "--maxiter", "4", "--out",
                 out + "/again"}) == exit_ok);
    CHECK(oracle::slurp(dir / "again" / "model.lccf") == oracle::slurp(dir / "train_lc-lcf" / "model.lccf"));

    // eval-detect with a manifest that lacks eyes falls back to pixel deviation
    auto plain = corpus;
    for (auto& s : plain)
        s.eyes.reset();
    write_detection_manifest(dir / "corpus" / "plain.csv", plain);
    REQUIRE(run({"eval-detect", "--detections", out + "/train_mccf/det/detections.csv", "--manifest",
                 (dir / "corpus" / "plain.csv").string(), "--out", out + "/eval_plain"}) == exit_ok);
    CHECK(read_json(dir / "eval_plain" / "summary.json")["normalizer"] == "pixel");

    // a mismatched manifest is a data error
    REQUIRE(run({"eval-detect", "--detections", out + "/train_mccf/det/detections.csv", "--manifest",
                 (dir / "noisy" / "manifest.csv").string(), "--out", out + "/eval_bad"}) == exit_data);
}

TEST_CASE("tracking pipeline end to end")
{
    const auto dir = oracle::scratch_dir("cli_track");
    const std::string out = dir.string();
    REQUIRE(run({"synth", "--kind", "track", "--frames", "12", "--vx", "2", "--out", out + "/seq"}) == exit_ok);
    CHECK(fs::exists(dir / "seq" / "img" / "0001.png"));
    CHECK(fs::exists(dir / "seq" / "img" / "0012.png"));
    CHECK(read_ground_truth(dir / "seq" / "groundtruth_rect.txt").size() == 12);

    REQUIRE(run({"track", "--sequence", out + "/seq", "--tracker", "kcf", "--out", out + "/kcf"}) == exit_ok);
    const json cfg = read_json(dir / "kcf" / "config.json");
    CHECK(cfg["tracker.sigma0"] == 0.0);
    CHECK(cfg["tracker.history"] == 0);
    const auto boxes = read_track_csv(dir / "kcf" / "boxes.csv");
    REQUIRE(boxes.size() == 12);
    CHECK(boxes[0].bbox == read_ground_truth(dir / "seq" / "groundtruth_rect.txt")[0]);

    REQUIRE(run({"track", "--sequence", out + "/seq", "--init", "21,61,32,32", "--out", out + "/lc"}) == exit_ok);
    CHECK(read_track_csv(dir / "lc" / "boxes.csv")[0].bbox == BBox{20, 60, 32, 32});

    REQUIRE(run({"eval-track", "--boxes", out + "/lc/boxes.csv", "--ground-truth", out + "/seq", "--label", "smoke",
                 "--out", out + "/eval"}) == exit_ok);
    const json s = read_json(dir / "eval" / "summary.json");
    CHECK(s["frames"] == 12);
    CHECK(s["label"] == "smoke");
    CHECK(s["precision_at_20px"].get<double>() == 1.0);
    const auto curves = lines(dir / "eval" / "curves.csv");
    CHECK(std::count_if(curves.begin(), curves.end(), [](const std::string& l) {
              return l.rfind("precision,", 0) == 0;
          }) == 50);
    CHECK(std::count_if(curves.begin(), curves.end(), [](const std::string& l) {
              return l.rfind("success,", 0) == 0;
          }) == 21);

    CHECK(run({"track", "--sequence", out + "/nowhere", "--out", out + "/x"}) == exit_data);
    CHECK(run({"track", "--sequence", out + "/seq", "--init", "1,2,3", "--out", out + "/x"}) == exit_config);
    CHECK(run({"track", "--sequence", out + "/seq", "--tracker", "mosse", "--out", out + "/x"}) == exit_config);
    CHECK(run({"track", "--sequence", out + "/seq", "--init", "1,1,500,30", "--out", out + "/x"}) == exit_data);
}

TEST_CASE("numeric failures exit with code 4")
{
    const auto dir = oracle::scratch_dir("cli_numeric");
    REQUIRE(run({"synth", "--n", "1", "--width", "64", "--height", "64", "--out", dir.string()}) == exit_ok);
    CHECK(run({"train", "--manifest", (dir / "manifest.csv").string(), "--solver", "mccf", "--lambda", "0",
               "--out", (dir / "m").string()}) == exit_numeric);
}

TEST_CASE("the installed tool reports exit codes")
{
    const auto dir = oracle::scratch_dir("cli_tool");
    CHECK(run_tool("--help") == 0);
    CHECK(run_tool("") == exit_config);
    CHECK(run_tool("detect --model " + (dir / "none.lccf").string() + " --manifest " + (dir / "m.csv").string() +
                   " --out " + (dir / "o").string()) == exit_data);
    std::ofstream(dir / "bad.lccf") << "LCCX";
    std::ofstream(dir / "m.csv") << "image,peak_row,peak_col\n";
    CHECK(run_tool("detect --model " + (dir / "bad.lccf").string() + " --manifest " + (dir / "m.csv").string() +
                   " --out " + (dir / "o").string()) == exit_data);
}

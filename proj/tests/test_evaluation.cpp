#include "oracles.hpp"

#include "lccf/error.hpp"
#include "lccf/evaluation.hpp"

#include <doctest.h>

using namespace lccf;

TEST_CASE("interocular distance")
{
    CHECK(interocular_distance({0, 0}, {0, 0}, {10, 10}, {10, 50}) == 0.0);
    CHECK(interocular_distance({3, 4}, {0, 0}, {10, 10}, {10, 50}) == doctest::Approx(5.0 / 40.0).epsilon(1e-15));
    CHECK(interocular_distance({10, 14}, {10, 10}, {0, 0}, {30, 40}) == doctest::Approx(0.08));
    CHECK_THROWS_AS(interocular_distance({0, 0}, {1, 1}, {5, 5}, {5, 5}), DataError);
}

TEST_CASE("localization rate is strict")
{
    const std::vector<double> d{0.05, 0.1, 0.15, 0.3};
    CHECK(localization_rate(d, 0.1) == 0.25);
    CHECK(localization_rate(d, 0.1000001) == 0.5);
    CHECK(localization_rate(d, 1.0) == 1.0);
    CHECK(localization_rate({0.0}, 1e-9) == 1.0);
    CHECK_THROWS_AS(localization_rate({}, 0.1), DataError);
    CHECK_THROWS_AS(localization_rate(d, 0.0), ConfigError);
}

TEST_CASE("pixel deviation and threshold grids")
{
    CHECK(pixel_deviation({0, 0}, {3, 4}) == 5.0);
    CHECK(pixel_deviation({2.5, 1}, {2.5, 1}) == 0.0);

    const auto g = threshold_grid(0.02, 0.3, 0.02);
    REQUIRE(g.size() == 15);
    CHECK(g.front() == 0.02);
    CHECK(g[5] == 0.12);
    CHECK(g.back() == 0.3);
    CHECK(format_double(g[5]) == "0.12");
    CHECK(threshold_grid(1, 20, 1).size() == 20);
    CHECK(threshold_grid(0, 1, 0.05).size() == 21);
    CHECK(threshold_grid(0.5, 0.5, 0.1) == std::vector<double>{0.5});
    CHECK_THROWS_AS(threshold_grid(0, 1, 0), ConfigError);
    CHECK_THROWS_AS(threshold_grid(1, 0, 0.1), ConfigError);
}

TEST_CASE("localization curve is monotone and ends at one")
{
    Rng rng(91);
    std::vector<double> d;
    for (int i = 0; i < 200; ++i)
        d.push_back(rng.uniform(0.0, 0.25));
    const Curve c = localization_curve(d, threshold_grid(0.02, 0.3, 0.02));
    CHECK(c.kind == CurveKind::localization);
    for (std::size_t i = 1; i < c.values.size(); ++i)
        CHECK(c.values[i] >= c.values[i - 1]);
    CHECK(c.values.back() == 1.0);
    CHECK_THROWS_AS(localization_curve(d, {0.2, 0.1}), ConfigError);
}

TEST_CASE("box geometry")
{
    const BBox a{0, 0, 10, 10};
    CHECK(center_error(a, a) == 0.0);
    CHECK(center_error(a, BBox{3, 4, 10, 10}) == 5.0);
    CHECK(center_error(a, BBox{0, 0, 20, 10}) == 5.0);
    CHECK(intersection_over_union(a, a) == 1.0);
    CHECK(intersection_over_union(a, BBox{5, 0, 10, 10}) == doctest::Approx(50.0 / 150.0));
    CHECK(intersection_over_union(a, BBox{10, 0, 10, 10}) == 0.0);
    CHECK(intersection_over_union(a, BBox{2, 2, 5, 5}) == doctest::Approx(0.25));
    CHECK_THROWS_AS(intersection_over_union(a, BBox{0, 0, 0, 5}), DataError);
}

TEST_CASE("precision and success curves")
{
    const std::vector<BBox> truth{{0, 0, 10, 10}, {0, 0, 10, 10}, {0, 0, 10, 10}, {0, 0, 10, 10}};
    const std::vector<BBox> pred{{0, 0, 10, 10}, {3, 4, 10, 10}, {5, 0, 10, 10}, {40, 40, 10, 10}};
    const Curve p = precision_curve(pred, truth, {0, 4.9, 5, 20, 50, 60});
    CHECK(p.values == std::vector<double>{0.25, 0.25, 0.75, 0.75, 0.75, 1.0});

    const SuccessResult s = success_curve(pred, truth, threshold_grid(0, 1, 0.05));
    CHECK(s.curve.values.front() == 1.0);
    CHECK(s.curve.values.back() == 0.25);
    for (std::size_t i = 1; i < s.curve.values.size(); ++i)
        CHECK(s.curve.values[i] <= s.curve.values[i - 1]);
    // IoUs are 1, 42/158, 50/150, 0
    double sum = 0.0;
    for (double t : threshold_grid(0, 1, 0.05)) {
        int hits = 0;
        for (double v : {1.0, 42.0 / 158.0, 50.0 / 150.0, 0.0})
            hits += v >= t;
        sum += hits / 4.0;
    }
    CHECK(s.auc == doctest::Approx(sum / 21.0).epsilon(1e-15));

    const SuccessResult perfect = success_curve(truth, truth, {0.5});
    CHECK(perfect.auc == 1.0);

    CHECK(mean_center_error(pred, truth) == doctest::Approx((0 + 5 + 5 + std::hypot(40, 40)) / 4.0));
    CHECK_THROWS_AS(precision_curve(pred, {truth[0]}, {1}), DataError);
    CHECK_THROWS_AS(mean_center_error({}, {}), DataError);
}

TEST_CASE("curve files round trip with metadata")
{
    const auto dir = oracle::scratch_dir("eval_curves");
    Curve loc{CurveKind::localization, {0.1, 0.2, 0.3}, {0.1, 0.5, 1.0}};
    Curve prec{CurveKind::precision, {1, 2}, {0.25, 1.0 / 3.0}};
    emit_curves({prec, loc}, dir / "c.csv", {{"label", "run a"}, {"frames", "100"}});
    const std::string text = oracle::slurp(dir / "c.csv");
    CHECK(text ==
          "# frames=100\n# label=run a\nkind,threshold,value\n"
          "localization,0.1,0.1\nlocalization,0.2,0.5\nlocalization,0.3,1\n"
          "precision,1,0.25\nprecision,2,0.3333333333333333\n");

    const CurveFile f = read_curves(dir / "c.csv");
    CHECK(f.metadata.at("label") == "run a");
    REQUIRE(f.curves.size() == 2);
    CHECK(f.curves[0].kind == CurveKind::localization);
    CHECK(f.curves[0].thresholds == std::vector<double>{0.1, 0.2, 0.3});
    CHECK(f.curves[1].values[1] == 1.0 / 3.0);

    CHECK(parse_curve_kind("success") == CurveKind::success);
    CHECK_THROWS_AS(parse_curve_kind("roc"), DataError);
    CHECK_THROWS_AS(emit_curves({Curve{CurveKind::success, {1}, {}}}, dir / "bad.csv"), ConfigError);
    CHECK_THROWS_AS(read_curves(dir / "missing.csv"), DataError);
}

TEST_CASE("format_double round trips")
{
    Rng rng(92);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.normal() * std::pow(10.0, rng.uniform_int(-20, 20));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(20) == "20");
}

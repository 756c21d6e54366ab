#include "oracles.hpp"

#include "lccf/error.hpp"
#include "lccf/sadmm.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>

using namespace lccf;

namespace {

SolutionVector random_vector(std::size_t n, Rng& rng)
{
    SolutionVector v(n);
    for (auto& x : v)
        x = {rng.normal(), rng.normal()};
    return v;
}

}  // namespace

TEST_CASE("single-entry projection returns the entry")
{
    Rng rng(31);
    SubspaceHistory h;
    const SolutionVector e = random_vector(10, rng);
    h.push(e);
    for (int i = 0; i < 5; ++i)
        CHECK(project_subspace(random_vector(10, rng), h) == e);
}

TEST_CASE("equidistant entries average")
{
    SubspaceHistory h;
    h.push({Complex(1, 0), Complex(0, 0)});
    h.push({Complex(-1, 0), Complex(0, 0)});
    const SolutionVector out = project_subspace(SolutionVector{Complex(0, 0), Complex(3, 0)}, h);
    CHECK(std::abs(out[0]) < 1e-15);
    CHECK(std::abs(out[1]) < 1e-15);
}

TEST_CASE("inverse-distance weights 0.75 / 0.25")
{
    SubspaceHistory h;
    const SolutionVector h0{Complex(1, 0)};
    const SolutionVector h1{Complex(-3, 0)};
    h.push(h0);
    h.push(h1);
    const SolutionVector cur{Complex(0, 0)};
    const auto w = subspace_weights(cur, h);
    CHECK(w[0] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(w[1] == doctest::Approx(0.25).epsilon(1e-15));
    const SolutionVector out = project_subspace(cur, h);
    CHECK(out[0].real() == doctest::Approx(0.75 * 1 + 0.25 * -3).epsilon(1e-15));
}

TEST_CASE("zero-distance entry is returned verbatim")
{
    Rng rng(32);
    SubspaceHistory h;
    const SolutionVector a = random_vector(6, rng);
    h.push(random_vector(6, rng));
    h.push(a);
    h.push(random_vector(6, rng));
    CHECK(project_subspace(a, h) == a);
}

TEST_CASE("projection errors")
{
    SubspaceHistory h;
    CHECK_THROWS_AS(project_subspace(SolutionVector{Complex(1, 0)}, h), ConfigError);
    h.push({Complex(1, 0), Complex(2, 0)});
    CHECK_THROWS_AS(project_subspace(SolutionVector{Complex(1, 0)}, h), ConfigError);
    CHECK_THROWS_AS(h.push({Complex(1, 0)}), ConfigError);
    CHECK_THROWS_AS(SubspaceHistory(std::size_t{0}), ConfigError);
}

TEST_CASE("property: projection is a convex combination and order invariant")
{
    Rng rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 20));
        const int m = rng.uniform_int(1, 8);
        std::vector<SolutionVector> entries;
        for (int i = 0; i < m; ++i)
            entries.push_back(random_vector(n, rng));
        const SolutionVector cur = random_vector(n, rng);

        SubspaceHistory h;
        for (const auto& e : entries)
            h.push(e);
        const auto w = subspace_weights(cur, h);
        double sum = 0.0;
        for (double x : w) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);

        const SolutionVector out = project_subspace(cur, h);
        SolutionVector manual(n);
        for (int i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                manual[j] += w[static_cast<std::size_t>(i)] * entries[static_cast<std::size_t>(i)][j];
        for (std::size_t j = 0; j < n; ++j)
            CHECK(std::abs(out[j] - manual[j]) < 1e-12);

        std::vector<SolutionVector> shuffled = entries;
        seeded_shuffle(shuffled, static_cast<std::uint64_t>(trial));
        SubspaceHistory hs;
        for (const auto& e : shuffled)
            hs.push(e);
        const SolutionVector out2 = project_subspace(cur, hs);
        for (std::size_t j = 0; j < n; ++j)
            CHECK(std::abs(out[j] - out2[j]) < 1e-12);
    }
}

TEST_CASE("history capacity evicts the oldest entry")
{
    SubspaceHistory h(std::size_t{3});
    for (int i = 0; i < 5; ++i)
        h.push({Complex(i, 0)});
    CHECK(h.size() == 3);
    CHECK(h[0][0] == Complex(2, 0));
    CHECK(h[2][0] == Complex(4, 0));
}

TEST_CASE("update_penalty examples")
{
    PenaltySchedule s{0.25, 0.7, 2.0, 1.0};
    const auto a = update_penalty(s, 0.5, PenaltyMode::scaled);
    CHECK(a.sigma == 0.25);
    CHECK(a.eps_best == 0.5);
    const auto b = update_penalty(s, 0.8, PenaltyMode::scaled);
    CHECK(b.sigma == 0.5);
    CHECK(b.eps_best == 1.0);

    PenaltySchedule fresh;
    CHECK(fresh.eps_best == std::numeric_limits<double>::infinity());
    const auto c = update_penalty(fresh, 1e9, PenaltyMode::scaled);
    CHECK(c.sigma == fresh.sigma);
    CHECK(c.eps_best == 1e9);

    PenaltySchedule strict{1e-4, 0.7, 3.0, 1.0};
    CHECK(update_penalty(strict, 0.9, PenaltyMode::strict).sigma == 1e-4);
    CHECK(update_penalty(strict, 1.0, PenaltyMode::strict).sigma == doctest::Approx(3e-4));

    CHECK_THROWS_AS(update_penalty(s, -1.0, PenaltyMode::strict), ConfigError);
}

TEST_CASE("property: sigma non-decreasing, eps_best non-increasing")
{
    Rng rng(34);
    for (auto mode : {PenaltyMode::scaled, PenaltyMode::strict}) {
        PenaltySchedule s{0.25, 0.7, 2.0, std::numeric_limits<double>::infinity()};
        for (int i = 0; i < 500; ++i) {
            const auto next = update_penalty(s, std::abs(rng.normal()) * 10.0, mode);
            CHECK(next.sigma >= s.sigma);
            CHECK(next.eps_best <= s.eps_best);
            s = next;
        }
    }
}

TEST_CASE("convergence certificate arithmetic")
{
    const SolutionVector star{Complex(1, 2), Complex(-1, 0)};
    auto cert = convergence_certificate(star, star, star, star);
    CHECK(cert.lhs == 0.0);
    CHECK(cert.rhs == 0.0);
    CHECK(cert.holds);

    const SolutionVector prev{Complex(3, 2), Complex(-1, 0)};
    const SolutionVector g{Complex(1, 3), Complex(-1, 0)};
    cert = convergence_certificate(star, prev, g, star);
    CHECK(cert.lhs == 0.0);
    CHECK(cert.rhs == doctest::Approx(0.5 * 4 - 0.5 * 1));
    CHECK(cert.holds);

    const SolutionVector next{Complex(2, 2), Complex(-1, 0)};
    cert = convergence_certificate(next, star, star, star);
    CHECK(cert.lhs == doctest::Approx(1.0));
    CHECK(cert.rhs == doctest::Approx(-0.5));
    CHECK_FALSE(cert.holds);

    CHECK_THROWS_AS(convergence_certificate(next, SolutionVector{Complex(1, 0)}, star, star), ConfigError);
}

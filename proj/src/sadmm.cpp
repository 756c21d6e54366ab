#include "lccf/sadmm.hpp"

#include "lccf/error.hpp"

#include <cmath>
#include <string>

namespace lccf {

namespace {

constexpr double zero_distance = 1e-12;

void check_lengths(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw ConfigError(std::string(what) + ": length mismatch (" + std::to_string(a) + " vs " +
                          std::to_string(b) + ")");
}

}  // namespace

SubspaceHistory::SubspaceHistory(std::optional<std::size_t> capacity)
    : capacity_(capacity)
{
    if (capacity_ && *capacity_ == 0)
        throw ConfigError("subspace history capacity must be at least 1");
}

void SubspaceHistory::push(SolutionVector entry)
{
    if (!entries_.empty())
        check_lengths(entry.size(), entries_.front().size(), "SubspaceHistory::push");
    entries_.push_back(std::move(entry));
    if (capacity_ && entries_.size() > *capacity_)
        entries_.pop_front();
}

double distance(std::span<const Complex> a, std::span<const Complex> b)
{
    check_lengths(a.size(), b.size(), "distance");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += std::norm(a[i] - b[i]);
    return std::sqrt(sum);
}

std::vector<double> subspace_weights(std::span<const Complex> current, const SubspaceHistory& history)
{
    if (history.empty())
        throw ConfigError("project_subspace: empty history");
    check_lengths(current.size(), history.entry_length(), "project_subspace");

    std::vector<double> weights(history.size(), 0.0);
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double d = distance(current, history[i]);
        if (d < zero_distance) {
            std::fill(weights.begin(), weights.end(), 0.0);
            weights[i] = 1.0;
            return weights;
        }
        weights[i] = 1.0 / d;
    }
    double total = 0.0;
    for (double w : weights)
        total += w;
    for (double& w : weights)
        w /= total;
    return weights;
}

SolutionVector project_subspace(std::span<const Complex> current, const SubspaceHistory& history)
{
    const auto weights = subspace_weights(current, history);
    SolutionVector out(current.size(), Complex{});
    for (std::size_t i = 0; i < history.size(); ++i) {
        if (weights[i] == 0.0)
            continue;
        const auto& entry = history[i];
        if (weights[i] == 1.0)
            return entry;
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += weights[i] * entry[j];
    }
    return out;
}

PenaltySchedule update_penalty(const PenaltySchedule& schedule, double eps, PenaltyMode mode)
{
    if (!(eps >= 0.0))
        throw ConfigError("update_penalty: eps must be non-negative");
    PenaltySchedule next = schedule;
    const double threshold = mode == PenaltyMode::scaled ? schedule.eta * schedule.eps_best : schedule.eps_best;
    if (eps < threshold) {
        next.eps_best = eps;
    } else {
        next.sigma = schedule.sigma * (mode == PenaltyMode::scaled ? 2.0 : schedule.c);
    }
    return next;
}

ConvergenceCertificate convergence_certificate(std::span<const Complex> h_next,
                                               std::span<const Complex> h_prev,
                                               std::span<const Complex> g_prev,
                                               std::span<const Complex> h_star)
{
    check_lengths(h_next.size(), h_prev.size(), "convergence_certificate");
    check_lengths(h_next.size(), g_prev.size(), "convergence_certificate");
    check_lengths(h_next.size(), h_star.size(), "convergence_certificate");
    const double d_next = distance(h_next, h_star);
    const double d_prev = distance(h_star, h_prev);
    const double d_gap = distance(h_next, g_prev);
    ConvergenceCertificate cert;
    cert.lhs = d_next * d_next;
    cert.rhs = 0.5 * d_prev * d_prev - 0.5 * d_gap * d_gap;
    cert.holds = cert.lhs <= cert.rhs + 1e-8;
    return cert;
}

}  // namespace lccf

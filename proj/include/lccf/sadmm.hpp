#pragma once

#include "lccf/signal.hpp"

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace lccf {

/// Flattened frequency-domain solution (filter or dual variable).
using SolutionVector = std::vector<Complex>;

/// Ordered past solutions spanning the latent subspace. With a capacity the
/// oldest entry is evicted first.
class SubspaceHistory {
public:
    SubspaceHistory() = default;
    explicit SubspaceHistory(std::optional<std::size_t> capacity);

    void push(SolutionVector entry);
    void clear() noexcept { entries_.clear(); }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::optional<std::size_t> capacity() const noexcept { return capacity_; }
    std::size_t entry_length() const noexcept { return entries_.empty() ? 0 : entries_.front().size(); }

    const SolutionVector& operator[](std::size_t i) const { return entries_[i]; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

private:
    std::optional<std::size_t> capacity_;
    std::deque<SolutionVector> entries_;
};

enum class PenaltyMode {
    scaled,  // improvement when eps < eta * eps_best; otherwise sigma doubles
    strict,  // improvement when eps < eps_best; otherwise sigma *= c
};

struct PenaltySchedule {
    double sigma = 0.25;
    double eta = 0.7;
    double c = 2.0;
    double eps_best = std::numeric_limits<double>::infinity();
};

/// Euclidean (modulus) distance between two complex vectors.
double distance(std::span<const Complex> a, std::span<const Complex> b);

/// Inverse-distance weights over the history, L1-normalised. An entry closer
/// than 1e-12 takes the full weight.
std::vector<double> subspace_weights(std::span<const Complex> current, const SubspaceHistory& history);

/// Convex combination of history entries weighted by subspace_weights.
SolutionVector project_subspace(std::span<const Complex> current, const SubspaceHistory& history);

PenaltySchedule update_penalty(const PenaltySchedule& schedule, double eps, PenaltyMode mode);

struct ConvergenceCertificate {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};

/// lhs = |h_next - h_star|^2, rhs = 0.5 |h_star - h_prev|^2 - 0.5 |h_next - g_prev|^2.
ConvergenceCertificate convergence_certificate(std::span<const Complex> h_next,
                                               std::span<const Complex> h_prev,
                                               std::span<const Complex> g_prev,
                                               std::span<const Complex> h_star);

}  // namespace lccf

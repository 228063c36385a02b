#include "cafe/softmax_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cafe/error.hpp"

namespace cafe {

void ClusterConfig::validate() const {
    if (k < 1) throw InputError("k must be at least 1");
    if (!(theta > 0.0)) throw InputError("theta must be positive");
    if (max_sweeps < 1) throw InputError("max_sweeps must be positive");
    if (!(tol >= 0.0)) throw InputError("tol must be nonnegative");
}

SoftAssignment init_assignment(std::size_t n, const ClusterConfig& config, std::span<const PinnedLabel> pinned) {
    config.validate();
    if (config.k < 2) throw InputError("k must be at least 2");
    SoftAssignment a;
    a.h = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(config.k));
    a.pinned.assign(n, 0);
    for (const auto& p : pinned) {
        if (p.node >= n) throw InputError("pinned node " + std::to_string(p.node) + " out of range");
        if (p.cluster >= config.k)
            throw InputError("pinned cluster " + std::to_string(p.cluster) + " must be below k=" +
                             std::to_string(config.k));
        a.pinned[p.node] = 1;
    }

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> draw(0.5, 1.5);
    for (std::size_t u = 0; u < n; ++u) {
        auto row = a.h.row(static_cast<Eigen::Index>(u));
        // Draw for every row so pinning does not shift the other rows' values.
        double sum = 0.0;
        for (Eigen::Index c = 0; c < row.size(); ++c) {
            row(c) = draw(rng);
            sum += row(c);
        }
        row /= sum;
    }
    for (const auto& p : pinned) {
        auto row = a.h.row(static_cast<Eigen::Index>(p.node));
        row.setZero();
        row(static_cast<Eigen::Index>(p.cluster)) = 1.0;
    }
    return a;
}

std::size_t expected_covariance(const CovarianceOperator& q, const Matrix& h, const Matrix& aggregate, std::size_t u,
                                std::span<double> z) {
    return q.off_diagonal_product(u, h, aggregate, z);
}

void softmax_update(std::span<double> row, std::span<const double> z, double theta) {
    const std::size_t k = row.size();
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c)
        if (row[c] > 0.0) top = std::max(top, theta * z[c] + std::log(row[c]));

    double sum = 0.0;
    std::vector<double> next(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        if (row[c] > 0.0) {
            next[c] = std::exp(theta * z[c] + std::log(row[c]) - top);
            sum += next[c];
        }
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        // Only reachable with a corrupted row; fall back to the plain softmax of theta z.
        top = *std::max_element(z.begin(), z.end()) * theta;
        sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            next[c] = std::exp(theta * z[c] - top);
            sum += next[c];
        }
    }
    for (std::size_t c = 0; c < k; ++c) {
        const bool alive = row[c] > 0.0;
        double v = next[c] / sum;
        if (alive && v < kEntryFloor) v = kEntryFloor;
        row[c] = v;
    }
}

SweepStats sweep(const CovarianceOperator& q, SoftAssignment& assignment, const ClusterConfig& config,
                 const UpdateObserver& observer) {
    Matrix& h = assignment.h;
    const std::size_t n = assignment.size();
    const std::size_t k = assignment.clusters();
    if (q.size() != n) throw InputError("assignment does not match operator size");

    Matrix agg = q.aggregate(h);
    std::vector<double> z(k);
    std::vector<double> delta(k);
    SweepStats stats;
    for (std::size_t u = 0; u < n; ++u) {
        if (assignment.is_pinned(u)) continue;
        stats.operations += expected_covariance(q, h, agg, u, z);
        std::span<double> row(h.data() + u * k, k);
        std::copy(row.begin(), row.end(), delta.begin());
        softmax_update(row, z, config.theta);
        for (std::size_t c = 0; c < k; ++c) delta[c] = row[c] - delta[c];
        q.update_aggregate(agg, u, delta);
        stats.operations += 3 * k;
        if (observer) observer(u, h);
    }
    stats.objective = off_diagonal_objective(q, h);
    return stats;
}

ClusterResult run_softmax(const CovarianceOperator& q, SoftAssignment assignment, const ClusterConfig& config) {
    config.validate();
    ClusterResult result;
    double previous = off_diagonal_objective(q, assignment.h);
    result.trace.push_back(previous);
    for (std::size_t s = 0; s < config.max_sweeps; ++s) {
        const SweepStats stats = sweep(q, assignment, config);
        ++result.sweeps;
        result.trace.push_back(stats.objective);
        const double change = std::abs(stats.objective - previous);
        previous = stats.objective;
        if (change < config.tol) {
            result.converged = true;
            break;
        }
    }
    result.objective = previous;
    result.assignment = std::move(assignment);
    return result;
}

ClusterResult run_softmax(const CovarianceOperator& q, const ClusterConfig& config, std::span<const PinnedLabel> pinned) {
    return run_softmax(q, init_assignment(q.size(), config, pinned), config);
}

std::vector<std::size_t> hardmax(const Matrix& h) {
    std::vector<std::size_t> labels(static_cast<std::size_t>(h.rows()));
    for (Eigen::Index u = 0; u < h.rows(); ++u) {
        Eigen::Index best = 0;
        for (Eigen::Index c = 1; c < h.cols(); ++c)
            if (h(u, c) > h(u, best)) best = c;
        labels[static_cast<std::size_t>(u)] = static_cast<std::size_t>(best);
    }
    return labels;
}

}  // namespace cafe

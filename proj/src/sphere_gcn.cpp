#include "cafe/sphere_gcn.hpp"

#include <cmath>
#include <random>

#include "cafe/error.hpp"

namespace cafe {

void SphereConfig::validate() const {
    if (k < 1) throw InputError("k must be at least 1");
    if (!(beta >= 0.0 && beta <= 1.0)) throw InputError("beta must lie in [0, 1]");
    if (max_sweeps < 1) throw InputError("max_sweeps must be positive");
    if (!(tol >= 0.0)) throw InputError("tol must be nonnegative");
}

SphereAssignment init_sphere(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 1) throw InputError("k must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    SphereAssignment a;
    a.h.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (Eigen::Index u = 0; u < a.h.rows(); ++u) {
        double norm = 0.0;
        do {
            for (Eigen::Index c = 0; c < a.h.cols(); ++c) a.h(u, c) = gauss(rng);
            norm = a.h.row(u).norm();
        } while (norm == 0.0);
        a.h.row(u) /= norm;
    }
    return a;
}

bool sphere_update(std::span<double> row, std::span<const double> z, double beta) {
    const std::size_t k = row.size();
    std::vector<double> next(k);
    double norm2 = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        next[c] = (1.0 - beta) * row[c] + beta * z[c];
        norm2 += next[c] * next[c];
    }
    const double norm = std::sqrt(norm2);
    if (!(norm >= 1e-300)) return false;
    for (std::size_t c = 0; c < k; ++c) row[c] = next[c] / norm;
    return true;
}

double sphere_sweep(const CovarianceOperator& q, SphereAssignment& a, SphereResult& stats,
                    const SphereObserver& observer) {
    Matrix& h = a.h;
    const std::size_t n = static_cast<std::size_t>(h.rows());
    const std::size_t k = static_cast<std::size_t>(h.cols());
    Matrix agg = q.aggregate(h);
    std::vector<double> z(k);
    std::vector<double> before(k);
    std::vector<double> delta(k);
    stats.operations = 0;
    for (std::size_t u = 0; u < n; ++u) {
        stats.operations += q.off_diagonal_product(u, h, agg, z);
        std::span<double> row(h.data() + u * k, k);
        std::copy(row.begin(), row.end(), before.begin());
        if (!sphere_update(row, z, a.beta)) {
            ++stats.degenerate_updates;
            continue;
        }
        for (std::size_t c = 0; c < k; ++c) delta[c] = row[c] - before[c];
        q.update_aggregate(agg, u, delta);
        stats.operations += 3 * k;
        if (observer) observer(u, z, before, row);
    }
    return trace_objective(q, h);
}

SphereResult run_sphere(const CovarianceOperator& q, SphereAssignment start, const SphereConfig& config) {
    config.validate();
    if (static_cast<std::size_t>(start.h.rows()) != q.size()) throw InputError("assignment does not match operator size");
    SphereResult result;
    start.beta = config.beta;
    double previous = trace_objective(q, start.h);
    result.trace.push_back(previous);
    for (std::size_t s = 0; s < config.max_sweeps; ++s) {
        const double value = sphere_sweep(q, start, result);
        ++result.sweeps;
        result.trace.push_back(value);
        const double change = std::abs(value - previous);
        previous = value;
        if (change < config.tol) {
            result.converged = true;
            break;
        }
    }
    result.objective = previous;
    result.assignment = std::move(start);
    return result;
}

SphereResult run_sphere(const CovarianceOperator& q, const SphereConfig& config) {
    config.validate();
    return run_sphere(q, init_sphere(q.size(), config.k, config.seed), config);
}

SphereEmbedding sphere_embed(const CovarianceOperator& q, const SphereConfig& config) {
    SphereEmbedding out;
    out.run = run_sphere(q, config);
    out.embedding = qr_embed(q, out.run.assignment.h);
    return out;
}

}  // namespace cafe

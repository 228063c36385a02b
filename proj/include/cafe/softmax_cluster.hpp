#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "cafe/covariance_operator.hpp"
#include "cafe/matrix.hpp"

namespace cafe {

struct ClusterConfig {
    std::size_t k = 2;           ///< maximum number of clusters
    double theta = 1.0;          ///< inverse temperature, > 0
    std::size_t max_sweeps = 200;
    double tol = 1e-9;           ///< stop once |objective change| over a sweep drops below this
    std::uint64_t seed = 0;

    void validate() const;
};

struct PinnedLabel {
    std::size_t node = 0;
    std::size_t cluster = 0;
};

/// Row-stochastic n x K membership matrix; pinned rows are one-hot and frozen.
struct SoftAssignment {
    Matrix h;
    std::vector<char> pinned;  ///< per-node flag

    std::size_t size() const { return static_cast<std::size_t>(h.rows()); }
    std::size_t clusters() const { return static_cast<std::size_t>(h.cols()); }
    bool is_pinned(std::size_t u) const { return pinned[u] != 0; }
};

/// Entries of unpinned rows never fall below this value.
inline constexpr double kEntryFloor = 1e-300;

/// Rows from normalized iid uniform(0.5, 1.5) draws; pinned rows one-hot.
SoftAssignment init_assignment(std::size_t n, const ClusterConfig& config, std::span<const PinnedLabel> pinned = {});

/// z_u = sum_{w != u} q(w,u) h_w via the operator's aggregate. Returns op count.
std::size_t expected_covariance(const CovarianceOperator& q, const Matrix& h, const Matrix& aggregate, std::size_t u,
                                std::span<double> z);

/// h_k <- exp(theta z_k) h_k / sum_l exp(theta z_l) h_l, evaluated in log space.
/// Exact zeros stay zero, positive entries are floored at kEntryFloor.
void softmax_update(std::span<double> row, std::span<const double> z, double theta);

struct SweepStats {
    double objective = 0.0;      ///< tr(H^T Q_0 H) after the sweep
    std::size_t operations = 0;  ///< multiply-adds spent on z_u and the row updates
};

/// Called after each single-row update with the visited node.
using UpdateObserver = std::function<void(std::size_t u, const Matrix& h)>;

/// One ascending pass over all unpinned nodes.
SweepStats sweep(const CovarianceOperator& q, SoftAssignment& assignment, const ClusterConfig& config,
                 const UpdateObserver& observer = {});

struct ClusterResult {
    SoftAssignment assignment;
    double objective = 0.0;
    std::size_t sweeps = 0;
    bool converged = false;
    std::vector<double> trace;  ///< objective before the first sweep, then after each sweep
};

/// Sweeps until the objective settles within tol or max_sweeps is reached.
ClusterResult run_softmax(const CovarianceOperator& q, const ClusterConfig& config,
                          std::span<const PinnedLabel> pinned = {});

/// Continues from an existing assignment.
ClusterResult run_softmax(const CovarianceOperator& q, SoftAssignment assignment, const ClusterConfig& config);

/// argmax per row, ties to the lowest index.
std::vector<std::size_t> hardmax(const Matrix& h);

}  // namespace cafe

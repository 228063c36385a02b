#include "cafe/covariance_operator.hpp"

#include <string>

#include "cafe/error.hpp"

namespace cafe {

double CovarianceOperator::covariance(std::size_t u, std::size_t w) const {
    check_node(u);
    check_node(w);
    if (diag_zeroed_ && u == w) return 0.0;
    return raw_covariance(u, w);
}

Matrix CovarianceOperator::dense(bool zero_diagonal) const {
    const std::size_t n = size();
    Matrix q(n, n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t w = 0; w < n; ++w)
            q(u, w) = (zero_diagonal && u == w) ? 0.0 : raw_covariance(u, w);
    return q;
}

double CovarianceOperator::trace() const {
    double t = 0.0;
    for (std::size_t u = 0; u < size(); ++u) t += raw_covariance(u, u);
    return t;
}

void CovarianceOperator::check_node(std::size_t u) const {
    if (u >= size())
        throw InputError("node index " + std::to_string(u) + " out of range for n=" + std::to_string(size()));
}

void CovarianceOperator::check_rows(const Matrix& h) const {
    if (static_cast<std::size_t>(h.rows()) != size())
        throw InputError("dimension mismatch: matrix has " + std::to_string(h.rows()) + " rows, operator has n=" +
                         std::to_string(size()));
}

double trace_objective(const CovarianceOperator& q, const Matrix& h) {
    const Matrix qh = q.product(h, false);
    return h.cwiseProduct(qh).sum();
}

double off_diagonal_objective(const CovarianceOperator& q, const Matrix& h) {
    const Matrix qh = q.product(h, true);
    return h.cwiseProduct(qh).sum();
}

}  // namespace cafe

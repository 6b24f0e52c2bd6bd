#include "eann/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace eann {

NetworkProblem::NetworkProblem(NetworkShape shape, EvaluationBatch batch)
    : shape_(std::move(shape)), batch_(std::move(batch)) {
    if (shape_.activations.empty())
        throw std::invalid_argument("NetworkProblem: shape has no hidden neurons");
    if (batch_.inputs.cols() != shape_.n_inputs || batch_.pattern_count() == 0
        || batch_.inputs.rows() != batch_.targets.size())
        throw std::invalid_argument("NetworkProblem: batch does not match shape");
}

double NetworkProblem::sse(std::span<const double> params) const {
    return eann::sse(unflatten_params(shape_, params), batch_);
}

double NetworkProblem::sse_and_gradient(std::span<const double> params,
                                        std::vector<double>& grad) const {
    auto r = eann::sse_and_gradient(unflatten_params(shape_, params), batch_);
    grad = std::move(r.gradient);
    return r.sse;
}

ResidualJacobian NetworkProblem::residual_jacobian(std::span<const double> params) const {
    return eann::jacobian(unflatten_params(shape_, params), batch_);
}

LinearProblem::LinearProblem(Matrix design, std::vector<double> targets)
    : design_(std::move(design)), targets_(std::move(targets)) {
    if (design_.rows() != targets_.size() || design_.cols() == 0)
        throw std::invalid_argument("LinearProblem: design/target size mismatch");
}

double LinearProblem::sse(std::span<const double> params) const {
    double s = 0.0;
    for (std::size_t p = 0; p < design_.rows(); ++p) {
        const double e = dot(design_.row(p), params) - targets_[p];
        s += e * e;
    }
    if (!std::isfinite(s)) throw numerical_error("LinearProblem::sse: non-finite value");
    return s;
}

double LinearProblem::sse_and_gradient(std::span<const double> params,
                                       std::vector<double>& grad) const {
    grad.assign(design_.cols(), 0.0);
    double s = 0.0;
    for (std::size_t p = 0; p < design_.rows(); ++p) {
        const auto row = design_.row(p);
        const double e = dot(row, params) - targets_[p];
        s += e * e;
        for (std::size_t j = 0; j < row.size(); ++j) grad[j] += e * row[j];
    }
    if (!std::isfinite(s) || !all_finite(grad))
        throw numerical_error("LinearProblem::sse_and_gradient: non-finite value");
    return s;
}

ResidualJacobian LinearProblem::residual_jacobian(std::span<const double> params) const {
    ResidualJacobian out;
    out.jacobian = design_;
    out.residuals.resize(targets_.size());
    for (std::size_t p = 0; p < design_.rows(); ++p)
        out.residuals[p] = dot(design_.row(p), params) - targets_[p];
    if (!all_finite(out.residuals))
        throw numerical_error("LinearProblem::residual_jacobian: non-finite value");
    return out;
}

}  // namespace eann

#pragma once

#include <span>
#include <vector>

#include "eann/matrix.hpp"
#include "eann/network.hpp"

namespace eann {

// Batch least-squares objective over a flat parameter vector. Trainers see
// networks through this interface, which also admits toy problems with
// known closed-form solutions.
class TrainingProblem {
public:
    virtual ~TrainingProblem() = default;

    virtual std::size_t param_count() const = 0;
    virtual std::size_t pattern_count() const = 0;

    virtual double sse(std::span<const double> params) const = 0;

    // Returns sse and fills grad with the gradient of sse/2.
    virtual double sse_and_gradient(std::span<const double> params,
                                    std::vector<double>& grad) const = 0;

    // Residuals and their Jacobian (pattern_count x param_count).
    virtual ResidualJacobian residual_jacobian(std::span<const double> params) const = 0;
};

// A network plus a fixed evaluation batch, parameterized by the canonical
// flat weight vector.
class NetworkProblem final : public TrainingProblem {
public:
    NetworkProblem(NetworkShape shape, EvaluationBatch batch);

    std::size_t param_count() const override { return shape_.param_count(); }
    std::size_t pattern_count() const override { return batch_.pattern_count(); }

    double sse(std::span<const double> params) const override;
    double sse_and_gradient(std::span<const double> params,
                            std::vector<double>& grad) const override;
    ResidualJacobian residual_jacobian(std::span<const double> params) const override;

    const NetworkShape& shape() const { return shape_; }
    const EvaluationBatch& batch() const { return batch_; }

private:
    NetworkShape shape_;
    EvaluationBatch batch_;
};

// Residuals e_p = X_p . w - t_p: linear in the parameters, so the SSE is an
// exact quadratic with least-squares solution (X^T X)^-1 X^T t.
class LinearProblem final : public TrainingProblem {
public:
    LinearProblem(Matrix design, std::vector<double> targets);

    std::size_t param_count() const override { return design_.cols(); }
    std::size_t pattern_count() const override { return targets_.size(); }

    double sse(std::span<const double> params) const override;
    double sse_and_gradient(std::span<const double> params,
                            std::vector<double>& grad) const override;
    ResidualJacobian residual_jacobian(std::span<const double> params) const override;

    const Matrix& design() const { return design_; }
    const std::vector<double>& targets() const { return targets_; }

private:
    Matrix design_;
    std::vector<double> targets_;
};

}  // namespace eann

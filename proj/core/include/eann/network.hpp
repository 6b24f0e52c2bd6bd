#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eann/activation.hpp"
#include "eann/matrix.hpp"

namespace eann {

// Thrown when an evaluation produces a non-finite intermediate value.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HiddenNeuron {
    Activation activation = Activation::T;
    std::vector<double> weights;  // one per network input
    double bias = 0.0;

    bool operator==(const HiddenNeuron&) const = default;
};

// A single-hidden-layer feedforward network with a linear output neuron.
// Hidden neurons may mix transfer functions.
struct NetworkPhenotype {
    std::size_t n_inputs = 0;
    std::vector<HiddenNeuron> hidden;
    std::vector<double> output_weights;  // one per hidden neuron
    double output_bias = 0.0;

    bool operator==(const NetworkPhenotype&) const = default;
};

// The architecture without the weights: input width plus the ordered
// per-neuron transfer functions. Enough to rebuild a phenotype from a flat
// parameter vector.
struct NetworkShape {
    std::size_t n_inputs = 0;
    std::vector<Activation> activations;

    std::size_t hidden_count() const { return activations.size(); }
    // Flat parameter count: per neuron (inputs + bias), output weights, output bias.
    std::size_t param_count() const {
        return activations.size() * (n_inputs + 1) + activations.size() + 1;
    }

    bool operator==(const NetworkShape&) const = default;
};

NetworkShape shape_of(const NetworkPhenotype& net);

// Throws std::invalid_argument when the phenotype is internally
// inconsistent (empty hidden layer, mismatched vector lengths) or carries
// non-finite weights.
void validate_network(const NetworkPhenotype& net);

struct EvaluationBatch {
    Matrix inputs;                 // P x n_inputs
    std::vector<double> targets;   // length P

    std::size_t pattern_count() const { return targets.size(); }
};

void validate_batch(const NetworkPhenotype& net, const EvaluationBatch& batch);

double forward(const NetworkPhenotype& net, std::span<const double> input);

// Sum of squared residuals over the batch together with the analytic
// gradient of sse/2 in canonical flat order. Throws numerical_error when a
// non-finite value appears.
struct SseGradient {
    double sse = 0.0;
    std::vector<double> gradient;
};
SseGradient sse_and_gradient(const NetworkPhenotype& net, const EvaluationBatch& batch);

double sse(const NetworkPhenotype& net, const EvaluationBatch& batch);
double rmse(const NetworkPhenotype& net, const EvaluationBatch& batch);

// Residuals e_p = forward(x_p) - t_p and the P x W matrix of their
// derivatives with respect to the canonical flat parameters.
struct ResidualJacobian {
    std::vector<double> residuals;
    Matrix jacobian;
};
ResidualJacobian jacobian(const NetworkPhenotype& net, const EvaluationBatch& batch);

// Canonical flat parameter order: for each hidden neuron its input weights
// then its bias, then all output weights, then the output bias.
std::vector<double> flatten_params(const NetworkPhenotype& net);
NetworkPhenotype unflatten_params(const NetworkShape& shape, std::span<const double> params);

// "8 T, 2 T*, 1 L*" style summary: counts per transfer function in enum
// order, zero counts skipped.
std::string architecture_summary(const NetworkPhenotype& net);
std::string architecture_summary(const NetworkShape& shape);

// Parses the same grammar back into an ordered activation list. Throws
// std::invalid_argument with the offending token on a count < 1 or an
// unknown tag.
std::vector<Activation> parse_architecture(std::string_view text);

}  // namespace eann

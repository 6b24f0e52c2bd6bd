#include "eann/activation.hpp"

#include <cmath>

namespace eann {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

double activate(Activation kind, double x) {
    switch (kind) {
        case Activation::T: return std::tanh(x);
        case Activation::L: return logistic(x);
        case Activation::S: return 2.0 * logistic(x) - 1.0;
        case Activation::TStar: return 1.7159 * std::tanh(2.0 * x / 3.0);
        case Activation::LStar: return logistic(2.0 * x);
    }
    return 0.0;  // unreachable
}

double activate_derivative(Activation kind, double x) {
    switch (kind) {
        case Activation::T: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::L: {
            const double s = logistic(x);
            return s * (1.0 - s);
        }
        case Activation::S: {
            const double s = logistic(x);
            return 2.0 * s * (1.0 - s);
        }
        case Activation::TStar: {
            const double t = std::tanh(2.0 * x / 3.0);
            return 1.7159 * (2.0 / 3.0) * (1.0 - t * t);
        }
        case Activation::LStar: {
            const double s = logistic(2.0 * x);
            return 2.0 * s * (1.0 - s);
        }
    }
    return 0.0;  // unreachable
}

std::string_view activation_tag(Activation kind) {
    switch (kind) {
        case Activation::T: return "T";
        case Activation::L: return "L";
        case Activation::S: return "S";
        case Activation::TStar: return "T*";
        case Activation::LStar: return "L*";
    }
    return "?";
}

std::optional<Activation> parse_activation_tag(std::string_view tag) {
    if (tag == "T") return Activation::T;
    if (tag == "L") return Activation::L;
    if (tag == "S") return Activation::S;
    if (tag == "T*" || tag == "TS") return Activation::TStar;
    if (tag == "L*" || tag == "LS") return Activation::LStar;
    return std::nullopt;
}

}  // namespace eann

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace eann {

// The five hidden-node transfer functions. All are bounded and smooth on
// the whole real line; the output neuron is always linear and is not listed
// here.
//
//   T  : tanh(x)
//   L  : 1 / (1 + exp(-x))            (logistic)
//   S  : 2 / (1 + exp(-x)) - 1        (bipolar sigmoid)
//   T* : 1.7159 * tanh(2x/3)          (scaled tanh)
//   L* : 1 / (1 + exp(-2x))           (steepened logistic)
enum class Activation : std::uint8_t { T = 0, L = 1, S = 2, TStar = 3, LStar = 4 };

inline constexpr std::size_t kActivationCount = 5;

inline constexpr std::array<Activation, kActivationCount> kAllActivations = {
    Activation::T, Activation::L, Activation::S, Activation::TStar, Activation::LStar};

double activate(Activation kind, double x);

// Exact derivative of activate(kind, .) at x.
double activate_derivative(Activation kind, double x);

// Short tag as used in architecture strings: "T", "L", "S", "T*", "L*".
std::string_view activation_tag(Activation kind);

// Parses a tag; "TS" and "LS" are accepted as aliases of "T*" and "L*".
std::optional<Activation> parse_activation_tag(std::string_view tag);

}  // namespace eann

#include "eann/network.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace eann {

NetworkShape shape_of(const NetworkPhenotype& net) {
    NetworkShape shape;
    shape.n_inputs = net.n_inputs;
    shape.activations.reserve(net.hidden.size());
    for (const auto& h : net.hidden) shape.activations.push_back(h.activation);
    return shape;
}

void validate_network(const NetworkPhenotype& net) {
    if (net.hidden.empty())
        throw std::invalid_argument("network: hidden layer must contain at least one neuron");
    if (net.output_weights.size() != net.hidden.size())
        throw std::invalid_argument("network: output weight count does not match hidden layer size");
    for (const auto& h : net.hidden) {
        if (h.weights.size() != net.n_inputs)
            throw std::invalid_argument("network: hidden neuron weight count does not match input width");
        for (double w : h.weights)
            if (!std::isfinite(w)) throw std::invalid_argument("network: non-finite hidden weight");
        if (!std::isfinite(h.bias)) throw std::invalid_argument("network: non-finite hidden bias");
    }
    for (double w : net.output_weights)
        if (!std::isfinite(w)) throw std::invalid_argument("network: non-finite output weight");
    if (!std::isfinite(net.output_bias))
        throw std::invalid_argument("network: non-finite output bias");
}

void validate_batch(const NetworkPhenotype& net, const EvaluationBatch& batch) {
    if (batch.pattern_count() == 0)
        throw std::invalid_argument("batch: at least one pattern required");
    if (batch.inputs.rows() != batch.targets.size())
        throw std::invalid_argument("batch: input row count does not match target count");
    if (batch.inputs.cols() != net.n_inputs)
        throw std::invalid_argument("batch: input width does not match network input count");
}

double forward(const NetworkPhenotype& net, std::span<const double> input) {
    if (input.size() != net.n_inputs)
        throw std::invalid_argument("forward: input length does not match network input count");
    double y = net.output_bias;
    for (std::size_t j = 0; j < net.hidden.size(); ++j) {
        const auto& h = net.hidden[j];
        const double z = dot(h.weights, input) + h.bias;
        y += net.output_weights[j] * activate(h.activation, z);
    }
    return y;
}

namespace {

// Shared forward pass used by the gradient and Jacobian routines:
// pre-activations and activation values for one pattern.
struct ForwardTrace {
    std::vector<double> z;  // pre-activation per hidden neuron
    std::vector<double> a;  // activation per hidden neuron
    double y = 0.0;
};

void forward_trace(const NetworkPhenotype& net, std::span<const double> x, ForwardTrace& t) {
    const std::size_t h = net.hidden.size();
    t.z.resize(h);
    t.a.resize(h);
    t.y = net.output_bias;
    for (std::size_t j = 0; j < h; ++j) {
        const auto& n = net.hidden[j];
        const double z = dot(n.weights, x) + n.bias;
        t.z[j] = z;
        t.a[j] = activate(n.activation, z);
        t.y += net.output_weights[j] * t.a[j];
    }
}

}  // namespace

SseGradient sse_and_gradient(const NetworkPhenotype& net, const EvaluationBatch& batch) {
    validate_batch(net, batch);
    const std::size_t h = net.hidden.size();
    const std::size_t n = net.n_inputs;
    const std::size_t per_neuron = n + 1;

    SseGradient out;
    out.gradient.assign(h * per_neuron + h + 1, 0.0);
    ForwardTrace t;

    for (std::size_t p = 0; p < batch.pattern_count(); ++p) {
        const auto x = batch.inputs.row(p);
        forward_trace(net, x, t);
        const double e = t.y - batch.targets[p];
        out.sse += e * e;
        for (std::size_t j = 0; j < h; ++j) {
            // d(sse/2)/dz_j = e * v_j * f'_j(z_j)
            const double back = e * net.output_weights[j]
                              * activate_derivative(net.hidden[j].activation, t.z[j]);
            double* g = out.gradient.data() + j * per_neuron;
            for (std::size_t k = 0; k < n; ++k) g[k] += back * x[k];
            g[n] += back;
            out.gradient[h * per_neuron + j] += e * t.a[j];
        }
        out.gradient.back() += e;
    }

    if (!std::isfinite(out.sse) || !all_finite(out.gradient))
        throw numerical_error("sse_and_gradient: non-finite value encountered");
    return out;
}

double sse(const NetworkPhenotype& net, const EvaluationBatch& batch) {
    validate_batch(net, batch);
    double s = 0.0;
    ForwardTrace t;
    for (std::size_t p = 0; p < batch.pattern_count(); ++p) {
        forward_trace(net, batch.inputs.row(p), t);
        const double e = t.y - batch.targets[p];
        s += e * e;
    }
    if (!std::isfinite(s)) throw numerical_error("sse: non-finite value encountered");
    return s;
}

double rmse(const NetworkPhenotype& net, const EvaluationBatch& batch) {
    return std::sqrt(sse(net, batch) / static_cast<double>(batch.pattern_count()));
}

ResidualJacobian jacobian(const NetworkPhenotype& net, const EvaluationBatch& batch) {
    validate_batch(net, batch);
    const std::size_t h = net.hidden.size();
    const std::size_t n = net.n_inputs;
    const std::size_t per_neuron = n + 1;
    const std::size_t w = h * per_neuron + h + 1;
    const std::size_t patterns = batch.pattern_count();

    ResidualJacobian out;
    out.residuals.resize(patterns);
    out.jacobian = Matrix(patterns, w, 0.0);
    ForwardTrace t;

    for (std::size_t p = 0; p < patterns; ++p) {
        const auto x = batch.inputs.row(p);
        forward_trace(net, x, t);
        out.residuals[p] = t.y - batch.targets[p];
        auto row = out.jacobian.row(p);
        for (std::size_t j = 0; j < h; ++j) {
            const double back = net.output_weights[j]
                              * activate_derivative(net.hidden[j].activation, t.z[j]);
            double* r = row.data() + j * per_neuron;
            for (std::size_t k = 0; k < n; ++k) r[k] = back * x[k];
            r[n] = back;
            row[h * per_neuron + j] = t.a[j];
        }
        row[w - 1] = 1.0;
    }

    if (!all_finite(out.residuals) || !all_finite(out.jacobian.data()))
        throw numerical_error("jacobian: non-finite value encountered");
    return out;
}

std::vector<double> flatten_params(const NetworkPhenotype& net) {
    std::vector<double> out;
    out.reserve(shape_of(net).param_count());
    for (const auto& h : net.hidden) {
        out.insert(out.end(), h.weights.begin(), h.weights.end());
        out.push_back(h.bias);
    }
    out.insert(out.end(), net.output_weights.begin(), net.output_weights.end());
    out.push_back(net.output_bias);
    return out;
}

NetworkPhenotype unflatten_params(const NetworkShape& shape, std::span<const double> params) {
    if (params.size() != shape.param_count())
        throw std::invalid_argument("unflatten_params: parameter vector length does not match shape");
    NetworkPhenotype net;
    net.n_inputs = shape.n_inputs;
    net.hidden.resize(shape.activations.size());
    std::size_t i = 0;
    for (std::size_t j = 0; j < shape.activations.size(); ++j) {
        auto& h = net.hidden[j];
        h.activation = shape.activations[j];
        h.weights.assign(params.begin() + i, params.begin() + i + shape.n_inputs);
        i += shape.n_inputs;
        h.bias = params[i++];
    }
    net.output_weights.assign(params.begin() + i, params.begin() + i + shape.activations.size());
    i += shape.activations.size();
    net.output_bias = params[i];
    return net;
}

std::string architecture_summary(const NetworkShape& shape) {
    std::array<std::size_t, kActivationCount> counts{};
    for (Activation a : shape.activations) counts[static_cast<std::size_t>(a)]++;
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < kActivationCount; ++i) {
        if (counts[i] == 0) continue;
        if (!first) os << ", ";
        os << counts[i] << ' ' << activation_tag(static_cast<Activation>(i));
        first = false;
    }
    return os.str();
}

std::string architecture_summary(const NetworkPhenotype& net) {
    return architecture_summary(shape_of(net));
}

std::vector<Activation> parse_architecture(std::string_view text) {
    std::vector<Activation> out;
    std::string s(text);
    std::istringstream is(s);
    std::string item;
    bool any = false;
    while (std::getline(is, item, ',')) {
        // trim
        std::size_t b = item.find_first_not_of(" \t");
        std::size_t e = item.find_last_not_of(" \t");
        if (b == std::string::npos)
            throw std::invalid_argument("architecture: empty group in \"" + s + "\"");
        item = item.substr(b, e - b + 1);
        std::size_t sp = item.find_first_of(" \t");
        if (sp == std::string::npos)
            throw std::invalid_argument("architecture: expected \"<count> <tag>\" in \"" + item + "\"");
        const std::string count_str = item.substr(0, sp);
        std::size_t tb = item.find_first_not_of(" \t", sp);
        const std::string tag = item.substr(tb);
        long count = 0;
        auto [ptr, ec] = std::from_chars(count_str.data(), count_str.data() + count_str.size(), count);
        if (ec != std::errc() || ptr != count_str.data() + count_str.size())
            throw std::invalid_argument("architecture: bad count \"" + count_str + "\"");
        if (count < 1)
            throw std::invalid_argument("architecture: count must be >= 1, got \"" + count_str + "\"");
        const auto kind = parse_activation_tag(tag);
        if (!kind)
            throw std::invalid_argument("architecture: unknown transfer tag \"" + tag
                                        + "\" (expected T, L, S, T*, L*)");
        out.insert(out.end(), static_cast<std::size_t>(count), *kind);
        any = true;
    }
    if (!any) throw std::invalid_argument("architecture: empty specification");
    return out;
}

}  // namespace eann

#include "eann/genome.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eann {

namespace {

constexpr double kWeightGeneMax = 65535.0;  // 2^16 - 1
constexpr double kParamGeneMax = 255.0;     // 2^8 - 1

void check_layout(const GenomeLayout& layout) {
    if (layout.n_inputs == 0) throw std::invalid_argument("genome layout: n_inputs must be >= 1");
    if (layout.max_hidden == 0 || layout.max_hidden > 32)
        throw std::invalid_argument("genome layout: max_hidden must be in [1, 32]");
}

void check_genome(const Genome& g) {
    check_layout(g.layout);
    if (g.bits.size() != g.layout.total_bits())
        throw std::invalid_argument("genome: bit count does not match layout");
}

double decode_weight_gene(std::uint64_t raw) {
    return kWeightGeneLo + (kWeightGeneHi - kWeightGeneLo) * (static_cast<double>(raw) / kWeightGeneMax);
}

std::uint64_t encode_weight_gene(double v) {
    const double clamped = std::clamp(v, kWeightGeneLo, kWeightGeneHi);
    return static_cast<std::uint64_t>(
        std::llround((clamped - kWeightGeneLo) / (kWeightGeneHi - kWeightGeneLo) * kWeightGeneMax));
}

double decode_param_gene(std::uint64_t raw, const ParamRange& range) {
    return range.lo + (range.hi - range.lo) * (static_cast<double>(raw) / kParamGeneMax);
}

std::uint64_t encode_param_gene(double v, const ParamRange& range) {
    return static_cast<std::uint64_t>(
        std::llround((v - range.lo) / (range.hi - range.lo) * kParamGeneMax));
}

std::size_t arch_raw_for(std::size_t hidden, std::size_t max_hidden) {
    // Smallest 5-bit value whose decoded hidden count equals `hidden`.
    return ((hidden - 1) * 32 + max_hidden - 1) / max_hidden;
}

// Weight gene index of each phenotype parameter, canonical flat order.
std::size_t hidden_weight_gene(const GenomeLayout& l, std::size_t neuron, std::size_t input) {
    return neuron * (l.n_inputs + 1) + input;
}
std::size_t hidden_bias_gene(const GenomeLayout& l, std::size_t neuron) {
    return neuron * (l.n_inputs + 1) + l.n_inputs;
}
std::size_t output_weight_gene(const GenomeLayout& l, std::size_t neuron) {
    return l.max_hidden * (l.n_inputs + 1) + neuron;
}
std::size_t output_bias_gene(const GenomeLayout& l) {
    return l.max_hidden * (l.n_inputs + 1) + l.max_hidden;
}

std::uint64_t read_weight(const Genome& g, std::size_t gene) {
    return read_gene(g, g.layout.weights_offset() + gene * kWeightBits, kWeightBits);
}
void write_weight(Genome& g, std::size_t gene, std::uint64_t raw) {
    write_gene(g, g.layout.weights_offset() + gene * kWeightBits, kWeightBits, raw);
}

}  // namespace

Genome zero_genome(std::size_t n_inputs, std::size_t max_hidden) {
    GenomeLayout layout{n_inputs, max_hidden};
    check_layout(layout);
    return Genome{layout, std::vector<std::uint8_t>(layout.total_bits(), 0)};
}

std::uint64_t read_gene(const Genome& g, std::size_t offset, std::size_t width) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) v = (v << 1) | g.bits[offset + i];
    return v;
}

void write_gene(Genome& g, std::size_t offset, std::size_t width, std::uint64_t value) {
    for (std::size_t i = 0; i < width; ++i)
        g.bits[offset + i] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1u);
}

std::size_t decode_hidden_count(const Genome& genome) {
    check_genome(genome);
    const std::size_t raw = read_gene(genome, genome.layout.arch_offset(), kArchBits);
    return 1 + raw * genome.layout.max_hidden / 32;
}

TrainerSpec decode_trainer_spec(const Genome& genome, TrainerKind kind) {
    check_genome(genome);
    TrainerSpec spec;
    spec.kind = kind;
    const auto ranges = trainer_param_ranges(kind);
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const std::uint64_t raw =
            read_gene(genome, genome.layout.params_offset() + i * kParamBits, kParamBits);
        spec.params[i] = decode_param_gene(raw, ranges[i]);
    }
    return spec;
}

DecodedGenome decode(const Genome& genome) {
    check_genome(genome);
    const GenomeLayout& l = genome.layout;

    const auto kind = static_cast<TrainerKind>(read_gene(genome, l.alg_offset(), kAlgBits));
    const std::size_t h = decode_hidden_count(genome);

    DecodedGenome out;
    out.trainer = decode_trainer_spec(genome, kind);
    out.phenotype.n_inputs = l.n_inputs;
    out.phenotype.hidden.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        const std::uint64_t act = read_gene(genome, l.act_offset() + j * kActBits, kActBits);
        auto& neuron = out.phenotype.hidden[j];
        neuron.activation = static_cast<Activation>(act % kActivationCount);
        neuron.weights.resize(l.n_inputs);
        for (std::size_t i = 0; i < l.n_inputs; ++i)
            neuron.weights[i] = decode_weight_gene(read_weight(genome, hidden_weight_gene(l, j, i)));
        neuron.bias = decode_weight_gene(read_weight(genome, hidden_bias_gene(l, j)));
    }
    out.phenotype.output_weights.resize(h);
    for (std::size_t j = 0; j < h; ++j)
        out.phenotype.output_weights[j] =
            decode_weight_gene(read_weight(genome, output_weight_gene(l, j)));
    out.phenotype.output_bias = decode_weight_gene(read_weight(genome, output_bias_gene(l)));
    return out;
}

DecodedGenome decode(const Genome& genome, std::size_t n_inputs, std::size_t max_hidden) {
    if (genome.layout != GenomeLayout{n_inputs, max_hidden})
        throw std::invalid_argument("decode: genome layout does not match requested shape");
    return decode(genome);
}

namespace {

// Rewrites only the bits whose decoded value differs from the target, so a
// genome that already decodes to `decoded` is left untouched.
void encode_into(Genome& g, const DecodedGenome& decoded) {
    const GenomeLayout& l = g.layout;
    const NetworkPhenotype& net = decoded.phenotype;
    const std::size_t h = net.hidden.size();

    if (net.n_inputs != l.n_inputs)
        throw std::invalid_argument("encode: phenotype input count does not match layout");
    if (h == 0 || h > l.max_hidden)
        throw std::invalid_argument("encode: hidden count outside [1, max_hidden]");
    validate_network(net);
    validate_spec(decoded.trainer);

    const auto kind_idx = static_cast<std::uint64_t>(decoded.trainer.kind);
    if (read_gene(g, l.alg_offset(), kAlgBits) != kind_idx)
        write_gene(g, l.alg_offset(), kAlgBits, kind_idx);

    const auto ranges = trainer_param_ranges(decoded.trainer.kind);
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const std::size_t off = l.params_offset() + i * kParamBits;
        if (decode_param_gene(read_gene(g, off, kParamBits), ranges[i]) != decoded.trainer.params[i])
            write_gene(g, off, kParamBits, encode_param_gene(decoded.trainer.params[i], ranges[i]));
    }

    if (decode_hidden_count(g) != h)
        write_gene(g, l.arch_offset(), kArchBits, arch_raw_for(h, l.max_hidden));

    for (std::size_t j = 0; j < h; ++j) {
        const std::size_t off = l.act_offset() + j * kActBits;
        const auto want = static_cast<std::uint64_t>(net.hidden[j].activation);
        if (read_gene(g, off, kActBits) % kActivationCount != want)
            write_gene(g, off, kActBits, want);
    }

    auto put_weight = [&](std::size_t gene, double v) {
        if (decode_weight_gene(read_weight(g, gene)) != v)
            write_weight(g, gene, encode_weight_gene(v));
    };
    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t i = 0; i < l.n_inputs; ++i)
            put_weight(hidden_weight_gene(l, j, i), net.hidden[j].weights[i]);
        put_weight(hidden_bias_gene(l, j), net.hidden[j].bias);
    }
    for (std::size_t j = 0; j < h; ++j) put_weight(output_weight_gene(l, j), net.output_weights[j]);
    put_weight(output_bias_gene(l), net.output_bias);
}

}  // namespace

Genome encode(const DecodedGenome& decoded, const GenomeLayout& layout) {
    check_layout(layout);
    Genome g = zero_genome(layout.n_inputs, layout.max_hidden);
    encode_into(g, decoded);
    return g;
}

Genome encode(const DecodedGenome& decoded, const Genome& base) {
    check_genome(base);
    Genome g = base;
    encode_into(g, decoded);
    return g;
}

std::size_t write_trained_weights(Genome& genome, const NetworkPhenotype& net) {
    check_genome(genome);
    const GenomeLayout& l = genome.layout;
    const std::size_t h = net.hidden.size();
    if (net.n_inputs != l.n_inputs || h == 0 || h > l.max_hidden)
        throw std::invalid_argument("write_trained_weights: phenotype does not fit genome layout");
    validate_network(net);

    std::size_t clamped = 0;
    auto put = [&](std::size_t gene, double v) {
        if (v < kWeightGeneLo || v > kWeightGeneHi) ++clamped;
        write_weight(genome, gene, encode_weight_gene(v));
    };
    for (std::size_t j = 0; j < h; ++j) {
        for (std::size_t i = 0; i < l.n_inputs; ++i)
            put(hidden_weight_gene(l, j, i), net.hidden[j].weights[i]);
        put(hidden_bias_gene(l, j), net.hidden[j].bias);
    }
    for (std::size_t j = 0; j < h; ++j) put(output_weight_gene(l, j), net.output_weights[j]);
    put(output_bias_gene(l), net.output_bias);
    return clamped;
}

Genome random_genome(Rng& rng, std::size_t n_inputs, std::size_t max_hidden) {
    Genome g = zero_genome(n_inputs, max_hidden);
    const GenomeLayout& l = g.layout;

    std::uniform_int_distribution<int> bit(0, 1);
    for (std::size_t i = 0; i < l.weights_offset(); ++i)
        g.bits[i] = static_cast<std::uint8_t>(bit(rng));

    // Raw weight values whose decoded weights span [-0.3, +0.3]; the bounds
    // are the tightest 16-bit integers that keep the decoded value inside.
    std::uniform_int_distribution<std::uint32_t> weight_raw(31539, 33996);
    for (std::size_t k = 0; k < l.max_weights(); ++k) write_weight(g, k, weight_raw(rng));
    return g;
}

Genome mutate(const Genome& genome, double mutation_rate, Rng& rng) {
    check_genome(genome);
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        throw std::invalid_argument("mutate: mutation_rate outside [0, 1]");
    const GenomeLayout& l = genome.layout;

    Genome out = genome;
    const std::size_t segments[][2] = {
        {l.alg_offset(), kAlgBits},
        {l.params_offset(), kParamSlots * kParamBits},
        {l.arch_offset(), kArchBits},
        {l.act_offset(), l.max_hidden * kActBits},
        {l.weights_offset(), l.max_weights() * kWeightBits},
    };
    std::bernoulli_distribution hit(mutation_rate);
    for (const auto& [offset, len] : segments) {
        if (!hit(rng)) continue;
        std::uniform_int_distribution<std::size_t> pick(0, len - 1);
        const std::size_t at = offset + pick(rng);
        out.bits[at] ^= 1u;
    }
    return out;
}

std::string genome_to_hex(const Genome& genome) {
    check_genome(genome);
    static constexpr char digits[] = "0123456789abcdef";
    const std::size_t nbytes = (genome.bits.size() + 7) / 8;
    std::string hex(nbytes * 2, '0');
    for (std::size_t b = 0; b < nbytes; ++b) {
        unsigned byte = 0;
        for (std::size_t i = 0; i < 8; ++i) {
            const std::size_t at = b * 8 + i;
            byte = (byte << 1) | (at < genome.bits.size() ? genome.bits[at] : 0u);
        }
        hex[b * 2] = digits[byte >> 4];
        hex[b * 2 + 1] = digits[byte & 0xF];
    }
    return hex;
}

Genome genome_from_hex(const GenomeLayout& layout, const std::string& hex) {
    check_layout(layout);
    const std::size_t total = layout.total_bits();
    const std::size_t nbytes = (total + 7) / 8;
    if (hex.size() != nbytes * 2)
        throw std::invalid_argument("genome_from_hex: expected " + std::to_string(nbytes * 2)
                                    + " hex digits, got " + std::to_string(hex.size()));
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };

    Genome g = zero_genome(layout.n_inputs, layout.max_hidden);
    for (std::size_t b = 0; b < nbytes; ++b) {
        const int hi = nibble(hex[b * 2]), lo = nibble(hex[b * 2 + 1]);
        if (hi < 0 || lo < 0)
            throw std::invalid_argument("genome_from_hex: invalid hex digit at position "
                                        + std::to_string(b * 2 + (hi < 0 ? 0 : 1)));
        const unsigned byte = static_cast<unsigned>(hi << 4 | lo);
        for (std::size_t i = 0; i < 8; ++i) {
            const std::size_t at = b * 8 + i;
            const std::uint8_t bit = static_cast<std::uint8_t>((byte >> (7 - i)) & 1u);
            if (at < total) {
                g.bits[at] = bit;
            } else if (bit) {
                throw std::invalid_argument("genome_from_hex: nonzero padding bits");
            }
        }
    }
    return g;
}

}  // namespace eann

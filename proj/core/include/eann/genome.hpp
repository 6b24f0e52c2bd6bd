#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "eann/network.hpp"
#include "eann/rng.hpp"
#include "eann/trainers.hpp"

namespace eann {

// Bit budget per gene kind.
inline constexpr std::size_t kAlgBits = 2;
inline constexpr std::size_t kParamSlots = 4;   // max parameter count over trainer kinds
inline constexpr std::size_t kParamBits = 8;
inline constexpr std::size_t kArchBits = 5;
inline constexpr std::size_t kActBits = 3;
inline constexpr std::size_t kWeightBits = 16;

inline constexpr double kWeightGeneLo = -8.0;
inline constexpr double kWeightGeneHi = 8.0;

// Fixed bit layout for a given network envelope. Segment order:
// trainer kind, trainer parameters, hidden count, activations, weights.
struct GenomeLayout {
    std::size_t n_inputs = 0;
    std::size_t max_hidden = 0;

    std::size_t alg_offset() const { return 0; }
    std::size_t params_offset() const { return kAlgBits; }
    std::size_t arch_offset() const { return kAlgBits + kParamSlots * kParamBits; }
    std::size_t act_offset() const { return arch_offset() + kArchBits; }
    std::size_t weights_offset() const { return act_offset() + max_hidden * kActBits; }

    // Weight gene count for the full envelope: per-neuron input weights and
    // bias for every hidden slot, one output weight per slot, output bias.
    std::size_t max_weights() const {
        return max_hidden * (n_inputs + 1) + max_hidden + 1;
    }
    std::size_t total_bits() const { return weights_offset() + max_weights() * kWeightBits; }

    bool operator==(const GenomeLayout&) const = default;
};

// Binary genome. Bits are stored one per byte (0 or 1), most significant bit
// of each gene first. Carries its layout so every consumer can locate
// segments without extra bookkeeping.
struct Genome {
    GenomeLayout layout;
    std::vector<std::uint8_t> bits;

    bool operator==(const Genome&) const = default;
    // Tie-break order: bit string lexicographic.
    auto operator<=>(const Genome& other) const { return bits <=> other.bits; }
};

Genome zero_genome(std::size_t n_inputs, std::size_t max_hidden);

// Gene accessors (MSB first). `read_gene` returns the unsigned value of
// `width` bits starting at `offset`; `write_gene` stores it back.
std::uint64_t read_gene(const Genome& g, std::size_t offset, std::size_t width);
void write_gene(Genome& g, std::size_t offset, std::size_t width, std::uint64_t value);

struct DecodedGenome {
    NetworkPhenotype phenotype;
    TrainerSpec trainer;
};

// Every bit string decodes; hidden count lands in [1, max_hidden] and all
// trainer parameters land inside their evolvable ranges.
DecodedGenome decode(const Genome& genome);
DecodedGenome decode(const Genome& genome, std::size_t n_inputs, std::size_t max_hidden);

// Reads the trainer segments under a caller-imposed kind; used when the
// search holds the training algorithm fixed instead of evolving it.
TrainerSpec decode_trainer_spec(const Genome& genome, TrainerKind kind);

// Hidden count selected by the architecture gene.
std::size_t decode_hidden_count(const Genome& genome);

// Canonical encoding of a phenotype/trainer pair. The overload with `base`
// starts from an existing genome and rewrites only the bits needed to make
// it decode to `decoded`; bits that already decode correctly are preserved,
// so encode(decode(g), g) == g.
Genome encode(const DecodedGenome& decoded, const GenomeLayout& layout);
Genome encode(const DecodedGenome& decoded, const Genome& base);

// Lamarckian write-back: stores the trained weights of `net` into the weight
// genes of the first `net.hidden.size()` neuron slots. Values outside
// [-8, 8] are clamped; returns how many were clamped.
std::size_t write_trained_weights(Genome& genome, const NetworkPhenotype& net);

// All segments uniform random except weight genes, whose decoded values are
// uniform on [-0.3, +0.3].
Genome random_genome(Rng& rng, std::size_t n_inputs, std::size_t max_hidden);

// For each of the five segments independently: with probability
// mutation_rate, flip exactly one uniformly chosen bit of that segment.
Genome mutate(const Genome& genome, double mutation_rate, Rng& rng);

// Hex serialization of the bit string (whole bytes, MSB first, zero padded).
std::string genome_to_hex(const Genome& genome);
Genome genome_from_hex(const GenomeLayout& layout, const std::string& hex);

}  // namespace eann

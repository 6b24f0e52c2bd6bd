#pragma once

#include <string>

#include "eann/evolution.hpp"
#include "eann/genome.hpp"
#include "eann/network.hpp"

namespace eann {

// JSON round trips. Every *_from_json inverts its *_to_json bit-exactly
// (shortest-round-trip number formatting on both sides) and throws
// std::invalid_argument on malformed or schema-violating input.
//
// Schemas:
//   genome   {"n_inputs": N, "max_hidden": M, "bits": "<hex>"}
//   network  {"n_inputs": N,
//             "hidden": [{"activation": "T|L|S|T*|L*", "weights": [...], "bias": B}, ...],
//             "output_weights": [...], "output_bias": B}
//   report   {"config": {...}, "generations": [stats...], "best_genomes": [genome...],
//             "best": {"genome": genome, "fitness": F|null,
//                       "trained_phenotype": network|null, "weight_clamps": C},
//             "predictions": [...], "targets": [...], "reached_target": bool}

std::string genome_to_json(const Genome& genome);
Genome genome_from_json(const std::string& text);

std::string phenotype_to_json(const NetworkPhenotype& net);
NetworkPhenotype phenotype_from_json(const std::string& text);

std::string report_to_json(const EvolutionReport& report);
EvolutionReport report_from_json(const std::string& text);

}  // namespace eann

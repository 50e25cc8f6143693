#pragma once

#include "divergent/neat/compatibility.hpp"
#include "divergent/neat/genome.hpp"
#include "divergent/rng.hpp"

#include <map>
#include <span>
#include <utility>
#include <vector>

namespace divergent::neat {

struct NeatParams {
    IoSpec io;
    int population_size = 250;
    CompatibilityCoefficients compatibility;

    double compat_threshold = 6.0;
    double compat_threshold_step = 0.3;
    double compat_threshold_min = 0.3;
    int target_species = 10;

    double weight_init_range = 1.0;
    double weight_limit = 8.0;
    double weight_mutation_prob = 0.8;
    double weight_perturb_power = 0.5;
    double weight_replace_prob = 0.1;

    double add_connection_prob = 0.10;
    double add_node_prob = 0.03;
    bool allow_recurrent = true;

    double crossover_prob = 0.75;
    double interspecies_mating_prob = 0.001;
    double disabled_inherit_prob = 0.75;

    int elitism = 1;
    double survival_threshold = 0.2;
    int stagnation_limit = 15;

    double sigmoid_slope = 1.0;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

/// Hands out innovation numbers and hidden node ids. Structural mutations
/// that recur within one generation reuse the numbers issued the first time.
class InnovationTracker {
public:
    InnovationTracker() = default;
    InnovationTracker(Innovation next_innovation, NodeId next_node) : next_innovation_(next_innovation), next_node_(next_node) {}

    Innovation connection(NodeId from, NodeId to);

    struct Split {
        NodeId node;
        Innovation in;
        Innovation out;
    };
    Split split(Innovation connection_innovation);

    void new_generation();

    Innovation next_innovation() const { return next_innovation_; }
    NodeId next_node() const { return next_node_; }

private:
    Innovation next_innovation_ = 0;
    NodeId next_node_ = 0;
    std::map<std::pair<NodeId, NodeId>, Innovation> links_this_generation_;
    std::map<Innovation, Split> splits_this_generation_;
};

struct Species {
    int id = 0;
    Genome representative;
    std::vector<std::size_t> members;
    double best_score = 0.0;
    int last_improved = 0; // generation of the last best_score improvement
    int created = 0;
};

struct Population {
    std::vector<Genome> members;
    std::vector<Species> species;
    InnovationTracker innovations;
    double compat_threshold = 6.0;
    int generation = 1;
    int next_species_id = 1;

    std::size_t size() const { return members.size(); }
};

/// P minimal genomes: every input and the bias fully connected to every output.
Population init_population(const NeatParams& params, Rng& rng);

/// Assigns each member to the first species whose representative lies within
/// threshold, founding new species otherwise. Existing species keep their
/// representatives for the comparison; afterwards each surviving species takes
/// its member closest to the old representative as the new one. Species left
/// without members are dropped.
void speciate(Population& pop, const CompatibilityCoefficients& coeffs, double threshold);

/// Next generation of the same size: explicit fitness sharing, per-species
/// elitism, crossover within species, structural and weight mutation, then
/// speciation with the threshold nudged toward the target species count.
Population reproduce(const Population& pop, std::span<const double> scores, const NeatParams& params, Rng& rng);

// Variation operators, exposed for testing.
Genome crossover(const Genome& fitter, const Genome& other, bool equal_fitness, const NeatParams& params, Rng& rng);
void mutate_weights(Genome& g, const NeatParams& params, Rng& rng);
bool mutate_add_connection(Genome& g, InnovationTracker& innovations, const NeatParams& params, Rng& rng);
bool mutate_add_node(Genome& g, InnovationTracker& innovations, Rng& rng);

struct GenomicMetrics {
    double mean_connections = 0.0;
    double mean_hidden_nodes = 0.0;
    double mean_compatibility = 0.0;
    double mean_disjoint = 0.0;
    double mean_weight_difference = 0.0;
    double mean_excess = 0.0;
};

/// Complexity averaged over members; diversity averaged over all unordered pairs.
/// Connection counts are enabled genes only.
GenomicMetrics genomic_metrics(std::span<const Genome> members, const CompatibilityCoefficients& coeffs);

} // namespace divergent::neat

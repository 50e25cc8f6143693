#pragma once

#include "divergent/neat/genome.hpp"

namespace divergent::neat {

struct CompatibilityCoefficients {
    double c1_excess = 1.0;
    double c2_disjoint = 1.0;
    double c3_weight = 3.0;
    /// Gene counts are normalized by the larger genome only when either genome
    /// has at least this many connection genes.
    int normalize_threshold = 20;
};

/// Alignment of two genomes by innovation number.
struct GeneAlignment {
    int excess = 0;
    int disjoint = 0;
    int matching = 0;
    /// Mean |w1 - w2| over matching genes, 0 when there are none.
    double mean_weight_difference = 0.0;
    /// Normalizer N used by the distance.
    double normalizer = 1.0;
};

GeneAlignment align(const Genome& a, const Genome& b, int normalize_threshold);

double compatibility_distance(const Genome& a, const Genome& b, const CompatibilityCoefficients& coeffs);

} // namespace divergent::neat

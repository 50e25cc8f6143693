#include "divergent/neat/compatibility.hpp"

#include <algorithm>
#include <cmath>

namespace divergent::neat {

GeneAlignment align(const Genome& a, const Genome& b, int normalize_threshold)
{
    const auto& ga = a.connections();
    const auto& gb = b.connections();
    GeneAlignment out;
    const Innovation max_a = a.max_innovation();
    const Innovation max_b = b.max_innovation();
    double weight_sum = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ga.size() || j < gb.size()) {
        if (i < ga.size() && j < gb.size() && ga[i].innovation == gb[j].innovation) {
            ++out.matching;
            weight_sum += std::abs(ga[i].weight - gb[j].weight);
            ++i;
            ++j;
        } else if (j == gb.size() || (i < ga.size() && ga[i].innovation < gb[j].innovation)) {
            // gene only in a
            if (ga[i].innovation > max_b)
                ++out.excess;
            else
                ++out.disjoint;
            ++i;
        } else {
            if (gb[j].innovation > max_a)
                ++out.excess;
            else
                ++out.disjoint;
            ++j;
        }
    }
    if (out.matching > 0)
        out.mean_weight_difference = weight_sum / out.matching;
    const std::size_t larger = std::max(ga.size(), gb.size());
    out.normalizer = larger < static_cast<std::size_t>(normalize_threshold) ? 1.0 : static_cast<double>(larger);
    return out;
}

double compatibility_distance(const Genome& a, const Genome& b, const CompatibilityCoefficients& coeffs)
{
    const GeneAlignment al = align(a, b, coeffs.normalize_threshold);
    return coeffs.c1_excess * al.excess / al.normalizer + coeffs.c2_disjoint * al.disjoint / al.normalizer +
           coeffs.c3_weight * al.mean_weight_difference;
}

} // namespace divergent::neat

#include "divergent/neat/population.hpp"

#include "divergent/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace divergent::neat {

void NeatParams::validate() const
{
    auto require = [](bool ok, const char* key, auto value) {
        if (!ok)
            throw ConfigError(fmt::format("neat.{} has invalid value {}", key, value));
    };
    require(io.inputs >= 1, "inputs", io.inputs);
    require(io.outputs >= 1, "outputs", io.outputs);
    require(population_size >= 2, "population_size", population_size);
    require(compatibility.c1_excess >= 0.0, "c1_excess", compatibility.c1_excess);
    require(compatibility.c2_disjoint >= 0.0, "c2_disjoint", compatibility.c2_disjoint);
    require(compatibility.c3_weight >= 0.0, "c3_weight", compatibility.c3_weight);
    require(compatibility.normalize_threshold >= 0, "normalize_threshold", compatibility.normalize_threshold);
    require(compat_threshold > 0.0, "compat_threshold", compat_threshold);
    require(compat_threshold_step >= 0.0, "compat_threshold_step", compat_threshold_step);
    require(compat_threshold_min > 0.0, "compat_threshold_min", compat_threshold_min);
    require(target_species >= 1, "target_species", target_species);
    require(weight_init_range >= 0.0, "weight_init_range", weight_init_range);
    require(weight_limit > 0.0, "weight_limit", weight_limit);
    auto probability = [&](double p, const char* key) { require(p >= 0.0 && p <= 1.0, key, p); };
    probability(weight_mutation_prob, "weight_mutation_prob");
    probability(weight_replace_prob, "weight_replace_prob");
    probability(add_connection_prob, "add_connection_prob");
    probability(add_node_prob, "add_node_prob");
    probability(crossover_prob, "crossover_prob");
    probability(interspecies_mating_prob, "interspecies_mating_prob");
    probability(disabled_inherit_prob, "disabled_inherit_prob");
    require(weight_perturb_power >= 0.0, "weight_perturb_power", weight_perturb_power);
    require(elitism >= 0, "elitism", elitism);
    require(survival_threshold > 0.0 && survival_threshold <= 1.0, "survival_threshold", survival_threshold);
    require(stagnation_limit >= 1, "stagnation_limit", stagnation_limit);
    require(sigmoid_slope > 0.0, "sigmoid_slope", sigmoid_slope);
}

Innovation InnovationTracker::connection(NodeId from, NodeId to)
{
    auto [it, inserted] = links_this_generation_.try_emplace({from, to}, next_innovation_);
    if (inserted)
        ++next_innovation_;
    return it->second;
}

InnovationTracker::Split InnovationTracker::split(Innovation connection_innovation)
{
    auto it = splits_this_generation_.find(connection_innovation);
    if (it != splits_this_generation_.end())
        return it->second;
    Split s{next_node_++, next_innovation_, next_innovation_ + 1};
    next_innovation_ += 2;
    splits_this_generation_.emplace(connection_innovation, s);
    return s;
}

void InnovationTracker::new_generation()
{
    links_this_generation_.clear();
    splits_this_generation_.clear();
}

Population init_population(const NeatParams& params, Rng& rng)
{
    params.validate();
    const IoSpec& io = params.io;
    Population pop;
    pop.members.reserve(static_cast<std::size_t>(params.population_size));
    for (int p = 0; p < params.population_size; ++p) {
        Genome g = Genome::bare(io);
        auto& conns = g.mutable_connections();
        for (int from = 0; from <= io.inputs; ++from)
            for (int o = 0; o < io.outputs; ++o)
                conns.push_back({static_cast<Innovation>(from) * io.outputs + o, from, io.first_output_id() + o,
                                 rng.uniform(-params.weight_init_range, params.weight_init_range), true});
        pop.members.push_back(std::move(g));
    }
    pop.innovations = InnovationTracker(static_cast<Innovation>(io.inputs + 1) * io.outputs, io.first_hidden_id());
    pop.compat_threshold = params.compat_threshold;
    speciate(pop, params.compatibility, pop.compat_threshold);
    return pop;
}

void speciate(Population& pop, const CompatibilityCoefficients& coeffs, double threshold)
{
    for (auto& s : pop.species)
        s.members.clear();
    for (std::size_t i = 0; i < pop.members.size(); ++i) {
        const Genome& g = pop.members[i];
        bool placed = false;
        for (auto& s : pop.species) {
            if (compatibility_distance(g, s.representative, coeffs) < threshold) {
                s.members.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            Species s;
            s.id = pop.next_species_id++;
            s.representative = g;
            s.members.push_back(i);
            s.created = pop.generation;
            s.last_improved = pop.generation;
            pop.species.push_back(std::move(s));
        }
    }
    std::erase_if(pop.species, [](const Species& s) { return s.members.empty(); });
    for (auto& s : pop.species) {
        std::size_t best = s.members.front();
        double best_d = compatibility_distance(pop.members[best], s.representative, coeffs);
        for (std::size_t m : s.members) {
            const double d = compatibility_distance(pop.members[m], s.representative, coeffs);
            if (d < best_d) {
                best_d = d;
                best = m;
            }
        }
        s.representative = pop.members[best];
    }
}

Genome crossover(const Genome& fitter, const Genome& other, bool equal_fitness, const NeatParams& params, Rng& rng)
{
    const auto& ga = fitter.connections();
    const auto& gb = other.connections();
    std::vector<ConnectionGene> genes;
    auto take = [&](ConnectionGene c) {
        for (const auto& g : genes)
            if (g.from == c.from && g.to == c.to)
                return;
        genes.push_back(c);
    };
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ga.size() || j < gb.size()) {
        if (i < ga.size() && j < gb.size() && ga[i].innovation == gb[j].innovation) {
            ConnectionGene c = rng.bernoulli(0.5) ? ga[i] : gb[j];
            if (!ga[i].enabled || !gb[j].enabled)
                c.enabled = !rng.bernoulli(params.disabled_inherit_prob);
            else
                c.enabled = true;
            take(c);
            ++i;
            ++j;
        } else if (j == gb.size() || (i < ga.size() && ga[i].innovation < gb[j].innovation)) {
            if (!equal_fitness || rng.bernoulli(0.5))
                take(ga[i]);
            ++i;
        } else {
            if (equal_fitness && rng.bernoulli(0.5))
                take(gb[j]);
            ++j;
        }
    }

    std::vector<NodeGene> nodes;
    for (const auto& n : fitter.nodes())
        nodes.push_back(n);
    auto ensure = [&](NodeId id) {
        for (const auto& n : nodes)
            if (n.id == id)
                return;
        if (const NodeGene* n = other.find_node(id))
            nodes.push_back(*n);
    };
    for (const auto& c : genes) {
        ensure(c.from);
        ensure(c.to);
    }
    return Genome(std::move(nodes), std::move(genes));
}

void mutate_weights(Genome& g, const NeatParams& params, Rng& rng)
{
    for (auto& c : g.mutable_connections()) {
        if (rng.bernoulli(params.weight_replace_prob))
            c.weight = rng.uniform(-params.weight_init_range, params.weight_init_range);
        else
            c.weight += rng.uniform(-params.weight_perturb_power, params.weight_perturb_power);
        c.weight = std::clamp(c.weight, -params.weight_limit, params.weight_limit);
    }
}

namespace {

// True when `target` can reach `source` along existing links, i.e. adding
// source -> target would close a cycle.
bool reaches(const Genome& g, NodeId target, NodeId source)
{
    if (target == source)
        return true;
    std::vector<NodeId> stack{target};
    std::vector<NodeId> seen{target};
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        for (const auto& c : g.connections()) {
            if (c.from != n || std::find(seen.begin(), seen.end(), c.to) != seen.end())
                continue;
            if (c.to == source)
                return true;
            seen.push_back(c.to);
            stack.push_back(c.to);
        }
    }
    return false;
}

} // namespace

bool mutate_add_connection(Genome& g, InnovationTracker& innovations, const NeatParams& params, Rng& rng)
{
    const auto& nodes = g.nodes();
    std::vector<NodeId> sources;
    std::vector<NodeId> targets;
    for (const auto& n : nodes) {
        if (n.role != NodeRole::output || params.allow_recurrent)
            sources.push_back(n.id);
        if (n.role == NodeRole::hidden || n.role == NodeRole::output)
            targets.push_back(n.id);
    }
    if (sources.empty() || targets.empty())
        return false;
    constexpr int attempts = 20;
    for (int a = 0; a < attempts; ++a) {
        const NodeId from = sources[rng.uniform_int<std::size_t>(0, sources.size() - 1)];
        const NodeId to = targets[rng.uniform_int<std::size_t>(0, targets.size() - 1)];
        if (g.has_link(from, to))
            continue;
        if (!params.allow_recurrent && reaches(g, to, from))
            continue;
        const Innovation innov = innovations.connection(from, to);
        if (g.add_connection({innov, from, to, rng.uniform(-params.weight_init_range, params.weight_init_range), true}))
            return true;
    }
    return false;
}

bool mutate_add_node(Genome& g, InnovationTracker& innovations, Rng& rng)
{
    std::vector<std::size_t> enabled;
    const auto& conns = g.connections();
    for (std::size_t i = 0; i < conns.size(); ++i)
        if (conns[i].enabled)
            enabled.push_back(i);
    if (enabled.empty())
        return false;
    const ConnectionGene old = conns[enabled[rng.uniform_int<std::size_t>(0, enabled.size() - 1)]];
    const auto split = innovations.split(old.innovation);
    if (g.has_node(split.node))
        return false;
    for (auto& c : g.mutable_connections())
        if (c.innovation == old.innovation)
            c.enabled = false;
    g.add_node({split.node, NodeRole::hidden});
    g.add_connection({split.in, old.from, split.node, 1.0, true});
    g.add_connection({split.out, split.node, old.to, old.weight, true});
    return true;
}

namespace {

std::vector<std::size_t> allocate_offspring(std::span<const double> shares, std::size_t total)
{
    std::vector<std::size_t> quota(shares.size(), 0);
    if (shares.empty())
        return quota;
    double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
    std::vector<double> w(shares.begin(), shares.end());
    if (!(sum > 0.0)) {
        std::fill(w.begin(), w.end(), 1.0);
        sum = static_cast<double>(w.size());
    }
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < w.size(); ++s) {
        const double exact = static_cast<double>(total) * w[s] / sum;
        quota[s] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[s];
        remainders.emplace_back(exact - std::floor(exact), s);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < total; r = (r + 1) % remainders.size()) {
        ++quota[remainders[r].second];
        ++assigned;
    }
    return quota;
}

void mutate(Genome& child, InnovationTracker& innovations, const NeatParams& params, Rng& rng)
{
    if (rng.bernoulli(params.add_node_prob))
        mutate_add_node(child, innovations, rng);
    else if (rng.bernoulli(params.add_connection_prob))
        mutate_add_connection(child, innovations, params, rng);
    else if (rng.bernoulli(params.weight_mutation_prob))
        mutate_weights(child, params, rng);
}

} // namespace

Population reproduce(const Population& pop, std::span<const double> scores, const NeatParams& params, Rng& rng)
{
    const std::size_t size = pop.members.size();
    if (scores.size() != size)
        throw std::invalid_argument(fmt::format("reproduce: {} scores for {} members", scores.size(), size));
    for (double s : scores)
        if (!std::isfinite(s))
            throw std::invalid_argument("reproduce: non-finite score");

    Population next;
    next.innovations = pop.innovations;
    next.innovations.new_generation();
    next.generation = pop.generation + 1;
    next.next_species_id = pop.next_species_id;

    const std::size_t global_best =
        static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());

    // Stagnation bookkeeping and culling.
    std::vector<Species> alive;
    for (Species s : pop.species) {
        double best = scores[s.members.front()];
        for (std::size_t m : s.members)
            best = std::max(best, scores[m]);
        if (best > s.best_score) {
            s.best_score = best;
            s.last_improved = pop.generation;
        }
        const bool holds_best = std::find(s.members.begin(), s.members.end(), global_best) != s.members.end();
        if (holds_best || pop.generation - s.last_improved < params.stagnation_limit)
            alive.push_back(std::move(s));
    }

    // Explicit fitness sharing: a species' share is the sum of its members'
    // scores divided by its size.
    std::vector<double> shares;
    for (const auto& s : alive) {
        double sum = 0.0;
        for (std::size_t m : s.members)
            sum += std::max(0.0, scores[m]);
        shares.push_back(sum / static_cast<double>(s.members.size()));
    }
    auto quota = allocate_offspring(shares, size);

    // The species holding the overall best keeps room for its champion.
    for (std::size_t s = 0; s < alive.size(); ++s) {
        const auto& mem = alive[s].members;
        if (std::find(mem.begin(), mem.end(), global_best) == mem.end() || quota[s] > 0 || params.elitism == 0)
            continue;
        const auto donor = static_cast<std::size_t>(std::max_element(quota.begin(), quota.end()) - quota.begin());
        --quota[donor];
        ++quota[s];
    }

    // Ranked survivors per species.
    std::vector<std::vector<std::size_t>> ranked(alive.size());
    for (std::size_t s = 0; s < alive.size(); ++s) {
        ranked[s] = alive[s].members;
        std::stable_sort(ranked[s].begin(), ranked[s].end(),
                         [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    }
    auto pool_size = [&](std::size_t s) {
        const auto n = ranked[s].size();
        auto keep = static_cast<std::size_t>(std::ceil(params.survival_threshold * static_cast<double>(n)));
        return std::clamp<std::size_t>(keep, std::min<std::size_t>(2, n), n);
    };

    next.members.reserve(size);
    for (std::size_t s = 0; s < alive.size(); ++s) {
        const std::size_t n = quota[s];
        if (n == 0)
            continue;
        const auto& order = ranked[s];
        const std::size_t elites = std::min<std::size_t>({static_cast<std::size_t>(params.elitism), n, order.size()});
        for (std::size_t e = 0; e < elites; ++e)
            next.members.push_back(pop.members[order[e]]);
        const std::size_t pool = pool_size(s);
        for (std::size_t c = elites; c < n; ++c) {
            const std::size_t mom = order[rng.uniform_int<std::size_t>(0, pool - 1)];
            Genome child;
            if (rng.bernoulli(params.crossover_prob)) {
                std::size_t dad;
                if (alive.size() > 1 && rng.bernoulli(params.interspecies_mating_prob)) {
                    std::size_t other = rng.uniform_int<std::size_t>(0, alive.size() - 2);
                    if (other >= s)
                        ++other;
                    dad = ranked[other][rng.uniform_int<std::size_t>(0, pool_size(other) - 1)];
                } else {
                    dad = order[rng.uniform_int<std::size_t>(0, pool - 1)];
                }
                const bool mom_fitter = scores[mom] >= scores[dad];
                const Genome& fitter = mom_fitter ? pop.members[mom] : pop.members[dad];
                const Genome& weaker = mom_fitter ? pop.members[dad] : pop.members[mom];
                child = crossover(fitter, weaker, scores[mom] == scores[dad], params, rng);
            } else {
                child = pop.members[mom];
            }
            mutate(child, next.innovations, params, rng);
            next.members.push_back(std::move(child));
        }
    }

    // Threshold drifts toward the target species count.
    double threshold = pop.compat_threshold;
    const auto count = static_cast<int>(pop.species.size());
    if (count < params.target_species)
        threshold = std::max(params.compat_threshold_min, threshold - params.compat_threshold_step);
    else if (count > params.target_species)
        threshold += params.compat_threshold_step;
    next.compat_threshold = threshold;

    next.species = std::move(alive);
    speciate(next, params.compatibility, threshold);
    return next;
}

GenomicMetrics genomic_metrics(std::span<const Genome> members, const CompatibilityCoefficients& coeffs)
{
    GenomicMetrics m;
    if (members.empty())
        return m;
    for (const auto& g : members) {
        m.mean_connections += static_cast<double>(g.enabled_count());
        m.mean_hidden_nodes += static_cast<double>(g.hidden_count());
    }
    m.mean_connections /= static_cast<double>(members.size());
    m.mean_hidden_nodes /= static_cast<double>(members.size());
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
        for (std::size_t j = i + 1; j < members.size(); ++j) {
            const auto al = align(members[i], members[j], coeffs.normalize_threshold);
            m.mean_compatibility += coeffs.c1_excess * al.excess / al.normalizer +
                                    coeffs.c2_disjoint * al.disjoint / al.normalizer +
                                    coeffs.c3_weight * al.mean_weight_difference;
            m.mean_disjoint += al.disjoint;
            m.mean_excess += al.excess;
            m.mean_weight_difference += al.mean_weight_difference;
            ++pairs;
        }
    }
    if (pairs > 0) {
        const auto n = static_cast<double>(pairs);
        m.mean_compatibility /= n;
        m.mean_disjoint /= n;
        m.mean_excess /= n;
        m.mean_weight_difference /= n;
    }
    return m;
}

} // namespace divergent::neat

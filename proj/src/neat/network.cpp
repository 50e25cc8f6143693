#include "divergent/neat/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace divergent::neat {

namespace {

constexpr double lowest_open = std::numeric_limits<double>::denorm_min();
const double highest_open = std::nextafter(1.0, 0.0);

} // namespace

double sigmoid(double x, double slope)
{
    const double s = 1.0 / (1.0 + std::exp(-slope * x));
    return std::clamp(s, lowest_open, highest_open);
}

Network::Network(const Genome& genome, double slope) : slope_(slope)
{
    std::unordered_map<NodeId, std::size_t> slot_of;
    std::vector<NodeId> inputs;
    std::vector<NodeId> others;
    NodeId bias = -1;
    for (const auto& n : genome.nodes()) {
        if (n.role == NodeRole::input)
            inputs.push_back(n.id);
        else if (n.role == NodeRole::bias)
            bias = n.id;
        else
            others.push_back(n.id);
    }
    input_count_ = inputs.size();
    for (std::size_t i = 0; i < inputs.size(); ++i)
        slot_of[inputs[i]] = i;
    bias_slot_ = input_count_;
    if (bias >= 0)
        slot_of[bias] = bias_slot_;
    const std::size_t first_computed = input_count_ + 1;
    for (std::size_t i = 0; i < others.size(); ++i)
        slot_of[others[i]] = first_computed + i;
    node_count_ = genome.nodes().size();
    const std::size_t slots = first_computed + others.size();

    for (const auto& n : genome.nodes())
        if (n.role == NodeRole::output)
            output_slots_.push_back(slot_of.at(n.id));

    // Incoming lists per slot in innovation order.
    std::vector<std::vector<Link>> incoming(slots);
    for (const auto& c : genome.connections()) {
        if (!c.enabled)
            continue;
        auto from = slot_of.find(c.from);
        auto to = slot_of.find(c.to);
        if (from == slot_of.end() || to == slot_of.end() || to->second < first_computed)
            continue;
        incoming[to->second].push_back({from->second, c.weight});
    }
    link_begin_.assign(slots + 1, 0);
    for (std::size_t s = 0; s < slots; ++s) {
        link_begin_[s + 1] = link_begin_[s] + incoming[s].size();
        links_.insert(links_.end(), incoming[s].begin(), incoming[s].end());
    }

    // Kahn's algorithm over computed slots; leftovers mean a cycle.
    std::vector<std::size_t> indegree(slots, 0);
    std::vector<std::vector<std::size_t>> successors(slots);
    for (std::size_t s = first_computed; s < slots; ++s)
        for (std::size_t l = link_begin_[s]; l < link_begin_[s + 1]; ++l)
            if (links_[l].source >= first_computed) {
                ++indegree[s];
                successors[links_[l].source].push_back(s);
            }
    std::vector<std::size_t> order;
    for (std::size_t s = first_computed; s < slots; ++s)
        if (indegree[s] == 0)
            order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head)
        for (std::size_t next : successors[order[head]])
            if (--indegree[next] == 0)
                order.push_back(next);

    recurrent_ = order.size() != slots - first_computed;
    if (recurrent_) {
        computed_.clear();
        for (std::size_t s = first_computed; s < slots; ++s)
            computed_.push_back(s);
    } else {
        computed_ = std::move(order);
    }
    scratch_.assign(slots, 0.0);
    scratch_next_.assign(slots, 0.0);
}

double Network::net_input(std::size_t node, std::span<const double> values) const
{
    double sum = 0.0;
    for (std::size_t l = link_begin_[node]; l < link_begin_[node + 1]; ++l)
        sum += links_[l].weight * values[links_[l].source];
    return sum;
}

void Network::activate(std::span<const double> inputs, std::span<double> outputs) const
{
    if (recurrent_) {
        activate_relaxed(inputs, outputs);
        return;
    }
    auto& v = scratch_;
    std::fill(v.begin(), v.end(), 0.0);
    for (std::size_t i = 0; i < input_count_ && i < inputs.size(); ++i)
        v[i] = inputs[i];
    v[bias_slot_] = 1.0;
    for (std::size_t s : computed_)
        v[s] = sigmoid(net_input(s, v), slope_);
    for (std::size_t o = 0; o < output_slots_.size() && o < outputs.size(); ++o)
        outputs[o] = v[output_slots_[o]];
}

void Network::activate_relaxed(std::span<const double> inputs, std::span<double> outputs) const
{
    auto& cur = scratch_;
    auto& next = scratch_next_;
    std::fill(cur.begin(), cur.end(), 0.0);
    for (std::size_t i = 0; i < input_count_ && i < inputs.size(); ++i)
        cur[i] = inputs[i];
    cur[bias_slot_] = 1.0;
    next = cur;
    const std::size_t first_computed = input_count_ + 1;
    for (std::size_t pass = 0; pass < node_count_; ++pass) {
        for (std::size_t s = first_computed; s < cur.size(); ++s)
            next[s] = sigmoid(net_input(s, cur), slope_);
        std::swap(cur, next);
    }
    for (std::size_t o = 0; o < output_slots_.size() && o < outputs.size(); ++o)
        outputs[o] = cur[output_slots_[o]];
}

std::array<double, 2> activate(const Genome& genome, std::span<const double> inputs, double slope)
{
    Network net(genome, slope);
    std::array<double, 2> out{0.5, 0.5};
    net.activate(inputs, out);
    return out;
}

} // namespace divergent::neat

#include "divergent/neat/genome.hpp"

#include "divergent/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <sstream>

namespace divergent::neat {

std::string_view to_string(NodeRole role)
{
    switch (role) {
    case NodeRole::input:
        return "input";
    case NodeRole::bias:
        return "bias";
    case NodeRole::hidden:
        return "hidden";
    case NodeRole::output:
        return "output";
    }
    return "hidden";
}

NodeRole node_role_from_string(std::string_view text)
{
    if (text == "input")
        return NodeRole::input;
    if (text == "bias")
        return NodeRole::bias;
    if (text == "hidden")
        return NodeRole::hidden;
    if (text == "output")
        return NodeRole::output;
    throw ParseError(fmt::format("unknown node role '{}'", text));
}

Genome::Genome(std::vector<NodeGene> nodes, std::vector<ConnectionGene> connections)
    : nodes_(std::move(nodes)), connections_(std::move(connections))
{
    std::sort(nodes_.begin(), nodes_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::sort(connections_.begin(), connections_.end(),
              [](const auto& a, const auto& b) { return a.innovation < b.innovation; });
}

Genome Genome::bare(const IoSpec& io)
{
    Genome g;
    for (int i = 0; i < io.inputs; ++i)
        g.nodes_.push_back({i, NodeRole::input});
    g.nodes_.push_back({io.bias_id(), NodeRole::bias});
    for (int o = 0; o < io.outputs; ++o)
        g.nodes_.push_back({io.first_output_id() + o, NodeRole::output});
    return g;
}

const NodeGene* Genome::find_node(NodeId id) const
{
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id, [](const NodeGene& n, NodeId v) { return n.id < v; });
    return it != nodes_.end() && it->id == id ? &*it : nullptr;
}

bool Genome::has_node(NodeId id) const { return find_node(id) != nullptr; }

bool Genome::has_link(NodeId from, NodeId to) const
{
    return std::any_of(connections_.begin(), connections_.end(),
                       [&](const ConnectionGene& c) { return c.from == from && c.to == to; });
}

bool Genome::add_node(NodeGene node)
{
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), node.id,
                               [](const NodeGene& n, NodeId v) { return n.id < v; });
    if (it != nodes_.end() && it->id == node.id)
        return false;
    nodes_.insert(it, node);
    return true;
}

bool Genome::add_connection(ConnectionGene conn)
{
    auto it = std::lower_bound(connections_.begin(), connections_.end(), conn.innovation,
                               [](const ConnectionGene& c, Innovation v) { return c.innovation < v; });
    if (it != connections_.end() && it->innovation == conn.innovation)
        return false;
    connections_.insert(it, conn);
    return true;
}

std::size_t Genome::hidden_count() const
{
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const NodeGene& n) { return n.role == NodeRole::hidden; }));
}

std::size_t Genome::enabled_count() const
{
    return static_cast<std::size_t>(
        std::count_if(connections_.begin(), connections_.end(), [](const ConnectionGene& c) { return c.enabled; }));
}

std::string Genome::validate(const IoSpec& io) const
{
    int inputs = 0;
    int biases = 0;
    int outputs = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (i > 0 && nodes_[i - 1].id >= n.id)
            return fmt::format("node ids not strictly increasing at {}", n.id);
        switch (n.role) {
        case NodeRole::input:
            if (n.id < 0 || n.id >= io.inputs)
                return fmt::format("input node {} outside the input id range", n.id);
            ++inputs;
            break;
        case NodeRole::bias:
            if (n.id != io.bias_id())
                return fmt::format("bias node has id {}, expected {}", n.id, io.bias_id());
            ++biases;
            break;
        case NodeRole::output:
            if (n.id < io.first_output_id() || n.id >= io.first_hidden_id())
                return fmt::format("output node {} outside the output id range", n.id);
            ++outputs;
            break;
        case NodeRole::hidden:
            if (n.id < io.first_hidden_id())
                return fmt::format("hidden node {} collides with the io id range", n.id);
            break;
        }
    }
    if (inputs != io.inputs || biases != 1 || outputs != io.outputs)
        return fmt::format("expected {} inputs, 1 bias, {} outputs; found {}, {}, {}", io.inputs, io.outputs, inputs,
                           biases, outputs);
    for (std::size_t i = 0; i < connections_.size(); ++i) {
        const auto& c = connections_[i];
        if (i > 0 && connections_[i - 1].innovation >= c.innovation)
            return fmt::format("innovation numbers not strictly increasing at {}", c.innovation);
        const NodeGene* from = find_node(c.from);
        const NodeGene* to = find_node(c.to);
        if (!from || !to)
            return fmt::format("connection {} references a missing node", c.innovation);
        if (to->role == NodeRole::input || to->role == NodeRole::bias)
            return fmt::format("connection {} targets an input or bias node", c.innovation);
    }
    return {};
}

bool Genome::same_structure(const Genome& other) const
{
    if (nodes_ != other.nodes_ || connections_.size() != other.connections_.size())
        return false;
    for (std::size_t i = 0; i < connections_.size(); ++i) {
        const auto& a = connections_[i];
        const auto& b = other.connections_[i];
        if (a.innovation != b.innovation || a.from != b.from || a.to != b.to || a.enabled != b.enabled)
            return false;
    }
    return true;
}

std::string to_text(const Genome& genome)
{
    std::string out;
    for (const auto& n : genome.nodes())
        out += fmt::format("node {} {}\n", n.id, to_string(n.role));
    for (const auto& c : genome.connections())
        out += fmt::format("conn {} {} {} {:.17g} {}\n", c.innovation, c.from, c.to, c.weight, c.enabled ? 1 : 0);
    return out;
}

Genome genome_from_text(std::string_view text)
{
    std::vector<NodeGene> nodes;
    std::vector<ConnectionGene> connections;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::string kind;
        if (!(fields >> kind))
            continue;
        if (kind == "node") {
            NodeGene n;
            std::string role;
            if (!(fields >> n.id >> role))
                throw ParseError("expected 'node <id> <role>'", line_no);
            try {
                n.role = node_role_from_string(role);
            } catch (const ParseError& e) {
                throw ParseError(e.what(), line_no);
            }
            nodes.push_back(n);
        } else if (kind == "conn") {
            ConnectionGene c;
            int enabled = 0;
            if (!(fields >> c.innovation >> c.from >> c.to >> c.weight >> enabled) || (enabled != 0 && enabled != 1))
                throw ParseError("expected 'conn <innov> <from> <to> <weight> <0|1>'", line_no);
            c.enabled = enabled == 1;
            connections.push_back(c);
        } else {
            throw ParseError(fmt::format("unknown record '{}'", kind), line_no);
        }
        std::string extra;
        if (fields >> extra)
            throw ParseError(fmt::format("trailing field '{}'", extra), line_no);
    }
    return Genome(std::move(nodes), std::move(connections));
}

} // namespace divergent::neat

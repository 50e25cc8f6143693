#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace divergent::neat {

enum class NodeRole : std::uint8_t { input, bias, hidden, output };

std::string_view to_string(NodeRole role);
NodeRole node_role_from_string(std::string_view text);

using NodeId = int;
using Innovation = std::int64_t;

struct NodeGene {
    NodeId id = 0;
    NodeRole role = NodeRole::hidden;

    friend bool operator==(const NodeGene&, const NodeGene&) = default;
};

struct ConnectionGene {
    Innovation innovation = 0;
    NodeId from = 0;
    NodeId to = 0;
    double weight = 0.0;
    bool enabled = true;

    friend bool operator==(const ConnectionGene&, const ConnectionGene&) = default;
};

/// Network interface shared by every genome of a population. Node ids are laid
/// out as inputs [0, inputs), the bias node, then outputs; hidden nodes follow.
struct IoSpec {
    int inputs = 10;
    int outputs = 2;

    NodeId bias_id() const { return inputs; }
    NodeId first_output_id() const { return inputs + 1; }
    NodeId first_hidden_id() const { return inputs + 1 + outputs; }

    friend bool operator==(const IoSpec&, const IoSpec&) = default;
};

/// NEAT genome. Nodes are kept sorted by id and connections by innovation number.
class Genome {
public:
    Genome() = default;
    Genome(std::vector<NodeGene> nodes, std::vector<ConnectionGene> connections);

    /// Input, bias and output nodes with no connections.
    static Genome bare(const IoSpec& io);

    const std::vector<NodeGene>& nodes() const { return nodes_; }
    const std::vector<ConnectionGene>& connections() const { return connections_; }
    std::vector<ConnectionGene>& mutable_connections() { return connections_; }

    bool has_node(NodeId id) const;
    const NodeGene* find_node(NodeId id) const;
    bool has_link(NodeId from, NodeId to) const;

    /// Inserts keeping id order; returns false if the id already exists.
    bool add_node(NodeGene node);
    /// Inserts keeping innovation order; returns false if the innovation already exists.
    bool add_connection(ConnectionGene conn);

    std::size_t hidden_count() const;
    std::size_t enabled_count() const;
    Innovation max_innovation() const { return connections_.empty() ? -1 : connections_.back().innovation; }

    /// Empty string when the genome is well formed, otherwise the first violation.
    std::string validate(const IoSpec& io) const;

    /// Same nodes and same connection topology (innovation, endpoints, enabled), weights ignored.
    bool same_structure(const Genome& other) const;

    friend bool operator==(const Genome&, const Genome&) = default;

private:
    std::vector<NodeGene> nodes_;
    std::vector<ConnectionGene> connections_;
};

/// Line-oriented text: `node <id> <role>` and `conn <innov> <from> <to> <weight> <enabled>`.
std::string to_text(const Genome& genome);
Genome genome_from_text(std::string_view text);

} // namespace divergent::neat

#pragma once

#include "divergent/neat/genome.hpp"

#include <array>
#include <span>
#include <vector>

namespace divergent::neat {

/// Logistic activation clamped into the open interval (0, 1).
double sigmoid(double x, double slope = 1.0);

/// Phenotype compiled from a genome for repeated activation.
///
/// Each activation starts from zero node state. Acyclic networks are
/// evaluated in one topological sweep; networks with cycles are relaxed
/// synchronously for as many passes as the genome has nodes. For acyclic
/// networks the two procedures agree bit for bit, since every node's sum is
/// accumulated over the same incoming list in the same order.
class Network {
public:
    explicit Network(const Genome& genome, double slope = 1.0);

    /// Writes one value per output node, in output id order.
    void activate(std::span<const double> inputs, std::span<double> outputs) const;

    /// Always the synchronous relaxation, whatever the topology.
    void activate_relaxed(std::span<const double> inputs, std::span<double> outputs) const;

    bool recurrent() const { return recurrent_; }
    std::size_t node_count() const { return node_count_; }
    std::size_t input_count() const { return input_count_; }
    std::size_t output_count() const { return output_slots_.size(); }

private:
    struct Link {
        std::size_t source;
        double weight;
    };

    double net_input(std::size_t node, std::span<const double> values) const;

    double slope_;
    std::size_t node_count_ = 0;
    std::size_t input_count_ = 0;
    std::size_t bias_slot_ = 0;
    bool recurrent_ = false;
    // Slots: inputs [0, input_count_), bias, then every other node.
    std::vector<std::size_t> link_begin_; // per slot, CSR offsets into links_
    std::vector<Link> links_;
    std::vector<std::size_t> computed_;   // non-input slots in evaluation order
    std::vector<std::size_t> output_slots_;
    mutable std::vector<double> scratch_;
    mutable std::vector<double> scratch_next_;
};

/// Convenience wrapper for the robot interface: 10 inputs in [0, 1], 2 outputs.
std::array<double, 2> activate(const Genome& genome, std::span<const double> inputs, double slope = 1.0);

} // namespace divergent::neat

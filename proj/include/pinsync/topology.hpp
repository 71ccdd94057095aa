#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pinsync/matrix.hpp"

namespace pinsync {

using Edge = std::pair<std::size_t, std::size_t>;

// Undirected simple graph on nodes 0..n-1. Edges are stored normalized
// (first < second), sorted, and unique.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n_nodes) : n_(n_nodes) {}

    // Throws InvalidSize on self-loops or out-of-range endpoints.
    // Duplicate pairs (in either orientation) are merged.
    Graph(std::size_t n_nodes, std::vector<Edge> edges);

    std::size_t n_nodes() const noexcept { return n_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t n_edges() const noexcept { return edges_.size(); }
    bool has_edge(std::size_t i, std::size_t j) const;

    friend bool operator==(const Graph&, const Graph&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Edge> edges_;
};

// Branch sizes of a cluster of stars, nondecreasing, each >= 1.
struct ClusterSpec {
    std::vector<std::size_t> branch_sizes;

    std::size_t n_centers() const noexcept { return branch_sizes.size(); }
    std::size_t n_nodes() const noexcept;
};

// The coupling matrix is the negated graph Laplacian: off-diagonal 1 per edge,
// diagonal minus the degree.
using CouplingMatrix = Matrix;

// Node 0 is the hub; nodes 1..n-1 are leaves.
Graph star(std::size_t n);

// Centers 0..k-1 form a complete graph; center i's leaves follow the leaves
// of centers 0..i-1, starting at index k.
Graph cluster_stars(const ClusterSpec& spec);

// Preferential attachment grown from a complete graph on m0 nodes. Each new
// node draws m distinct targets with probability proportional to the degrees
// at the moment it arrives; repeated targets are redrawn.
Graph barabasi_albert(std::size_t n, std::size_t m0, std::size_t m, std::uint64_t seed);

CouplingMatrix coupling_matrix(const Graph& g);

bool is_connected(const Graph& g);

std::vector<std::size_t> degrees(const Graph& g);

// Edge-list text: a header line `N <n>` then one `i j` pair per line.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);

}  // namespace pinsync

#include "pinsync/topology.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "pinsync/errors.hpp"
#include "pinsync/rng.hpp"

namespace pinsync {

Graph::Graph(std::size_t n_nodes, std::vector<Edge> edges) : n_(n_nodes), edges_(std::move(edges)) {
    for (auto& [a, b] : edges_) {
        if (a == b) throw InvalidSize("self-loop on node " + std::to_string(a));
        if (a >= n_ || b >= n_) throw InvalidSize("edge endpoint out of range");
        if (a > b) std::swap(a, b);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
}

bool Graph::has_edge(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
}

std::size_t ClusterSpec::n_nodes() const noexcept {
    return branch_sizes.size() +
           std::accumulate(branch_sizes.begin(), branch_sizes.end(), std::size_t{0});
}

Graph star(std::size_t n) {
    if (n < 2) throw InvalidSize("star needs at least 2 nodes");
    std::vector<Edge> edges;
    edges.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) edges.emplace_back(0, i);
    return Graph(n, std::move(edges));
}

Graph cluster_stars(const ClusterSpec& spec) {
    const auto& sizes = spec.branch_sizes;
    if (sizes.empty()) throw InvalidSize("cluster spec has no centers");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1) throw InvalidSize("every center needs at least one leaf");
        if (i > 0 && sizes[i] < sizes[i - 1])
            throw InvalidSize("branch sizes must be nondecreasing");
    }
    const std::size_t k = sizes.size();
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) edges.emplace_back(i, j);
    std::size_t next = k;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t l = 0; l < sizes[i]; ++l) edges.emplace_back(i, next++);
    return Graph(next, std::move(edges));
}

Graph barabasi_albert(std::size_t n, std::size_t m0, std::size_t m, std::uint64_t seed) {
    if (!(1 <= m && m <= m0 && m0 < n))
        throw InvalidSize("barabasi_albert requires 1 <= m <= m0 < N");
    Rng rng(seed);
    std::vector<Edge> edges;
    std::vector<std::size_t> degree(n, 0);
    for (std::size_t i = 0; i < m0; ++i) {
        for (std::size_t j = i + 1; j < m0; ++j) {
            edges.emplace_back(i, j);
            ++degree[i];
            ++degree[j];
        }
    }
    std::vector<std::size_t> targets;
    for (std::size_t v = m0; v < n; ++v) {
        // Degrees are frozen while node v picks its targets.
        const std::size_t total = std::accumulate(degree.begin(), degree.begin() + v, std::size_t{0});
        targets.clear();
        while (targets.size() < m) {
            std::size_t w = 0;
            if (total == 0) {
                w = rng.below(v);  // m0 == 1: the seed node has no degree yet
            } else {
                std::uint64_t ticket = rng.below(total);
                while (ticket >= degree[w]) ticket -= degree[w++];
            }
            if (std::find(targets.begin(), targets.end(), w) == targets.end()) targets.push_back(w);
        }
        for (std::size_t w : targets) {
            edges.emplace_back(w, v);
            ++degree[w];
            ++degree[v];
        }
    }
    return Graph(n, std::move(edges));
}

CouplingMatrix coupling_matrix(const Graph& g) {
    const std::size_t n = g.n_nodes();
    CouplingMatrix a(n, n);
    for (const auto& [i, j] : g.edges()) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
        a(i, i) -= 1.0;
        a(j, j) -= 1.0;
    }
    return a;
}

bool is_connected(const Graph& g) {
    const std::size_t n = g.n_nodes();
    if (n == 0) return true;
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [i, j] : g.edges()) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> queue{0};
    seen[0] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        for (std::size_t w : adj[queue[head]]) {
            if (!seen[w]) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    return queue.size() == n;
}

std::vector<std::size_t> degrees(const Graph& g) {
    std::vector<std::size_t> d(g.n_nodes(), 0);
    for (const auto& [i, j] : g.edges()) {
        ++d[i];
        ++d[j];
    }
    return d;
}

void write_edge_list(std::ostream& os, const Graph& g) {
    os << "N " << g.n_nodes() << '\n';
    for (const auto& [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& is) {
    std::string line;
    std::size_t n = 0;
    bool have_header = false;
    std::vector<Edge> edges;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        if (!have_header) {
            std::string tag;
            if (!(ls >> tag >> n) || tag != "N")
                throw InvalidSize("edge list must start with `N <n>` (line " + std::to_string(line_no) + ")");
            have_header = true;
            continue;
        }
        long long a = 0, b = 0;
        if (!(ls >> a >> b) || a < 0 || b < 0)
            throw InvalidSize("malformed edge on line " + std::to_string(line_no));
        edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    }
    if (!have_header) throw InvalidSize("edge list is missing the `N <n>` header");
    return Graph(n, std::move(edges));
}

}  // namespace pinsync

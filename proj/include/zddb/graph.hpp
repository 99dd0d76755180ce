#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace zddb {

struct GraphEdge {
    int id;       // arm index, 1..d
    int u, v;     // endpoints, 0-based node ids
    double beta;  // nonnegative edge length
};

/// Simple undirected graph whose edges are the bandit arms. Edge ids are
/// exactly 1..d in storage order.
class Graph {
public:
    Graph(int n_nodes, std::vector<GraphEdge> edges)
        : n_(n_nodes), edges_(std::move(edges)) {
        if (n_ < 1) throw std::invalid_argument("graph: need at least one node");
        std::set<std::pair<int, int>> seen;
        for (std::size_t k = 0; k < edges_.size(); ++k) {
            const GraphEdge& e = edges_[k];
            if (e.id != static_cast<int>(k) + 1)
                throw std::invalid_argument("graph: edge ids must be 1..d with no gaps");
            if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_)
                throw std::invalid_argument("graph: edge " + std::to_string(e.id) +
                                            " references a node out of range");
            if (e.u == e.v)
                throw std::invalid_argument("graph: edge " + std::to_string(e.id) +
                                            " is a self-loop");
            if (e.beta < 0.0)
                throw std::invalid_argument("graph: edge " + std::to_string(e.id) +
                                            " has negative length");
            auto key = std::minmax(e.u, e.v);
            if (!seen.insert(key).second)
                throw std::invalid_argument("graph: duplicate edge between nodes " +
                                            std::to_string(key.first) + " and " +
                                            std::to_string(key.second));
        }
    }

    int node_count() const { return n_; }
    int arm_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    const GraphEdge& edge(int id) const { return edges_[id - 1]; }

    std::vector<double> betas() const {
        std::vector<double> b;
        b.reserve(edges_.size());
        for (const auto& e : edges_) b.push_back(e.beta);
        return b;
    }

    std::optional<int> start, goal;
    std::vector<int> terminals;

private:
    int n_;
    std::vector<GraphEdge> edges_;
};

struct GridSpec {
    int rows;
    int cols;
};

/// rows x cols lattice with unit-length edges. Nodes are row-major; per node
/// the edge to the right neighbor precedes the edge to the one below, which
/// fixes the arm numbering. Start/goal are the diagonal corners and the
/// terminals are all four corners.
inline Graph build_grid(const GridSpec& spec) {
    if (spec.rows < 2 || spec.cols < 2)
        throw std::invalid_argument("build_grid: rows and cols must be at least 2");
    auto nid = [&](int r, int c) { return r * spec.cols + c; };
    std::vector<GraphEdge> edges;
    int next = 1;
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            if (c + 1 < spec.cols) edges.push_back({next++, nid(r, c), nid(r, c + 1), 1.0});
            if (r + 1 < spec.rows) edges.push_back({next++, nid(r, c), nid(r + 1, c), 1.0});
        }
    }
    Graph g(spec.rows * spec.cols, std::move(edges));
    g.start = 0;
    g.goal = nid(spec.rows - 1, spec.cols - 1);
    g.terminals = {0, nid(0, spec.cols - 1), nid(spec.rows - 1, 0),
                   nid(spec.rows - 1, spec.cols - 1)};
    return g;
}

// --- edge-list format ---
//
//   graph <n_nodes> <n_edges>
//   <edge_id> <u> <v> <beta>      (one line per edge, ids 1..d in order)
//   start <node>                  (optional)
//   goal <node>                   (optional)
//   terminal <node>               (optional, repeatable)

inline Graph read_graph(std::istream& is) {
    auto fail = [](int line, const std::string& what) -> void {
        throw std::invalid_argument("graph parse error at line " + std::to_string(line) + ": " +
                                    what);
    };
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            auto pos = line.find_first_not_of(" \t\r\n");
            if (pos != std::string::npos && line[pos] != '#') return true;
        }
        return false;
    };

    if (!next_line()) fail(1, "missing header");
    std::istringstream hs(line);
    std::string tag;
    int n_nodes = 0, n_edges = 0;
    if (!(hs >> tag >> n_nodes >> n_edges) || tag != "graph")
        fail(lineno, "expected `graph <n_nodes> <n_edges>`");
    if (n_nodes < 1 || n_edges < 0) fail(lineno, "bad node or edge count");

    std::vector<GraphEdge> edges;
    edges.reserve(n_edges);
    for (int k = 0; k < n_edges; ++k) {
        if (!next_line()) fail(lineno + 1, "unexpected end of file in edge list");
        std::istringstream es(line);
        int id, u, v;
        double beta;
        if (!(es >> id >> u >> v >> beta)) fail(lineno, "expected `<edge_id> <u> <v> <beta>`");
        if (id != k + 1) fail(lineno, "edge ids must be 1..d in file order");
        edges.push_back({id, u, v, beta});
    }

    std::optional<int> start, goal;
    std::vector<int> terminals;
    while (next_line()) {
        std::istringstream os(line);
        int node;
        if (!(os >> tag >> node)) fail(lineno, "expected `start|goal|terminal <node>`");
        if (node < 0 || node >= n_nodes) fail(lineno, "node out of range");
        if (tag == "start")
            start = node;
        else if (tag == "goal")
            goal = node;
        else if (tag == "terminal")
            terminals.push_back(node);
        else
            fail(lineno, "unknown directive `" + tag + "`");
    }

    int guard_line = lineno;
    try {
        Graph g(n_nodes, std::move(edges));
        g.start = start;
        g.goal = goal;
        g.terminals = std::move(terminals);
        return g;
    } catch (const std::invalid_argument& e) {
        fail(guard_line, e.what());
        throw;  // unreachable
    }
}

/// Breadth-first edge order from `s`: as each node is dequeued its incident
/// edges join the order by ascending edge id. Edges in components never
/// reached from `s` are appended at the end, also by id.
inline std::vector<int> bfs_edge_order(const Graph& g, int s) {
    if (s < 0 || s >= g.node_count())
        throw std::invalid_argument("bfs_edge_order: start node out of range");
    std::vector<std::vector<std::pair<int, int>>> adj(g.node_count());  // (neighbor, edge id)
    for (const auto& e : g.edges()) {
        adj[e.u].push_back({e.v, e.id});
        adj[e.v].push_back({e.u, e.id});
    }
    for (auto& a : adj) std::sort(a.begin(), a.end(), [](auto& x, auto& y) {
        return x.second < y.second;
    });

    std::vector<int> order;
    order.reserve(g.arm_count());
    std::vector<char> edge_used(g.arm_count() + 1, 0), node_seen(g.node_count(), 0);
    std::queue<int> q;
    q.push(s);
    node_seen[s] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        for (auto [v, id] : adj[u]) {
            if (!edge_used[id]) {
                edge_used[id] = 1;
                order.push_back(id);
            }
            if (!node_seen[v]) {
                node_seen[v] = 1;
                q.push(v);
            }
        }
    }
    for (int id = 1; id <= g.arm_count(); ++id)
        if (!edge_used[id]) order.push_back(id);
    return order;
}

}  // namespace zddb

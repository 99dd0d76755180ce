#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "zddb/graph.hpp"
#include "zddb/zdd.hpp"

namespace zddb {

namespace detail {

// Scratch diagram used while building: nodes may be unreduced and ids are in
// creation order. Terminals are 0 and 1, scratch nodes start at 2.
struct ScratchDiagram {
    struct Node {
        int label;
        int lo, hi;
    };
    std::vector<Node> nodes;  // node id = index + 2

    int add(int label, int lo, int hi) {
        nodes.push_back({label, lo, hi});
        return static_cast<int>(nodes.size()) + 1;
    }
    const Node& at(int id) const { return nodes[id - 2]; }
};

// Renumbers a reduced scratch diagram into the canonical id layout: vertices
// grouped by label from d down to 1, sorted by (lo, hi) within a label, ids
// assigned 2,3,... in that order. Unreachable nodes are dropped. Two
// structurally equal diagrams always canonicalize to identical Zdds.
inline Zdd canonicalize(const ScratchDiagram& dg, int root, int d) {
    if (root < 2) return Zdd(d, {}, root);

    std::vector<char> reach(dg.nodes.size() + 2, 0);
    reach[root] = 1;
    for (int v = root; v >= 2; --v) {
        if (!reach[v]) continue;
        reach[dg.at(v).lo] = 1;
        reach[dg.at(v).hi] = 1;
    }

    std::vector<std::vector<int>> by_label(d + 1);
    for (int v = 2; v <= root; ++v)
        if (reach[v]) by_label[dg.at(v).label].push_back(v);

    std::vector<int> new_id(dg.nodes.size() + 2, -1);
    new_id[0] = 0;
    new_id[1] = 1;
    std::vector<ZddVertex> verts;
    int next = 2;
    for (int l = d; l >= 1; --l) {
        auto& group = by_label[l];
        std::vector<std::tuple<int, int, int>> keyed;  // (new lo, new hi, old id)
        keyed.reserve(group.size());
        for (int v : group) keyed.emplace_back(new_id[dg.at(v).lo], new_id[dg.at(v).hi], v);
        std::sort(keyed.begin(), keyed.end());
        for (auto [lo, hi, v] : keyed) {
            new_id[v] = next++;
            verts.push_back(ZddVertex{l, lo, hi});
        }
    }
    return Zdd(d, std::move(verts), new_id[root]);
}

struct TripleHash {
    std::size_t operator()(const std::tuple<int, int, int>& t) const {
        auto [a, b, c] = t;
        std::uint64_t h = static_cast<std::uint64_t>(a);
        h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(b);
        h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(c);
        return static_cast<std::size_t>(h ^ (h >> 32));
    }
};

// Unique table enforcing the sharing rule; the zero-suppression rule is
// applied by collapsing would-be nodes whose 1-arc points at the 0-terminal.
struct UniqueTable {
    ScratchDiagram dg;
    std::unordered_map<std::tuple<int, int, int>, int, TripleHash> table;

    int make(int label, int lo, int hi) {
        if (hi == 0) return lo;
        auto key = std::make_tuple(label, lo, hi);
        auto it = table.find(key);
        if (it != table.end()) return it->second;
        int id = dg.add(label, lo, hi);
        table.emplace(key, id);
        return id;
    }
};

// Members must arrive sorted (each member ascending, family lexicographic,
// no duplicates). Builds the canonical diagram for the range recursively:
// split off members starting with the smallest arm, recurse, and chain the
// per-arm groups from the largest arm down.
inline int build_from_sorted(const Family& fam, std::vector<int> range, std::size_t depth,
                             UniqueTable& ut) {
    bool has_empty = false;
    // group members by their element at `depth`
    std::vector<std::pair<int, std::vector<int>>> groups;  // (arm, member rows)
    for (int row : range) {
        if (fam[row].size() == depth) {
            has_empty = true;
            continue;
        }
        int arm = fam[row][depth];
        if (groups.empty() || groups.back().first != arm) groups.push_back({arm, {}});
        groups.back().second.push_back(row);
    }
    int acc = has_empty ? 1 : 0;
    for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
        int hi = build_from_sorted(fam, std::move(it->second), depth + 1, ut);
        acc = ut.make(it->first, acc, hi);
    }
    return acc;
}

}  // namespace detail

/// Builds the unique ordered, reduced ZDD for an explicit family. Duplicate
/// members collapse; members must be subsets of 1..d.
inline Zdd reduce_from_family(const Family& family, int d) {
    if (d < 1) throw std::invalid_argument("reduce_from_family: arm count must be positive");
    Family fam;
    fam.reserve(family.size());
    for (const auto& member : family) {
        SuperArm m = member;
        std::sort(m.begin(), m.end());
        m.erase(std::unique(m.begin(), m.end()), m.end());
        for (int i : m)
            if (i < 1 || i > d)
                throw std::invalid_argument("reduce_from_family: member arm " +
                                            std::to_string(i) + " outside 1..d");
        fam.push_back(std::move(m));
    }
    std::sort(fam.begin(), fam.end());
    fam.erase(std::unique(fam.begin(), fam.end()), fam.end());

    detail::UniqueTable ut;
    std::vector<int> all(fam.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    int root = detail::build_from_sorted(fam, std::move(all), 0, ut);
    return detail::canonicalize(ut.dg, root, d);
}

/// All simple s-t paths by depth-first search; the independent oracle for the
/// frontier construction. Guarded both by node count and by path count.
inline Family brute_force_st_paths(const Graph& g, int s, int t,
                                   std::uint64_t limit = 1000000) {
    if (s < 0 || s >= g.node_count() || t < 0 || t >= g.node_count())
        throw std::invalid_argument("brute_force_st_paths: endpoint out of range");
    if (s == t) throw std::invalid_argument("brute_force_st_paths: s and t must differ");
    if (g.node_count() > 30)
        throw std::runtime_error("brute_force_st_paths: node cap (30) exceeded");

    std::vector<std::vector<std::pair<int, int>>> adj(g.node_count());
    for (const auto& e : g.edges()) {
        adj[e.u].push_back({e.v, e.id});
        adj[e.v].push_back({e.u, e.id});
    }
    Family out;
    std::vector<char> visited(g.node_count(), 0);
    SuperArm path;
    auto dfs = [&](auto&& self, int u) -> void {
        if (u == t) {
            if (out.size() >= limit)
                throw std::runtime_error("brute_force_st_paths: path cap exceeded");
            SuperArm sorted = path;
            std::sort(sorted.begin(), sorted.end());
            out.push_back(std::move(sorted));
            return;
        }
        for (auto [v, id] : adj[u]) {
            if (visited[v]) continue;
            visited[v] = 1;
            path.push_back(id);
            self(self, v);
            path.pop_back();
            visited[v] = 0;
        }
    };
    visited[s] = 1;
    dfs(dfs, s);
    std::sort(out.begin(), out.end());
    return out;
}

/// All edge subsets forming a tree (connected, acyclic) whose node set
/// includes every terminal. Exhaustive 2^d scan, so d is capped at 22.
inline Family brute_force_steiner_trees(const Graph& g, const std::vector<int>& terminals) {
    const int d = g.arm_count();
    if (d > 22) throw std::runtime_error("brute_force_steiner_trees: edge cap (22) exceeded");
    if (terminals.empty())
        throw std::invalid_argument("brute_force_steiner_trees: need at least one terminal");
    for (int x : terminals)
        if (x < 0 || x >= g.node_count())
            throw std::invalid_argument("brute_force_steiner_trees: terminal out of range");

    const auto& edges = g.edges();
    Family out;
    std::vector<int> parent(g.node_count());
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };

    for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
        for (int i = 0; i < g.node_count(); ++i) parent[i] = i;
        bool acyclic = true;
        std::vector<char> in_sub(g.node_count(), 0);
        for (int k = 0; k < d && acyclic; ++k) {
            if (!(mask >> k & 1u)) continue;
            const GraphEdge& e = edges[k];
            in_sub[e.u] = in_sub[e.v] = 1;
            int ru = find(e.u), rv = find(e.v);
            if (ru == rv) {
                acyclic = false;
                break;
            }
            parent[ru] = rv;
        }
        if (!acyclic) continue;
        bool all_terms = true;
        for (int x : terminals)
            if (!in_sub[x]) {
                all_terms = false;
                break;
            }
        if (!all_terms) continue;
        // connected: every touched node in one component
        int root = -1;
        bool connected = true;
        for (int i = 0; i < g.node_count() && connected; ++i) {
            if (!in_sub[i]) continue;
            int r = find(i);
            if (root == -1)
                root = r;
            else if (r != root)
                connected = false;
        }
        if (!connected) continue;
        SuperArm tree;
        for (int k = 0; k < d; ++k)
            if (mask >> k & 1u) tree.push_back(k + 1);
        out.push_back(std::move(tree));
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

// Frontier state for the simple-path search: mate[x] = x for untouched
// nodes, the far endpoint of x's path fragment when deg(x) = 1, and kUsed
// once x is interior (deg 2). Cells of nodes that left the frontier are
// reset to their own id so states hash equal regardless of history.
constexpr int kUsed = -1;

struct MateVecHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (int x : v) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(x));
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

struct FrontierLevel {
    std::vector<std::vector<int>> states;                                  // insertion order
    std::unordered_map<std::vector<int>, int, MateVecHash> index;         // state -> scratch id
};

// Raw top-down s-t path search over the given edge processing order.
// Returns the scratch root (possibly a terminal); nodes are labeled by the
// 1-based POSITION in `order`, not by edge id.
inline int frontier_search_positions(const Graph& g, int s, int t,
                                     const std::vector<int>& order, ScratchDiagram& dg) {
    const int d = g.arm_count();
    const int n = g.node_count();

    // last position (1-based) at which each node is incident to an edge
    std::vector<int> last_pos(n, 0);
    for (int pos = 1; pos <= d; ++pos) {
        const GraphEdge& e = g.edge(order[pos - 1]);
        last_pos[e.u] = std::max(last_pos[e.u], pos);
        last_pos[e.v] = std::max(last_pos[e.v], pos);
    }
    std::vector<std::vector<int>> exits(d + 1);  // nodes leaving after each position
    for (int x = 0; x < n; ++x)
        if (last_pos[x] > 0) exits[last_pos[x]].push_back(x);

    // frontier after each position, used by the completion scan
    std::vector<int> first_pos(n, d + 1);
    for (int pos = d; pos >= 1; --pos) {
        const GraphEdge& e = g.edge(order[pos - 1]);
        first_pos[e.u] = pos;
        first_pos[e.v] = pos;
    }
    std::vector<std::vector<int>> frontier_before(d + 2);  // nodes with first <= pos <= last
    for (int x = 0; x < n; ++x)
        for (int pos = first_pos[x]; pos <= last_pos[x]; ++pos) frontier_before[pos].push_back(x);

    // Applies the end-of-position checks to `mate`; false means a constraint
    // can no longer be met on this branch.
    auto apply_exits = [&](std::vector<int>& mate, int pos) -> bool {
        for (int x : exits[pos]) {
            if (x == s || x == t) {
                if (mate[x] == x) return false;  // s/t finished with degree 0
            } else {
                if (mate[x] != x && mate[x] != kUsed) return false;  // open fragment dies here
            }
        }
        for (int x : exits[pos]) mate[x] = x;  // canonical value for off-frontier cells
        return true;
    };

    std::vector<int> initial(n);
    for (int x = 0; x < n; ++x) initial[x] = x;

    FrontierLevel level;
    level.states.push_back(initial);
    level.index.emplace(std::move(initial), dg.add(1, 0, 0));
    const int scratch_root = 2;

    for (int pos = 1; pos <= d; ++pos) {
        const GraphEdge& e = g.edge(order[pos - 1]);
        FrontierLevel next;
        auto child_for = [&](std::vector<int>&& state) -> int {
            auto it = next.index.find(state);
            if (it != next.index.end()) return it->second;
            int id = dg.add(pos + 1, 0, 0);
            next.states.push_back(state);
            next.index.emplace(std::move(state), id);
            return id;
        };

        for (std::size_t si = 0; si < level.states.size(); ++si) {
            const std::vector<int>& cur = level.states[si];
            const int node_id = level.index.at(cur);

            // 0-branch: skip the edge
            int lo = 0;
            {
                std::vector<int> state = cur;
                if (apply_exits(state, pos))
                    lo = (pos == d) ? 0 : child_for(std::move(state));
            }

            // 1-branch: take the edge
            int hi = 0;
            {
                const int mu = cur[e.u], mv = cur[e.v];
                bool feasible = mu != kUsed && mv != kUsed;   // no third edge at a node
                if (feasible && (e.u == s || e.u == t) && mu != e.u) feasible = false;
                if (feasible && (e.v == s || e.v == t) && mv != e.v) feasible = false;
                if (feasible && mu == e.v) feasible = false;  // closes a cycle
                if (feasible) {
                    if ((mu == s && mv == t) || (mu == t && mv == s)) {
                        // merging the s- and t-fragments completes the path;
                        // valid iff no other fragment is open anywhere
                        bool clean = true;
                        for (int x : frontier_before[pos]) {
                            if (x == e.u || x == e.v || x == mu || x == mv) continue;
                            if (cur[x] != x && cur[x] != kUsed) {
                                clean = false;
                                break;
                            }
                        }
                        hi = clean ? 1 : 0;
                    } else {
                        std::vector<int> state = cur;
                        // fragment endpoints point at each other; cells of
                        // nodes already off the frontier stay canonical
                        // (they are never read again)
                        if (last_pos[mu] >= pos) state[mu] = mv;
                        if (last_pos[mv] >= pos) state[mv] = mu;
                        if (e.u != mu) state[e.u] = kUsed;
                        if (e.v != mv) state[e.v] = kUsed;
                        if (apply_exits(state, pos))
                            hi = (pos == d) ? 0 : child_for(std::move(state));
                    }
                }
            }

            dg.nodes[node_id - 2].lo = lo;
            dg.nodes[node_id - 2].hi = hi;
        }
        level = std::move(next);
    }
    return scratch_root;
}

// Bottom-up reduction of a scratch diagram whose children always have larger
// ids than their parents (top-down creation order).
inline int reduce_scratch(const ScratchDiagram& raw, int raw_root, UniqueTable& ut) {
    if (raw_root < 2) return raw_root;
    std::vector<int> red(raw.nodes.size() + 2);
    red[0] = 0;
    red[1] = 1;
    for (int v = static_cast<int>(raw.nodes.size()) + 1; v >= 2; --v) {
        const auto& nd = raw.at(v);
        red[v] = ut.make(nd.label, red[nd.lo], red[nd.hi]);
    }
    return red[raw_root];
}

}  // namespace detail

/// ZDD of all simple s-t paths of `g`, built by frontier search.
///
/// `edge_order` is the construction (variable) order; it defaults to
/// breadth-first from `s`. The returned diagram is always relabeled to arm
/// ids and reordered so labels ascend along routes: the identity order maps
/// directly, while any other order goes through an enumerate-and-rebuild
/// pass that is capped at `rebuild_limit` paths.
inline Zdd build_st_paths(const Graph& g, int s, int t, std::vector<int> edge_order = {},
                          std::uint64_t rebuild_limit = 5000000) {
    if (s < 0 || s >= g.node_count() || t < 0 || t >= g.node_count())
        throw std::invalid_argument("build_st_paths: endpoint not in graph");
    if (s == t) throw std::invalid_argument("build_st_paths: s and t must differ");
    const int d = g.arm_count();
    if (d == 0) return Zdd(1, {}, 0);

    if (edge_order.empty()) edge_order = bfs_edge_order(g, s);
    {
        std::vector<char> seen(d + 1, 0);
        if (static_cast<int>(edge_order.size()) != d)
            throw std::invalid_argument("build_st_paths: edge_order must list every edge once");
        for (int id : edge_order) {
            if (id < 1 || id > d || seen[id])
                throw std::invalid_argument("build_st_paths: edge_order is not a permutation");
            seen[id] = 1;
        }
    }

    detail::ScratchDiagram raw;
    int raw_root = detail::frontier_search_positions(g, s, t, edge_order, raw);
    detail::UniqueTable ut;
    int root = detail::reduce_scratch(raw, raw_root, ut);

    bool identity = true;
    for (int k = 0; k < d; ++k)
        if (edge_order[k] != k + 1) {
            identity = false;
            break;
        }
    Zdd by_position = detail::canonicalize(ut.dg, root, d);
    if (identity) return by_position;

    // Positions are not arm ids: rebuild in identity label order.
    Family fam = [&] {
        try {
            return enumerate_family(by_position, rebuild_limit);
        } catch (const std::runtime_error&) {
            throw std::runtime_error(
                "build_st_paths: family too large to reorder; use the identity edge order");
        }
    }();
    for (auto& member : fam) {
        for (int& p : member) p = edge_order[p - 1];
        std::sort(member.begin(), member.end());
    }
    return reduce_from_family(fam, d);
}

}  // namespace zddb

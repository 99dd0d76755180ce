#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "zddb/builder.hpp"
#include "zddb/graph.hpp"
#include "zddb/rng.hpp"
#include "zddb/zdd.hpp"

namespace testsupport {

// The running example family: all start-goal paths of a 5-edge network,
// S = {{1,4},{2,5},{1,3,5},{2,3,4}} over d = 5.
inline zddb::Family example_family() {
    return {{1, 4}, {2, 5}, {1, 3, 5}, {2, 3, 4}};
}

inline zddb::Zdd example_zdd() {
    return zddb::reduce_from_family(example_family(), 5);
}

// The same diagram spelled out vertex by vertex, for fixture-level checks.
inline zddb::Zdd example_zdd_literal() {
    return zddb::Zdd(5,
                     {
                         {5, 0, 1},  // id 2
                         {4, 0, 1},  // id 3
                         {3, 2, 3},  // id 4
                         {3, 3, 2},  // id 5
                         {2, 0, 4},  // id 6
                         {1, 6, 5},  // id 7
                     },
                     7);
}

inline zddb::Family sorted_family(zddb::Family f) {
    std::sort(f.begin(), f.end());
    return f;
}

inline zddb::Family random_family(int d, int max_members, zddb::Rng& rng) {
    std::set<zddb::SuperArm> members;
    const int want = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_members));
    for (int k = 0; k < want; ++k) {
        zddb::SuperArm x;
        for (int i = 1; i <= d; ++i)
            if (rng() % 3 == 0) x.push_back(i);
        members.insert(x);
    }
    return zddb::Family(members.begin(), members.end());
}

inline std::vector<double> random_log_weights(int d, zddb::Rng& rng) {
    std::vector<double> w(d);
    for (double& x : w) x = 6.0 * zddb::uniform01(rng) - 3.0;
    return w;
}

inline zddb::Graph random_connected_graph(int n_nodes, int extra_edges, zddb::Rng& rng) {
    std::vector<std::pair<int, int>> pairs;
    std::set<std::pair<int, int>> used;
    for (int v = 1; v < n_nodes; ++v) {
        const int u = static_cast<int>(rng() % static_cast<std::uint64_t>(v));
        pairs.push_back(std::minmax(u, v));
        used.insert(pairs.back());
    }
    for (int k = 0; k < extra_edges; ++k) {
        const int u = static_cast<int>(rng() % static_cast<std::uint64_t>(n_nodes));
        const int v = static_cast<int>(rng() % static_cast<std::uint64_t>(n_nodes));
        if (u == v) continue;
        auto key = std::minmax(u, v);
        if (used.insert(key).second) pairs.push_back(key);
    }
    std::vector<zddb::GraphEdge> edges;
    for (std::size_t k = 0; k < pairs.size(); ++k)
        edges.push_back({static_cast<int>(k) + 1, pairs[k].first, pairs[k].second, 1.0});
    return zddb::Graph(n_nodes, std::move(edges));
}

}  // namespace testsupport

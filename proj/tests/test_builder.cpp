#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"
#include "zddb/builder.hpp"
#include "zddb/graph.hpp"

using namespace zddb;
using testsupport::sorted_family;

TEST_CASE("reduce_from_family on the example family", "[builder]") {
    Family fam = testsupport::example_family();
    Zdd z = reduce_from_family(fam, 5);
    CHECK(count(z) == 4);
    CHECK(sorted_family(enumerate_family(z)) == sorted_family(fam));
    CHECK(z == testsupport::example_zdd_literal());
    CHECK(validate(z).ok());
}

TEST_CASE("reduce_from_family degenerate cases", "[builder]") {
    CHECK(reduce_from_family({{}}, 3).root() == 1);
    CHECK(reduce_from_family({}, 3).root() == 0);
    CHECK_THROWS_AS(reduce_from_family({{1, 7}}, 5), std::invalid_argument);
    CHECK_THROWS_AS(reduce_from_family({{0}}, 5), std::invalid_argument);
}

TEST_CASE("build_grid shapes", "[builder]") {
    Graph g33 = build_grid({3, 3});
    CHECK(g33.node_count() == 9);
    CHECK(g33.arm_count() == 12);
    CHECK(g33.start.value() == 0);
    CHECK(g33.goal.value() == 8);
    CHECK(g33.terminals == std::vector<int>{0, 2, 6, 8});

    Graph g310 = build_grid({3, 10});
    CHECK(g310.node_count() == 30);
    CHECK(g310.arm_count() == 47);

    Graph g22 = build_grid({2, 2});
    CHECK(g22.node_count() == 4);
    CHECK(g22.arm_count() == 4);

    CHECK_THROWS_AS(build_grid({1, 5}), std::invalid_argument);
}

TEST_CASE("build_st_paths on grids", "[builder]") {
    CHECK(count(build_st_paths(build_grid({3, 3}), 0, 8)) == 12);
    CHECK(count(build_st_paths(build_grid({3, 10}), 0, 29)) == 49322);

    // the 12 members are exactly the brute-force s-t paths
    Graph g33 = build_grid({3, 3});
    CHECK(sorted_family(enumerate_family(build_st_paths(g33, 0, 8))) ==
          brute_force_st_paths(g33, 0, 8));

    Graph two_nodes(2, {{1, 0, 1, 1.0}});
    Zdd z = build_st_paths(two_nodes, 0, 1);
    CHECK(count(z) == 1);
    CHECK(sorted_family(enumerate_family(z)) == Family{{1}});

    CHECK_THROWS_AS(build_st_paths(two_nodes, 0, 5), std::invalid_argument);
    CHECK_THROWS_AS(build_st_paths(two_nodes, 1, 1), std::invalid_argument);
}

TEST_CASE("grid path counts grow with width", "[builder]") {
    BigCount prev = 0;
    for (int m = 3; m <= 8; ++m) {
        BigCount c = count(build_st_paths(build_grid({3, m}), 0, 3 * m - 1));
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("brute_force_st_paths", "[builder]") {
    CHECK(brute_force_st_paths(build_grid({3, 3}), 0, 8).size() == 12);
    CHECK(brute_force_st_paths(build_grid({3, 5}), 0, 14).size() == 125);

    Graph two_nodes(2, {{1, 0, 1, 1.0}});
    CHECK(brute_force_st_paths(two_nodes, 0, 1) == Family{{1}});

    // node cap
    std::vector<GraphEdge> chain;
    for (int k = 0; k < 31; ++k) chain.push_back({k + 1, k, k + 1, 1.0});
    Graph long_path(32, std::move(chain));
    CHECK_THROWS_AS(brute_force_st_paths(long_path, 0, 31), std::runtime_error);
}

TEST_CASE("brute_force_steiner_trees", "[builder]") {
    // star: the only tree containing all three leaves uses every edge
    Graph star(4, {{1, 0, 1, 1.0}, {2, 0, 2, 1.0}, {3, 0, 3, 1.0}});
    Family trees = brute_force_steiner_trees(star, {1, 2, 3});
    CHECK(trees == Family{{1, 2, 3}});

    Graph g33 = build_grid({3, 3});
    CHECK(brute_force_steiner_trees(g33, g33.terminals).size() == 266);

    // edge cap
    std::vector<GraphEdge> chain;
    for (int k = 0; k < 23; ++k) chain.push_back({k + 1, k, k + 1, 1.0});
    Graph long_path(24, std::move(chain));
    CHECK_THROWS_AS(brute_force_steiner_trees(long_path, {0, 23}), std::runtime_error);
}

TEST_CASE("read_graph", "[builder]") {
    std::istringstream good(
        "graph 3 2\n"
        "1 0 1 1.5\n"
        "2 1 2 2.0\n"
        "start 0\n"
        "goal 2\n"
        "terminal 0\n"
        "terminal 2\n");
    Graph g = read_graph(good);
    CHECK(g.node_count() == 3);
    CHECK(g.arm_count() == 2);
    CHECK(g.edge(2).beta == 2.0);
    CHECK(g.start.value() == 0);
    CHECK(g.goal.value() == 2);
    CHECK(g.terminals == std::vector<int>{0, 2});

    auto read_str = [](const std::string& text) {
        std::istringstream is(text);
        return read_graph(is);
    };
    CHECK_THROWS_WITH(read_str("graph 3 1\n1 0\n"),
                      Catch::Matchers::ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(read_str("graph 3 2\n1 0 1 1\n1 1 2 1\n"),
                      Catch::Matchers::ContainsSubstring("file order"));
    CHECK_THROWS_WITH(read_str("graph 3 2\n1 0 1 1\n2 1 0 1\n"),
                      Catch::Matchers::ContainsSubstring("duplicate"));
    CHECK_THROWS_AS(read_str("graph 2 1\n1 0 0 1\n"), std::invalid_argument);
}

TEST_CASE("frontier search agrees with brute force on random graphs", "[builder]") {
    Rng rng(314159);
    int nonempty = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 4 + static_cast<int>(rng() % 9);  // up to 12 nodes
        Graph g = testsupport::random_connected_graph(n, 2 + static_cast<int>(rng() % 6), rng);
        const int s = 0, t = n - 1;
        Family brute = brute_force_st_paths(g, s, t);
        Zdd z = build_st_paths(g, s, t);
        REQUIRE(validate(z).ok());
        CHECK(sorted_family(enumerate_family(z)) == brute);
        if (!brute.empty()) {
            ++nonempty;
            // reduction is idempotent through enumeration
            CHECK(reduce_from_family(enumerate_family(z), g.arm_count()) == z);
        }
    }
    CHECK(nonempty > 25);  // the generator must actually exercise the search
}

TEST_CASE("build_st_paths on degenerate graphs", "[builder]") {
    // s and t in different components: no path exists
    Graph split(4, {{1, 0, 1, 1.0}, {2, 2, 3, 1.0}});
    Zdd z = build_st_paths(split, 0, 3);
    CHECK(count(z) == 0);
    CHECK(z.root() == 0);

    // t has no incident edge at all
    Graph dangling(3, {{1, 0, 1, 1.0}});
    CHECK(count(build_st_paths(dangling, 0, 2)) == 0);

    // a stray component alongside a real path: the extra edge never joins
    Graph stray(5, {{1, 0, 1, 1.0}, {2, 1, 2, 1.0}, {3, 3, 4, 1.0}});
    Zdd zs = build_st_paths(stray, 0, 2);
    CHECK(sorted_family(enumerate_family(zs)) == Family{{1, 2}});

    // complete graph on five nodes: every node ordering matters to the
    // frontier, counts still match brute force
    std::vector<GraphEdge> kedges;
    int id = 1;
    for (int u = 0; u < 5; ++u)
        for (int v = u + 1; v < 5; ++v) kedges.push_back({id++, u, v, 1.0});
    Graph k5(5, std::move(kedges));
    CHECK(sorted_family(enumerate_family(build_st_paths(k5, 0, 4))) ==
          brute_force_st_paths(k5, 0, 4));
}

TEST_CASE("edge order only changes the construction, not the result", "[builder]") {
    Graph g = build_grid({3, 4});
    std::vector<int> identity(g.arm_count());
    for (int k = 0; k < g.arm_count(); ++k) identity[k] = k + 1;
    std::vector<int> reversed(identity.rbegin(), identity.rend());

    Zdd by_default = build_st_paths(g, 0, 11);  // breadth-first order
    Zdd by_identity = build_st_paths(g, 0, 11, identity);
    Zdd by_reversed = build_st_paths(g, 0, 11, reversed);
    CHECK(by_default == by_identity);
    CHECK(by_default == by_reversed);

    CHECK_THROWS_AS(build_st_paths(g, 0, 11, {1, 2, 3}), std::invalid_argument);
    std::vector<int> doubled = identity;
    doubled[1] = 1;
    CHECK_THROWS_AS(build_st_paths(g, 0, 11, doubled), std::invalid_argument);
}

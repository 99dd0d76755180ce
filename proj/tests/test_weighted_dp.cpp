#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "support.hpp"
#include "zddb/builder.hpp"
#include "zddb/family_oracle.hpp"
#include "zddb/weighted_dp.hpp"

using namespace zddb;
using testsupport::example_family;
using testsupport::example_zdd;

namespace {

// Empirical distribution from n draws, keyed by member.
std::map<SuperArm, double> sample_distribution(const Zdd& z, const WeightVector& w, int n,
                                               Rng& rng) {
    BackwardWeights b = backward_weights(z, w);
    std::map<SuperArm, double> freq;
    for (int k = 0; k < n; ++k) freq[draw(z, w, b, rng)] += 1.0 / n;
    return freq;
}

double tv_distance(const std::map<SuperArm, double>& emp, const Family& fam,
                   const std::vector<double>& exact) {
    double tv = 0.0;
    for (std::size_t k = 0; k < fam.size(); ++k) {
        auto it = emp.find(fam[k]);
        tv += std::fabs((it == emp.end() ? 0.0 : it->second) - exact[k]);
    }
    return 0.5 * tv;
}

const std::vector<double> kSkewed = {std::log(2.0), 0.0, 0.0, 0.0, 0.0};  // w = (2,1,1,1,1)

}  // namespace

TEST_CASE("forward weights", "[dp]") {
    Zdd z = example_zdd();
    WeightVector ones = WeightVector::ones(5);
    ForwardWeights f = forward_weights(z, ones);
    CHECK(f[z.root()] == 0.0);
    CHECK_THAT(f[1], Catch::Matchers::WithinAbs(std::log(4.0), 1e-12));

    ForwardWeights fw = forward_weights(z, WeightVector{kSkewed});
    CHECK_THAT(fw[1], Catch::Matchers::WithinAbs(std::log(6.0), 1e-12));
}

TEST_CASE("backward weights", "[dp]") {
    Zdd z = example_zdd();
    BackwardWeights b = backward_weights(z, WeightVector::ones(5));
    CHECK_THAT(b[z.root()], Catch::Matchers::WithinAbs(std::log(4.0), 1e-12));
    CHECK(b[1] == 0.0);
    CHECK(b[0] == kNegInf);

    BackwardWeights bw = backward_weights(z, WeightVector{kSkewed});
    CHECK_THAT(bw[z.root()], Catch::Matchers::WithinAbs(std::log(6.0), 1e-12));
}

TEST_CASE("partition function", "[dp]") {
    Zdd z = example_zdd();
    CHECK_THAT(log_partition(z, WeightVector::ones(5)),
               Catch::Matchers::WithinAbs(std::log(4.0), 1e-12));
    CHECK_THAT(log_partition(z, WeightVector{kSkewed}),
               Catch::Matchers::WithinAbs(std::log(6.0), 1e-12));
    CHECK(log_partition(Zdd(1, {}, 0), WeightVector::ones(1)) == kNegInf);
    CHECK(log_partition(Zdd(1, {}, 1), WeightVector::ones(1)) == 0.0);
}

TEST_CASE("forward and backward agree at the terminals", "[dp]") {
    Rng rng(99);
    for (int rep = 0; rep < 30; ++rep) {
        const int d = 2 + static_cast<int>(rng() % 9);
        Family fam = testsupport::random_family(d, 50, rng);
        Zdd z = reduce_from_family(fam, d);
        std::vector<double> lw = testsupport::random_log_weights(d, rng);
        if (rep % 4 == 0) lw[rng() % d] = kNegInf;  // a hard-excluded arm
        WeightVector w{lw};
        ForwardWeights f = forward_weights(z, w);
        BackwardWeights b = backward_weights(z, w);
        if (f[1] == kNegInf || b[z.root()] == kNegInf) {
            CHECK(f[1] == b[z.root()]);
        } else {
            CHECK_THAT(f[1], Catch::Matchers::WithinAbs(b[z.root()], 1e-10));
        }
        // agree with the enumeration oracle too
        const double ref = family_log_partition(fam, lw);
        if (ref == kNegInf)
            CHECK(b[z.root()] == kNegInf);
        else
            CHECK_THAT(b[z.root()], Catch::Matchers::WithinAbs(ref, 1e-10));
    }
}

TEST_CASE("draw on a singleton family is deterministic", "[dp]") {
    Zdd z = reduce_from_family({{1}}, 1);
    WeightVector w = WeightVector::ones(1);
    BackwardWeights b = backward_weights(z, w);
    Rng rng(5);
    for (int k = 0; k < 20; ++k) CHECK(draw(z, w, b, rng) == SuperArm{1});
}

TEST_CASE("draw matches the exact distribution", "[dp]") {
    Zdd z = example_zdd();
    Family fam = enumerate_family(z);
    Rng rng(12345);

    WeightVector uniform = WeightVector::ones(5);
    auto emp = sample_distribution(z, uniform, 100000, rng);
    CHECK(tv_distance(emp, fam, family_distribution(fam, uniform.log_w)) <= 0.01);

    WeightVector skewed{kSkewed};  // Z = 6; members carrying arm 1 get weight 2
    auto emp2 = sample_distribution(z, skewed, 100000, rng);
    CHECK(tv_distance(emp2, fam, family_distribution(fam, skewed.log_w)) <= 0.01);

    // a 38-member family under skewed weights
    Graph g = build_grid({3, 4});
    Zdd zp = build_st_paths(g, 0, 11);
    Family paths = enumerate_family(zp);
    std::vector<double> lw = testsupport::random_log_weights(g.arm_count(), rng);
    WeightVector wp{lw};
    auto emp3 = sample_distribution(zp, wp, 100000, rng);
    CHECK(tv_distance(emp3, paths, family_distribution(paths, lw)) <= 0.01);
}

TEST_CASE("draw with a zero-weight arm never selects it", "[dp]") {
    Zdd z = example_zdd();
    std::vector<double> lw(5, 0.0);
    lw[0] = kNegInf;  // kill arm 1: only {2,5} and {2,3,4} remain
    WeightVector w{lw};
    BackwardWeights b = backward_weights(z, w);
    Rng rng(4242);
    for (int k = 0; k < 2000; ++k) {
        SuperArm x = draw(z, w, b, rng);
        CHECK((x == SuperArm{2, 5} || x == SuperArm{2, 3, 4}));
    }
}

TEST_CASE("draw rejects zero total weight", "[dp]") {
    Zdd z = example_zdd();
    WeightVector zero{std::vector<double>(5, kNegInf)};
    BackwardWeights b = backward_weights(z, zero);
    Rng rng(1);
    CHECK_THROWS_AS(draw(z, zero, b, rng), std::invalid_argument);

    Zdd empty(1, {}, 0);
    WeightVector w1 = WeightVector::ones(1);
    BackwardWeights be = backward_weights(empty, w1);
    CHECK_THROWS_AS(draw(empty, w1, be, rng), std::invalid_argument);
}

TEST_CASE("identical seeds give identical sample sequences", "[dp]") {
    Zdd z = example_zdd();
    WeightVector w{kSkewed};
    BackwardWeights b = backward_weights(z, w);
    Rng a(777), c(777);
    for (int k = 0; k < 100; ++k) CHECK(draw(z, w, b, a) == draw(z, w, b, c));
}

TEST_CASE("backward weighted co-occurrence", "[dp]") {
    Zdd z = example_zdd();
    WeightVector w{kSkewed};
    BackwardWeights b = backward_weights(z, w);
    BwcTable c = bwc(z, w, b);

    // the diagonal seed of the recursion, at every vertex
    for (int v = 2; v < z.vertex_count(); ++v)
        CHECK(c.at(v, z.label(v)) == w[z.label(v)] + b[z.hi(v)]);
    // no route out of the 1-terminal contains anything
    for (int j = 1; j <= 5; ++j) CHECK(c.at(1, j) == kNegInf);

    // marginal read-off at the root, uniform weights: p(5 in X) = 1/2
    WeightVector ones = WeightVector::ones(5);
    BackwardWeights bu = backward_weights(z, ones);
    BwcTable cu = bwc(z, ones, bu);
    CHECK_THAT(std::exp(cu.at(z.root(), 5) - bu[z.root()]),
               Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("cpm on the example family", "[dp]") {
    Zdd z = example_zdd();

    WeightVector ones = WeightVector::ones(5);
    ForwardWeights f = forward_weights(z, ones);
    BackwardWeights b = backward_weights(z, ones);
    BwcTable c = bwc(z, ones, b);
    CpmMatrix p = cpm(z, ones, f, b, c);
    for (int i = 0; i < 5; ++i) CHECK_THAT(p(i, i), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(p(0, 3), Catch::Matchers::WithinAbs(0.25, 1e-12));  // P(1,4)
    CHECK(p(0, 1) == 0.0);                                         // arms 1,2 never co-occur

    WeightVector skewed{kSkewed};
    ForwardWeights fw = forward_weights(z, skewed);
    BackwardWeights bw = backward_weights(z, skewed);
    BwcTable cw = bwc(z, skewed, bw);
    CpmMatrix pw = cpm(z, skewed, fw, bw, cw);
    CHECK_THAT(pw(0, 0), Catch::Matchers::WithinAbs(2.0 / 3.0, 1e-12));
    CHECK_THAT(pw(1, 1), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
    CHECK_THAT(pw(0, 2), Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("cpm of a singleton family is the all-ones block", "[dp]") {
    Zdd z = reduce_from_family({{1, 2}}, 3);
    WeightVector w = WeightVector::ones(3);
    ForwardWeights f = forward_weights(z, w);
    BackwardWeights b = backward_weights(z, w);
    CpmMatrix p = cpm(z, w, f, b, bwc(z, w, b));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(p(i, j) == ((i < 2 && j < 2) ? 1.0 : 0.0));
}

TEST_CASE("cpm matches enumeration on random weighted families", "[dp]") {
    Rng rng(5150);
    for (int rep = 0; rep < 25; ++rep) {
        const int d = 2 + static_cast<int>(rng() % 9);
        Family fam = testsupport::random_family(d, 60, rng);
        Zdd z = reduce_from_family(fam, d);
        std::vector<double> lw = testsupport::random_log_weights(d, rng);
        WeightVector w{lw};
        ForwardWeights f = forward_weights(z, w);
        BackwardWeights b = backward_weights(z, w);
        if (b[z.root()] == kNegInf) continue;
        BwcTable c = bwc(z, w, b);
        CpmMatrix p = cpm(z, w, f, b, c);
        SymMatrix ref = family_cpm(fam, lw, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                CHECK_THAT(p(i, j), Catch::Matchers::WithinAbs(ref(i, j), 1e-10));
        // marginal consistency between the BWC table and the CPM diagonal
        for (int i = 1; i <= d; ++i) {
            const double marginal =
                c.at(z.root(), i) == kNegInf ? 0.0 : std::exp(c.at(z.root(), i) - b[z.root()]);
            CHECK_THAT(marginal, Catch::Matchers::WithinAbs(p(i - 1, i - 1), 1e-10));
        }
    }
}

TEST_CASE("cpm rejects zero-weight families", "[dp]") {
    Zdd z = example_zdd();
    WeightVector zero{std::vector<double>(5, kNegInf)};
    ForwardWeights f = forward_weights(z, zero);
    BackwardWeights b = backward_weights(z, zero);
    BwcTable c = bwc(z, zero, b);
    CHECK_THROWS_AS(cpm(z, zero, f, b, c), std::invalid_argument);
}

TEST_CASE("shifting log-weights preserves the distribution only at fixed cardinality", "[dp]") {
    const double shift = 0.7;

    // all start-goal paths of the 2x2 grid have exactly two edges
    Graph g = build_grid({2, 2});
    Zdd z = build_st_paths(g, 0, 3);
    Family fam = enumerate_family(z);
    REQUIRE(family_max_cardinality(fam) == 2);

    Rng rng(31);
    std::vector<double> lw = testsupport::random_log_weights(g.arm_count(), rng);
    std::vector<double> lw_shifted = lw;
    for (double& x : lw_shifted) x += shift;
    auto p = family_distribution(fam, lw);
    auto q = family_distribution(fam, lw_shifted);
    for (std::size_t k = 0; k < p.size(); ++k)
        CHECK_THAT(p[k], Catch::Matchers::WithinAbs(q[k], 1e-12));

    // negative control: mixed cardinalities react to the shift
    Zdd zm = example_zdd();
    Family famm = enumerate_family(zm);
    std::vector<double> lwm = testsupport::random_log_weights(5, rng);
    std::vector<double> lwm_shifted = lwm;
    for (double& x : lwm_shifted) x += shift;
    auto pm = family_distribution(famm, lwm);
    auto qm = family_distribution(famm, lwm_shifted);
    double max_change = 0.0;
    for (std::size_t k = 0; k < pm.size(); ++k)
        max_change = std::max(max_change, std::fabs(pm[k] - qm[k]));
    CHECK(max_change > 1e-3);
}

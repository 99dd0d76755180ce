#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace zddb {

using BigCount = boost::multiprecision::cpp_int;

// A super arm: strictly increasing arm indices in 1..d.
using SuperArm = std::vector<int>;

// Explicit family of super arms. Only viable at oracle/test scale.
using Family = std::vector<SuperArm>;

struct ZddVertex {
    int label;  // arm index in 1..d
    int lo;     // 0-child vertex id
    int hi;     // 1-child vertex id

    friend bool operator==(const ZddVertex&, const ZddVertex&) = default;
};

/// Zero-suppressed binary decision diagram over arms 1..d.
///
/// Vertex ids are dense and topological: 0 and 1 are the terminals, the
/// non-terminals occupy 2..root with every child id strictly below its
/// parent, and the root is the maximal id. Each root-to-1 route spells out
/// one member of the encoded family (the labels taken through 1-arcs).
/// Immutable after construction; all traversals are plain array DPs.
class Zdd {
public:
    // Empty family over a single arm.
    Zdd() : d_(1), verts_(2, ZddVertex{0, 0, 0}), root_(0) {}

    // `vertices` holds the non-terminals in id order (first entry is id 2).
    // Structural sanity (ids in range, children strictly below parents,
    // labels within 1..d) is enforced here; the semantic ZDD invariants are
    // the business of validate().
    Zdd(int arm_count, std::vector<ZddVertex> vertices, int root)
        : d_(arm_count), verts_(2, ZddVertex{0, 0, 0}), root_(root) {
        if (arm_count < 1) throw std::invalid_argument("zdd: arm count must be positive");
        const int n = static_cast<int>(vertices.size());
        for (int k = 0; k < n; ++k) {
            const ZddVertex& v = vertices[k];
            const int id = k + 2;
            if (v.label < 1 || v.label > d_)
                throw std::invalid_argument("zdd: vertex " + std::to_string(id) +
                                            " has label outside 1..d");
            if (v.lo < 0 || v.lo >= id || v.hi < 0 || v.hi >= id)
                throw std::invalid_argument("zdd: vertex " + std::to_string(id) +
                                            " has a child id not below its own id");
        }
        if (n == 0) {
            if (root != 0 && root != 1)
                throw std::invalid_argument("zdd: terminal-only diagram must be rooted at 0 or 1");
        } else if (root != n + 1) {
            throw std::invalid_argument("zdd: root must be the maximal vertex id");
        }
        verts_.insert(verts_.end(), vertices.begin(), vertices.end());
    }

    int arm_count() const { return d_; }
    int root() const { return root_; }

    // Total vertex count including the two terminals.
    int vertex_count() const { return static_cast<int>(verts_.size()); }
    int nonterminal_count() const { return vertex_count() - 2; }

    static bool is_terminal(int v) { return v < 2; }

    int label(int v) const { return verts_[v].label; }
    int lo(int v) const { return verts_[v].lo; }
    int hi(int v) const { return verts_[v].hi; }

    friend bool operator==(const Zdd& a, const Zdd& b) {
        return a.d_ == b.d_ && a.root_ == b.root_ && a.verts_ == b.verts_;
    }

private:
    int d_;
    std::vector<ZddVertex> verts_;  // [0] and [1] are terminal placeholders
    int root_;
};

struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
    std::string to_string() const {
        std::string s;
        for (const auto& v : violations) {
            s += v;
            s += '\n';
        }
        return s;
    }
};

/// Checks the ordered/reduced ZDD invariants and reports every violation:
/// label ordering along arcs, redundant vertices (1-arc into the 0-terminal),
/// sharable vertices (duplicate label/children triples), and reachability
/// from the root. An empty report means the diagram is a valid ordered,
/// reduced ZDD.
inline ValidationReport validate(const Zdd& z) {
    ValidationReport report;
    const int n = z.vertex_count();
    std::vector<char> reachable(n, 0);
    if (z.root() >= 0 && z.root() < n) reachable[z.root()] = 1;
    for (int v = n - 1; v >= 2; --v) {
        if (reachable[v]) {
            reachable[z.lo(v)] = 1;
            reachable[z.hi(v)] = 1;
        }
    }

    std::map<std::tuple<int, int, int>, int> seen;
    for (int v = 2; v < n; ++v) {
        for (int b = 0; b < 2; ++b) {
            const int c = b ? z.hi(v) : z.lo(v);
            if (!Zdd::is_terminal(c) && z.label(c) <= z.label(v)) {
                report.violations.push_back(
                    "unordered labels: vertex " + std::to_string(v) + " (label " +
                    std::to_string(z.label(v)) + ") has " + (b ? "1" : "0") + "-child " +
                    std::to_string(c) + " with label " + std::to_string(z.label(c)));
            }
        }
        if (z.hi(v) == 0) {
            report.violations.push_back("redundant vertex: " + std::to_string(v) +
                                        " has its 1-arc into the 0-terminal");
        }
        auto key = std::make_tuple(z.label(v), z.lo(v), z.hi(v));
        auto [it, inserted] = seen.emplace(key, v);
        if (!inserted) {
            report.violations.push_back("sharable vertex: " + std::to_string(v) +
                                        " duplicates vertex " + std::to_string(it->second));
        }
        if (!reachable[v]) {
            report.violations.push_back("unreachable vertex: " + std::to_string(v));
        }
    }
    return report;
}

/// Number of encoded super arms, |S|: one bottom-up pass with
/// count(0) = 0, count(1) = 1, count(v) = count(lo) + count(hi).
/// Arbitrary precision, since interesting families overrun 64 bits.
inline BigCount count(const Zdd& z) {
    std::vector<BigCount> c(z.vertex_count());
    c[0] = 0;
    if (z.vertex_count() > 1) c[1] = 1;
    for (int v = 2; v < z.vertex_count(); ++v) c[v] = c[z.lo(v)] + c[z.hi(v)];
    return c[z.root()];
}

namespace detail {
inline void enumerate_rec(const Zdd& z, int v, SuperArm& prefix, Family& out) {
    if (v == 0) return;
    if (v == 1) {
        out.push_back(prefix);
        return;
    }
    enumerate_rec(z, z.lo(v), prefix, out);
    prefix.push_back(z.label(v));
    enumerate_rec(z, z.hi(v), prefix, out);
    prefix.pop_back();
}
}  // namespace detail

/// Materializes the family. Throws if |S| exceeds `limit`; members come out
/// sorted (labels increase along every route).
inline Family enumerate_family(const Zdd& z, std::uint64_t limit = 1000000) {
    if (count(z) > limit)
        throw std::runtime_error("enumerate_family: family size exceeds limit " +
                                 std::to_string(limit));
    Family out;
    SuperArm prefix;
    detail::enumerate_rec(z, z.root(), prefix, out);
    return out;
}

/// Membership test by walking the diagram from the root.
inline bool contains(const Zdd& z, const SuperArm& x) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (x[k] < 1 || x[k] > z.arm_count()) return false;
        if (k > 0 && x[k] <= x[k - 1]) return false;
    }
    int v = z.root();
    std::size_t next = 0;
    while (!Zdd::is_terminal(v)) {
        const int l = z.label(v);
        if (next < x.size() && x[next] == l) {
            v = z.hi(v);
            ++next;
        } else if (next < x.size() && x[next] < l) {
            return false;  // a wanted arm was skipped for good
        } else {
            v = z.lo(v);
        }
    }
    return v == 1 && next == x.size();
}

/// max_{X in S} |X|, by a bottom-up DP. L of the bandit is its square root.
inline int max_cardinality(const Zdd& z) {
    constexpr int kNone = std::numeric_limits<int>::min();
    std::vector<int> m(z.vertex_count(), kNone);
    m[0] = kNone;
    if (z.vertex_count() > 1) m[1] = 0;
    for (int v = 2; v < z.vertex_count(); ++v) {
        int best = m[z.lo(v)];
        if (m[z.hi(v)] != kNone) best = std::max(best, 1 + m[z.hi(v)]);
        m[v] = best;
    }
    if (m[z.root()] == kNone) throw std::invalid_argument("max_cardinality: empty family");
    return m[z.root()];
}

struct MinCostResult {
    double value;
    SuperArm argmin;
};

/// Exact minimizer of sum_{i in X} cost_i over the family. Ties break toward
/// the 0-child, so the result is deterministic.
inline MinCostResult min_additive_cost(const Zdd& z, const std::vector<double>& cost) {
    if (static_cast<int>(cost.size()) != z.arm_count())
        throw std::invalid_argument("min_additive_cost: cost vector has wrong length");
    if (z.root() == 0) throw std::invalid_argument("min_additive_cost: empty family");
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> best(z.vertex_count(), kInf);
    std::vector<char> take_hi(z.vertex_count(), 0);
    best[1] = 0.0;
    for (int v = 2; v < z.vertex_count(); ++v) {
        const double via_lo = best[z.lo(v)];
        const double via_hi = cost[z.label(v) - 1] + best[z.hi(v)];
        if (via_hi < via_lo) {
            best[v] = via_hi;
            take_hi[v] = 1;
        } else {
            best[v] = via_lo;
        }
    }
    MinCostResult res{best[z.root()], {}};
    int v = z.root();
    while (!Zdd::is_terminal(v)) {
        if (take_hi[v]) {
            res.argmin.push_back(z.label(v));
            v = z.hi(v);
        } else {
            v = z.lo(v);
        }
    }
    return res;
}

// --- text format ---
//
//   zdd <d> <n_nonterminal>
//   <id> <label> <lo> <hi>     (n lines, ids ascending from 2)
//   root <id>

inline void write_zdd(const Zdd& z, std::ostream& os) {
    os << "zdd " << z.arm_count() << ' ' << z.nonterminal_count() << '\n';
    for (int v = 2; v < z.vertex_count(); ++v)
        os << v << ' ' << z.label(v) << ' ' << z.lo(v) << ' ' << z.hi(v) << '\n';
    os << "root " << z.root() << '\n';
}

/// Parses the text format; structural problems raise std::invalid_argument
/// with the offending line number, and a diagram that fails validate() is
/// rejected the same way.
inline Zdd read_zdd(std::istream& is) {
    auto fail = [](int line, const std::string& what) -> void {
        throw std::invalid_argument("zdd parse error at line " + std::to_string(line) + ": " +
                                    what);
    };
    std::string line;
    int lineno = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };

    if (!next_line()) fail(1, "missing header");
    std::istringstream hs(line);
    std::string tag;
    int d = 0, n = 0;
    if (!(hs >> tag >> d >> n) || tag != "zdd") fail(lineno, "expected `zdd <d> <n>`");
    if (d < 1 || n < 0) fail(lineno, "bad arm or vertex count");

    std::vector<ZddVertex> verts;
    verts.reserve(n);
    for (int k = 0; k < n; ++k) {
        if (!next_line()) fail(lineno + 1, "unexpected end of file in vertex list");
        std::istringstream vs(line);
        int id, label, lo, hi;
        if (!(vs >> id >> label >> lo >> hi)) fail(lineno, "expected `<id> <label> <lo> <hi>`");
        if (id != k + 2) fail(lineno, "vertex ids must ascend consecutively from 2");
        if (label < 1 || label > d) fail(lineno, "label outside 1..d");
        if (lo < 0 || lo >= id || hi < 0 || hi >= id)
            fail(lineno, "dangling child id " + std::to_string(std::max(lo, hi)));
        verts.push_back(ZddVertex{label, lo, hi});
    }

    if (!next_line()) fail(lineno + 1, "missing root line");
    std::istringstream rs(line);
    int root = -1;
    if (!(rs >> tag >> root) || tag != "root") fail(lineno, "expected `root <id>`");
    if (root < 0 || root >= n + 2) fail(lineno, "root id out of range");
    if (n > 0 && root != n + 1) fail(lineno, "root must be the maximal vertex id");

    Zdd z(d, std::move(verts), root);
    ValidationReport report = validate(z);
    if (!report.ok())
        throw std::invalid_argument("zdd validation failed on read:\n" + report.to_string());
    return z;
}

}  // namespace zddb

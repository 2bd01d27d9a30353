#pragma once

// Feynman graphs and their Symanzik polynomials.  U comes from spanning
// trees (enumerated by deletion-contraction), V from spanning 2-forests with
// the kinematic table supplying the crossing invariants, and F = U * (sum of
// m_e^2 x_e) - V.  A matrix-tree determinant over formal edge weights gives
// an independent construction of U for cross-checking.

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "homopoly.hpp"
#include "paramfield.hpp"

namespace twistpf {

struct FeynmanGraph {
    struct Edge {
        std::string name;
        int a = 0, b = 0;   // endpoint vertex indices
        ParamField mass;    // mass expression (0 for massless lines)
    };
    struct Leg {
        std::string momentum;  // label resolved through the kinematic table
        int vertex = 0;
    };

    std::vector<std::string> vertices;
    std::vector<Edge> edges;
    std::vector<Leg> legs;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int loops() const { return num_edges() - num_vertices() + 1; }

    std::vector<std::string> edge_names() const {
        std::vector<std::string> out;
        out.reserve(edges.size());
        for (const auto& e : edges) out.push_back(e.name);
        return out;
    }

    // Structural validation shared by the parser and programmatic builders.
    void validate() const {
        if (vertices.empty()) throw std::invalid_argument("graph has no vertices");
        if (edges.empty()) throw std::invalid_argument("graph has no edges");
        std::set<std::string> seen;
        for (const auto& e : edges) {
            if (e.a == e.b)
                throw std::invalid_argument("self-loop on edge '" + e.name +
                                            "': tadpole lines are not supported");
            if (e.a < 0 || e.b < 0 || e.a >= num_vertices() || e.b >= num_vertices())
                throw std::invalid_argument("edge '" + e.name + "' references an unknown vertex");
            if (!seen.insert(e.name).second)
                throw std::invalid_argument("duplicate edge name '" + e.name + "'");
        }
        std::set<int> leg_vertices;
        for (const auto& l : legs) {
            if (l.vertex < 0 || l.vertex >= num_vertices())
                throw std::invalid_argument("leg '" + l.momentum + "' references an unknown vertex");
            if (!leg_vertices.insert(l.vertex).second)
                throw std::invalid_argument("vertex '" + vertices[l.vertex] +
                                            "' carries more than one external momentum");
        }
        if (!connected()) throw std::invalid_argument("graph is not connected");
    }

    bool connected() const {
        if (vertices.empty()) return false;
        std::vector<int> parent(vertices.size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        int comps = num_vertices();
        for (const auto& e : edges) {
            int ra = find(e.a), rb = find(e.b);
            if (ra != rb) {
                parent[ra] = rb;
                --comps;
            }
        }
        return comps == 1;
    }
};

class KinematicTable {
  public:
    void set(const std::string& a, const std::string& b, ParamField value) {
        dots_[key(a, b)] = std::move(value);
    }

    bool has(const std::string& a, const std::string& b) const { return dots_.count(key(a, b)) > 0; }

    const ParamField& get(const std::string& a, const std::string& b) const {
        auto it = dots_.find(key(a, b));
        if (it == dots_.end())
            throw std::invalid_argument("kinematic table is missing the entry " + a + "." + b);
        return it->second;
    }

    const std::map<std::pair<std::string, std::string>, ParamField>& entries() const { return dots_; }

  private:
    static std::pair<std::string, std::string> key(const std::string& a, const std::string& b) {
        return a <= b ? std::make_pair(a, b) : std::make_pair(b, a);
    }
    std::map<std::pair<std::string, std::string>, ParamField> dots_;
};

// Spanning trees as sorted edge-index sets, enumerated by recursive
// deletion-contraction (an edge closing a cycle in the contracted graph is
// deleted outright; otherwise both branches recurse), with pruning when too
// few edges remain to connect the residual components.
inline std::vector<std::vector<int>> spanning_trees(const FeynmanGraph& g) {
    const int V = g.num_vertices(), E = g.num_edges();
    std::vector<std::vector<int>> trees;
    std::vector<int> parent(V);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<int> kept;

    auto find = [&](auto&& self, int v) -> int {
        return parent[v] == v ? v : self(self, parent[v]);
    };

    auto rec = [&](auto&& self, int i, int comps) -> void {
        if (comps == 1) {
            trees.push_back(kept);  // already sorted: indices pushed in increasing order
            return;
        }
        if (i == E || E - i < comps - 1) return;  // not enough edges left
        int ra = find(find, g.edges[i].a), rb = find(find, g.edges[i].b);
        if (ra == rb) {
            self(self, i + 1, comps);  // cycle edge: deletion only
            return;
        }
        // contract
        kept.push_back(i);
        std::vector<int> saved = parent;
        parent[ra] = rb;
        self(self, i + 1, comps - 1);
        parent = std::move(saved);
        kept.pop_back();
        // delete
        self(self, i + 1, comps);
    };
    rec(rec, 0, V);
    std::sort(trees.begin(), trees.end());
    return trees;
}

struct TwoForest {
    std::vector<int> edges;         // kept edge indices, sorted
    std::vector<int> side_of;       // per vertex: 0 or 1, component membership
};

// Spanning 2-forests: V-2 kept edges, acyclic (which forces exactly two
// components).  Enumerated over edge subsets; the component containing
// vertex 0 is side 0.
inline std::vector<TwoForest> spanning_2forests(const FeynmanGraph& g) {
    const int V = g.num_vertices(), E = g.num_edges();
    std::vector<TwoForest> forests;
    if (V < 2) return forests;
    const int need = V - 2;
    std::vector<int> pick;

    auto rec = [&](auto&& self, int i) -> void {
        if (static_cast<int>(pick.size()) == need) {
            std::vector<int> parent(V);
            std::iota(parent.begin(), parent.end(), 0);
            auto find = [&](int v) {
                while (parent[v] != v) v = parent[v] = parent[parent[v]];
                return v;
            };
            for (int e : pick) {
                int ra = find(g.edges[e].a), rb = find(g.edges[e].b);
                if (ra == rb) return;  // cycle
                parent[ra] = rb;
            }
            TwoForest f;
            f.edges = pick;
            f.side_of.resize(V);
            int side0 = find(0);
            for (int v = 0; v < V; ++v) f.side_of[v] = (find(v) == side0) ? 0 : 1;
            forests.push_back(std::move(f));
            return;
        }
        if (E - i < need - static_cast<int>(pick.size())) return;
        pick.push_back(i);
        self(self, i + 1);
        pick.pop_back();
        self(self, i + 1);
    };
    rec(rec, 0);
    return forests;
}

struct SymanzikPair {
    HomoPoly U;  // first Symanzik polynomial, degree L
    HomoPoly V;  // kinematic part, degree L+1
    HomoPoly F;  // U * (sum m_e^2 x_e) - V, degree L+1
};

inline SymanzikPair symanzik(const FeynmanGraph& g, const KinematicTable& table) {
    g.validate();
    const int E = g.num_edges();
    const long L = g.loops();

    HomoPoly U(E, L);
    for (const auto& tree : spanning_trees(g)) {
        EVec e(E, 1);
        for (int idx : tree) e[idx] = 0;
        U += HomoPoly::monomial(E, e, ParamField(Rat(1)));
    }
    if (U.is_zero()) throw std::invalid_argument("graph has no spanning tree");

    HomoPoly V(E, L + 1);
    for (const auto& f : spanning_2forests(g)) {
        ParamField s;
        for (const auto& la : g.legs)
            for (const auto& lb : g.legs) {
                if (f.side_of[la.vertex] != 0 || f.side_of[lb.vertex] != 1) continue;
                s += table.get(la.momentum, lb.momentum);
            }
        if (s.is_zero()) continue;
        EVec e(E, 1);
        for (int idx : f.edges) e[idx] = 0;
        V += HomoPoly::monomial(E, e, s);
    }

    HomoPoly masses(E, 1);
    for (int i = 0; i < E; ++i) {
        const ParamField& m = g.edges[i].mass;
        if (m.is_zero()) continue;
        EVec e(E, 0);
        e[i] = 1;
        masses += HomoPoly::monomial(E, e, m * m);
    }

    SymanzikPair out;
    out.U = U;
    out.V = V;
    out.F = masses.is_zero() ? -V : U * masses - V;
    if (out.F.is_zero()) out.F = HomoPoly(E, L + 1);
    return out;
}

namespace detail {

// Fraction-free Bareiss determinant over ParamPoly.
inline ParamPoly bareiss_det(std::vector<std::vector<ParamPoly>> m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return ParamPoly(Rat(1));
    ParamPoly prev(Rat(1));
    int sign = 1;
    for (int i = 0; i < n - 1; ++i) {
        if (m[i][i].is_zero()) {
            int swap = -1;
            for (int r = i + 1; r < n; ++r)
                if (!m[r][i].is_zero()) {
                    swap = r;
                    break;
                }
            if (swap < 0) return ParamPoly();
            std::swap(m[i], m[swap]);
            sign = -sign;
        }
        for (int r = i + 1; r < n; ++r)
            for (int c = i + 1; c < n; ++c)
                m[r][c] = (m[i][i] * m[r][c] - m[r][i] * m[i][c]).divexact(prev);
        prev = m[i][i];
    }
    return sign < 0 ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

}  // namespace detail

// Independent construction of U: expand the determinant of the reduced
// weighted Laplacian over formal edge weights, then send each spanning tree
// monomial to its complementary edge-variable monomial.
inline HomoPoly matrix_tree_U(const FeynmanGraph& g) {
    g.validate();
    const int V = g.num_vertices(), E = g.num_edges();
    std::vector<Symbol> w;
    w.reserve(E);
    for (int i = 0; i < E; ++i) w.push_back(sym("mtw" + std::to_string(i + 1)));

    std::vector<std::vector<ParamPoly>> lap(V - 1, std::vector<ParamPoly>(V - 1));
    for (int i = 0; i < E; ++i) {
        ParamPoly we = ParamPoly::variable(w[i]);
        int a = g.edges[i].a, b = g.edges[i].b;
        if (a > 0) lap[a - 1][a - 1] += we;
        if (b > 0) lap[b - 1][b - 1] += we;
        if (a > 0 && b > 0) {
            lap[a - 1][b - 1] -= we;
            lap[b - 1][a - 1] -= we;
        }
    }
    ParamPoly det = detail::bareiss_det(std::move(lap));

    HomoPoly U(E, g.loops());
    for (const auto& term : det.terms()) {
        EVec e(E, 1);
        for (int i = 0; i < E; ++i)
            if (term.first.exponent(w[i]) > 0) {
                if (term.first.exponent(w[i]) != 1)
                    throw std::logic_error("matrix-tree expansion produced a non-multilinear term");
                e[i] = 0;
            }
        if (term.second != 1) throw std::logic_error("matrix-tree expansion produced a non-unit coefficient");
        U += HomoPoly::monomial(E, e, ParamField(Rat(1)));
    }
    return U;
}

}  // namespace twistpf

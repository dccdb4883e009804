#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chasegate/core.hpp"
#include "chasegate/simplify.hpp"
#include "chasegate/textio.hpp"

namespace chasegate {

// Positions (P,i) of the rule schema, with normal edges from each frontier
// variable's body positions to its head positions and special edges from each
// frontier variable's body positions to every existential's head positions.
struct DepGraph {
    struct Edge {
        std::uint32_t from = 0;
        std::uint32_t to = 0;
        bool special = false;
        std::uint32_t tgd = 0;
    };

    std::vector<PredId> schPreds;                       // sorted rule predicates
    std::vector<std::pair<PredId, std::uint32_t>> nodes;  // node -> (pred, 0-based position)
    std::unordered_map<PredId, std::uint32_t> predBase;   // pred -> first node id
    std::vector<Edge> edges;
    std::vector<std::vector<std::uint32_t>> adj;   // node -> outgoing edge indices
    std::vector<std::vector<PredId>> pgAdj;        // predicate graph, body -> head
    std::vector<std::vector<PredId>> pgRadj;

    std::uint32_t node(PredId p, std::uint32_t idx) const { return predBase.at(p) + idx; }

    std::string nodeName(std::uint32_t n, const PredTable& preds) const {
        return "(" + preds.name(nodes[n].first) + "," + std::to_string(nodes[n].second + 1) + ")";
    }
};

inline DepGraph buildDependencyGraph(const Program& p, const PredTable& preds) {
    DepGraph g;
    g.schPreds = rulePredicates(p);
    for (PredId q : g.schPreds) {
        g.predBase.emplace(q, static_cast<std::uint32_t>(g.nodes.size()));
        for (std::uint32_t i = 0; i < preds.arity(q); ++i) g.nodes.emplace_back(q, i);
    }
    g.pgAdj.resize(preds.size());
    g.pgRadj.resize(preds.size());

    auto addPg = [&](PredId from, PredId to) {
        auto& fwd = g.pgAdj[from];
        if (std::find(fwd.begin(), fwd.end(), to) == fwd.end()) {
            fwd.push_back(to);
            g.pgRadj[to].push_back(from);
        }
    };

    for (std::uint32_t ti = 0; ti < p.tgds.size(); ++ti) {
        const Tgd& t = p.tgds[ti];
        for (const auto& b : t.body)
            for (const auto& h : t.head) addPg(b.pred, h.pred);

        // Positions of each variable.
        std::vector<std::vector<std::uint32_t>> bodyPos(t.varNames.size());
        std::vector<std::vector<std::uint32_t>> headPos(t.varNames.size());
        for (const auto& a : t.body)
            for (std::size_t i = 0; i < a.args.size(); ++i)
                bodyPos[a.args[i]].push_back(g.node(a.pred, static_cast<std::uint32_t>(i)));
        for (const auto& a : t.head)
            for (std::size_t i = 0; i < a.args.size(); ++i)
                headPos[a.args[i]].push_back(g.node(a.pred, static_cast<std::uint32_t>(i)));

        for (VarId x : t.frontier) {
            for (std::uint32_t from : bodyPos[x]) {
                for (std::uint32_t to : headPos[x])
                    g.edges.push_back(DepGraph::Edge{from, to, false, ti});
                for (VarId z : t.exVars)
                    for (std::uint32_t to : headPos[z])
                        g.edges.push_back(DepGraph::Edge{from, to, true, ti});
            }
        }
    }

    g.adj.resize(g.nodes.size());
    for (std::uint32_t ei = 0; ei < g.edges.size(); ++ei) g.adj[g.edges[ei].from].push_back(ei);
    return g;
}

namespace detail {

// Iterative Tarjan SCC over the dependency graph.
inline std::vector<std::uint32_t> sccComponents(const DepGraph& g, std::uint32_t& sccCount) {
    const std::uint32_t n = static_cast<std::uint32_t>(g.nodes.size());
    constexpr std::uint32_t kUnset = 0xFFFFFFFFu;
    std::vector<std::uint32_t> index(n, kUnset), low(n, 0), comp(n, kUnset);
    std::vector<bool> onStack(n, false);
    std::vector<std::uint32_t> stack;
    std::uint32_t next = 0;
    sccCount = 0;

    struct Frame {
        std::uint32_t node;
        std::size_t edgePos;
    };
    for (std::uint32_t start = 0; start < n; ++start) {
        if (index[start] != kUnset) continue;
        std::vector<Frame> frames{{start, 0}};
        index[start] = low[start] = next++;
        stack.push_back(start);
        onStack[start] = true;
        while (!frames.empty()) {
            auto& f = frames.back();
            if (f.edgePos < g.adj[f.node].size()) {
                std::uint32_t to = g.edges[g.adj[f.node][f.edgePos++]].to;
                if (index[to] == kUnset) {
                    index[to] = low[to] = next++;
                    stack.push_back(to);
                    onStack[to] = true;
                    frames.push_back({to, 0});
                } else if (onStack[to]) {
                    low[f.node] = std::min(low[f.node], index[to]);
                }
            } else {
                if (low[f.node] == index[f.node]) {
                    while (true) {
                        std::uint32_t v = stack.back();
                        stack.pop_back();
                        onStack[v] = false;
                        comp[v] = sccCount;
                        if (v == f.node) break;
                    }
                    ++sccCount;
                }
                std::uint32_t done = f.node;
                frames.pop_back();
                if (!frames.empty())
                    low[frames.back().node] = std::min(low[frames.back().node], low[done]);
            }
        }
    }
    return comp;
}

inline std::vector<bool> reachableNodes(const DepGraph& g, std::uint32_t from) {
    std::vector<bool> seen(g.nodes.size(), false);
    std::deque<std::uint32_t> queue{from};
    seen[from] = true;
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (std::uint32_t ei : g.adj[v]) {
            auto to = g.edges[ei].to;
            if (!seen[to]) {
                seen[to] = true;
                queue.push_back(to);
            }
        }
    }
    return seen;
}

inline std::vector<bool> pgClosure(const std::vector<std::vector<PredId>>& adj,
                                   const std::vector<PredId>& seeds) {
    std::vector<bool> seen(adj.size(), false);
    std::deque<PredId> queue;
    for (PredId s : seeds)
        if (s < seen.size() && !seen[s]) {
            seen[s] = true;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        PredId v = queue.front();
        queue.pop_front();
        for (PredId to : adj[v])
            if (!seen[to]) {
                seen[to] = true;
                queue.push_back(to);
            }
    }
    return seen;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Position ranks: maximum number of special edges over all incoming paths;
// infinite iff the position lies on or is reachable from a cycle containing a
// special edge.

struct PositionRank {
    bool infinite = false;
    std::uint32_t value = 0;
};

inline std::vector<PositionRank> positionRanks(const DepGraph& g) {
    std::uint32_t sccCount = 0;
    auto comp = detail::sccComponents(g, sccCount);

    std::vector<bool> pumping(sccCount, false);
    for (const auto& e : g.edges)
        if (e.special && comp[e.from] == comp[e.to]) pumping[comp[e.from]] = true;

    std::vector<PositionRank> compRank(sccCount);
    for (std::uint32_t c = 0; c < sccCount; ++c)
        if (pumping[c]) compRank[c].infinite = true;

    // Cross edges inside a pumping-free component contribute no specials, so a
    // component's rank is the max over incoming cross edges. Tarjan numbers
    // components in reverse topological order: cross edges go from a higher
    // component index to a lower one, so a decreasing pass sees sources first.
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> incoming(sccCount);
    for (const auto& e : g.edges)
        if (comp[e.from] != comp[e.to])
            incoming[comp[e.to]].emplace_back(comp[e.from], e.special ? 1u : 0u);

    for (std::uint32_t ci = sccCount; ci-- > 0;) {
        auto& r = compRank[ci];
        for (const auto& [src, w] : incoming[ci]) {
            if (compRank[src].infinite)
                r.infinite = true;
            else if (!r.infinite)
                r.value = std::max(r.value, compRank[src].value + w);
        }
    }

    std::vector<PositionRank> out(g.nodes.size());
    for (std::uint32_t v = 0; v < g.nodes.size(); ++v) out[v] = compRank[comp[v]];
    return out;
}

// ---------------------------------------------------------------------------
// D-weak-acyclicity: a witness exists iff some special edge closes a cycle
// whose source predicate is reachable in the predicate graph from a database
// predicate.

struct WaWitness {
    DepGraph::Edge specialEdge;
    std::vector<std::uint32_t> cycle;  // closed walk, cycle.front() == cycle.back()
    PredId support = 0;
};

inline std::optional<WaWitness> findWaViolation(const DepGraph& g, const Database& db) {
    std::vector<PredId> dbPreds;
    for (const auto& f : db.facts())
        if (std::find(dbPreds.begin(), dbPreds.end(), f.pred) == dbPreds.end())
            dbPreds.push_back(f.pred);
    auto supported = detail::pgClosure(g.pgAdj, dbPreds);

    for (const auto& e : g.edges) {
        if (!e.special) continue;
        if (!supported[g.nodes[e.from].first]) continue;
        auto reach = detail::reachableNodes(g, e.to);
        if (!reach[e.from]) continue;

        WaWitness w;
        w.specialEdge = e;

        // Shortest path e.to -> e.from.
        std::vector<std::uint32_t> parent(g.nodes.size(), 0xFFFFFFFFu);
        std::deque<std::uint32_t> queue{e.to};
        std::vector<bool> seen(g.nodes.size(), false);
        seen[e.to] = true;
        while (!queue.empty()) {
            auto v = queue.front();
            queue.pop_front();
            if (v == e.from) break;
            for (std::uint32_t ei : g.adj[v]) {
                auto to = g.edges[ei].to;
                if (!seen[to]) {
                    seen[to] = true;
                    parent[to] = v;
                    queue.push_back(to);
                }
            }
        }
        std::vector<std::uint32_t> path;
        if (e.to == e.from) {
            path.push_back(e.to);
        } else {
            for (std::uint32_t v = e.from; v != 0xFFFFFFFFu; v = parent[v]) {
                path.push_back(v);
                if (v == e.to) break;
            }
            std::reverse(path.begin(), path.end());
        }
        w.cycle.push_back(e.from);
        for (std::uint32_t v : path) w.cycle.push_back(v);

        // First database fact whose predicate reaches the special edge's source.
        auto reaching = detail::pgClosure(g.pgRadj, {g.nodes[e.from].first});
        for (const auto& f : db.facts()) {
            if (reaching[f.pred]) {
                w.support = f.pred;
                break;
            }
        }
        return w;
    }
    return std::nullopt;
}

inline std::optional<WaWitness> findWaViolation(const Symbols& syms, const Database& db,
                                                const Program& p) {
    return findWaViolation(buildDependencyGraph(p, syms.preds), db);
}

inline bool isDWeaklyAcyclic(const Symbols& syms, const Database& db, const Program& p) {
    return !findWaViolation(syms, db, p).has_value();
}

// ---------------------------------------------------------------------------
// Certain-divergence queries. The SL variant has one disjunct per predicate
// reaching a special-edge cycle; the linear variant works on the simplified
// program and renders each simplified predicate over the original predicate
// with its equality pattern, so it evaluates directly on the input database.

struct UcqDisjunct {
    PredId pred = 0;
    std::uint32_t arity = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> equalities;  // 0-based, i < j
};

struct Ucq {
    std::vector<UcqDisjunct> disjuncts;
};

enum class UcqVariant { SL, LinearSimplified };

namespace detail {

// Predicates R of the graph's schema with R ~> pred(pi) for some special edge
// (pi, pi') closing a cycle.
inline std::vector<PredId> divergencePreds(const DepGraph& g) {
    std::vector<PredId> cycleSources;
    for (const auto& e : g.edges) {
        if (!e.special) continue;
        if (std::find(cycleSources.begin(), cycleSources.end(), g.nodes[e.from].first) !=
            cycleSources.end())
            continue;
        auto reach = reachableNodes(g, e.to);
        if (reach[e.from]) cycleSources.push_back(g.nodes[e.from].first);
    }
    auto reaching = pgClosure(g.pgRadj, cycleSources);
    std::vector<PredId> out;
    for (PredId q : g.schPreds)
        if (reaching[q]) out.push_back(q);
    return out;
}

}  // namespace detail

inline Ucq buildUcq(const Symbols& syms, const Program& p, UcqVariant variant,
                    const SimplifyOptions& sopts = {}) {
    Ucq q;
    if (variant == UcqVariant::SL) {
        if (classify(p) != TgdClass::SimpleLinear)
            throw ProgramError("the SL query variant requires a simple-linear program");
        auto g = buildDependencyGraph(p, syms.preds);
        for (PredId r : detail::divergencePreds(g))
            q.disjuncts.push_back(UcqDisjunct{r, syms.preds.arity(r), {}});
        return q;
    }

    auto cls = classify(p);
    if (cls != TgdClass::SimpleLinear && cls != TgdClass::Linear)
        throw ProgramError("the simplified query variant requires a linear program");
    auto sr = simplifyProgram(syms, Database{}, p, sopts);
    auto g = buildDependencyGraph(sr.prog, sr.syms.preds);
    for (PredId r : detail::divergencePreds(g)) {
        const auto& info = sr.predInfo.at(r);
        UcqDisjunct d;
        d.pred = info.base;
        d.arity = static_cast<std::uint32_t>(info.idTuple.size());
        for (std::uint32_t i = 0; i < info.idTuple.size(); ++i)
            for (std::uint32_t j = i + 1; j < info.idTuple.size(); ++j)
                if (info.idTuple[i] == info.idTuple[j]) d.equalities.emplace_back(i, j);
        q.disjuncts.push_back(std::move(d));
    }
    return q;
}

inline bool evalUcq(const Ucq& q, const Database& db) {
    for (const auto& d : q.disjuncts) {
        for (const auto& f : db.facts()) {
            if (f.pred != d.pred) continue;
            bool ok = true;
            for (const auto& [i, j] : d.equalities)
                if (f.args[i] != f.args[j]) { ok = false; break; }
            if (ok) return true;
        }
    }
    return false;
}

// One disjunct per line, equalities shown by repeating the variable.
inline std::string renderUcq(const Ucq& q, const PredTable& preds) {
    std::string out;
    for (const auto& d : q.disjuncts) {
        // Variable per equality class, named by first occurrence.
        std::vector<std::uint32_t> cls(d.arity);
        for (std::uint32_t i = 0; i < d.arity; ++i) cls[i] = i;
        auto find = [&](std::uint32_t i) {
            while (cls[i] != i) i = cls[i] = cls[cls[i]];
            return i;
        };
        for (const auto& [i, j] : d.equalities) cls[find(j)] = find(i);

        std::unordered_map<std::uint32_t, std::uint32_t> names;
        out += renderPredicate(preds.name(d.pred)) + "(";
        for (std::uint32_t i = 0; i < d.arity; ++i) {
            if (i) out += ",";
            auto root = find(i);
            auto it = names.find(root);
            if (it == names.end())
                it = names.emplace(root, static_cast<std::uint32_t>(names.size()) + 1).first;
            out += "X" + std::to_string(it->second);
        }
        out += ")\n";
    }
    return out;
}

}  // namespace chasegate

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace chasegate {

class ProgramError : public std::runtime_error {
public:
    explicit ProgramError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a configured resource budget (atoms, types, bits) is exhausted.
class BudgetError : public std::runtime_error {
public:
    explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

inline std::size_t hashCombine(std::size_t seed, std::size_t v) {
    return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

// ---------------------------------------------------------------------------
// Terms. Constants and labeled nulls share one dense id space; the high bit
// tags nulls. A null is identified by the rule, the existential variable, and
// the frontier binding that created it, so re-deriving it yields the same id.

using TermId = std::uint32_t;

inline constexpr TermId kNullTag = 0x80000000u;

inline bool isNull(TermId t) { return (t & kNullTag) != 0; }
inline bool isConstant(TermId t) { return (t & kNullTag) == 0; }
inline std::uint32_t termIndex(TermId t) { return t & ~kNullTag; }

struct NullKey {
    std::uint32_t tgd = 0;               // index into Program::tgds
    std::uint32_t exVar = 0;             // variable index within that rule
    std::vector<TermId> frontier;        // binding of the rule's frontier, in Tgd::frontier order
    bool operator==(const NullKey&) const = default;
};

struct NullKeyHash {
    std::size_t operator()(const NullKey& k) const {
        std::size_t h = hashCombine(k.tgd, k.exVar);
        for (TermId t : k.frontier) h = hashCombine(h, t);
        return h;
    }
};

class TermTable {
public:
    TermId constant(std::string_view name) {
        auto it = constantsByName_.find(std::string(name));
        if (it != constantsByName_.end()) return it->second;
        auto id = static_cast<TermId>(constantNames_.size());
        if (id & kNullTag) throw BudgetError("constant table overflow");
        constantNames_.emplace_back(name);
        constantsByName_.emplace(constantNames_.back(), id);
        return id;
    }

    std::optional<TermId> findConstant(std::string_view name) const {
        auto it = constantsByName_.find(std::string(name));
        if (it == constantsByName_.end()) return std::nullopt;
        return it->second;
    }

    // Interned: the same key always returns the same id. Depth is
    // 1 + max depth among the frontier binding (1 if the binding is empty).
    TermId makeNull(const NullKey& key) {
        auto it = nullsByKey_.find(key);
        if (it != nullsByKey_.end()) return it->second;
        std::uint32_t d = 0;
        for (TermId t : key.frontier) d = std::max(d, depth(t));
        auto idx = static_cast<std::uint32_t>(nulls_.size());
        if (idx & kNullTag) throw BudgetError("null table overflow");
        TermId id = idx | kNullTag;
        nulls_.push_back(NullInfo{key, d + 1});
        nullsByKey_.emplace(key, id);
        return id;
    }

    std::optional<TermId> findNull(const NullKey& key) const {
        auto it = nullsByKey_.find(key);
        if (it == nullsByKey_.end()) return std::nullopt;
        return it->second;
    }

    std::uint32_t depth(TermId t) const {
        return isNull(t) ? nulls_[termIndex(t)].depth : 0;
    }

    const std::string& constantName(TermId t) const { return constantNames_[termIndex(t)]; }
    const NullKey& nullKey(TermId t) const { return nulls_[termIndex(t)].key; }

    std::size_t constantCount() const { return constantNames_.size(); }
    std::size_t nullCount() const { return nulls_.size(); }

private:
    struct NullInfo {
        NullKey key;
        std::uint32_t depth;
    };

    std::vector<std::string> constantNames_;
    std::unordered_map<std::string, TermId> constantsByName_;
    std::vector<NullInfo> nulls_;
    std::unordered_map<NullKey, TermId, NullKeyHash> nullsByKey_;
};

// ---------------------------------------------------------------------------
// Predicates. Arity is fixed at first intern; a later mismatch is an error.

using PredId = std::uint32_t;

class PredTable {
public:
    PredId intern(std::string_view name, std::uint32_t arity) {
        auto it = byName_.find(std::string(name));
        if (it != byName_.end()) {
            if (preds_[it->second].arity != arity) {
                throw ProgramError("predicate '" + std::string(name) + "' used with arity " +
                                   std::to_string(arity) + " after arity " +
                                   std::to_string(preds_[it->second].arity));
            }
            return it->second;
        }
        auto id = static_cast<PredId>(preds_.size());
        preds_.push_back(Info{std::string(name), arity});
        byName_.emplace(preds_.back().name, id);
        return id;
    }

    std::optional<PredId> find(std::string_view name) const {
        auto it = byName_.find(std::string(name));
        if (it == byName_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(PredId p) const { return preds_[p].name; }
    std::uint32_t arity(PredId p) const { return preds_[p].arity; }
    std::size_t size() const { return preds_.size(); }

private:
    struct Info {
        std::string name;
        std::uint32_t arity;
    };

    std::vector<Info> preds_;
    std::unordered_map<std::string, PredId> byName_;
};

struct Symbols {
    PredTable preds;
    TermTable terms;
};

// ---------------------------------------------------------------------------
// Ground atoms and instances.

struct Atom {
    PredId pred = 0;
    std::vector<TermId> args;

    bool operator==(const Atom&) const = default;
    auto operator<=>(const Atom&) const = default;
};

struct AtomHash {
    std::size_t operator()(const Atom& a) const {
        std::size_t h = a.pred;
        for (TermId t : a.args) h = hashCombine(h, t);
        return h;
    }
};

using AtomSet = std::unordered_set<Atom, AtomHash>;

inline std::uint32_t atomDepth(const Atom& a, const TermTable& terms) {
    std::uint32_t d = 0;
    for (TermId t : a.args) d = std::max(d, terms.depth(t));
    return d;
}

// Deduplicated atoms in insertion order, with a per-predicate index.
class Instance {
public:
    std::pair<std::uint32_t, bool> insert(const Atom& a) {
        auto it = index_.find(a);
        if (it != index_.end()) return {it->second, false};
        auto id = static_cast<std::uint32_t>(atoms_.size());
        atoms_.push_back(a);
        index_.emplace(atoms_.back(), id);
        if (perPred_.size() <= a.pred) perPred_.resize(a.pred + 1);
        perPred_[a.pred].push_back(id);
        return {id, true};
    }

    bool contains(const Atom& a) const { return index_.count(a) != 0; }
    const Atom& atom(std::uint32_t id) const { return atoms_[id]; }
    std::size_t size() const { return atoms_.size(); }

    const std::vector<std::uint32_t>& byPred(PredId p) const {
        static const std::vector<std::uint32_t> kEmpty;
        return p < perPred_.size() ? perPred_[p] : kEmpty;
    }

    const std::vector<Atom>& atoms() const { return atoms_; }

private:
    std::vector<Atom> atoms_;
    std::unordered_map<Atom, std::uint32_t, AtomHash> index_;
    std::vector<std::vector<std::uint32_t>> perPred_;
};

// Database facts: ground atoms over constants, deduplicated, insertion order.
class Database {
public:
    bool add(const Atom& a) {
        if (seen_.count(a)) return false;
        seen_.insert(a);
        facts_.push_back(a);
        return true;
    }

    bool contains(const Atom& a) const { return seen_.count(a) != 0; }
    const std::vector<Atom>& facts() const { return facts_; }
    std::size_t size() const { return facts_.size(); }

private:
    std::vector<Atom> facts_;
    AtomSet seen_;
};

// ---------------------------------------------------------------------------
// Rules. Each rule has its own variable namespace; args index Tgd::varNames.

using VarId = std::uint32_t;

struct RuleAtom {
    PredId pred = 0;
    std::vector<VarId> args;

    bool operator==(const RuleAtom&) const = default;
    auto operator<=>(const RuleAtom&) const = default;
};

struct Tgd {
    std::string label;
    std::vector<RuleAtom> body;
    std::vector<RuleAtom> head;
    std::vector<std::string> varNames;
    std::vector<VarId> exVars;    // declared order; must occur in the head only

    // Filled by finalizeTgd:
    std::vector<VarId> frontier;  // vars in both body and head, ascending
    std::vector<bool> inBody;
    std::vector<bool> inHead;
    std::vector<bool> isEx;
};

// Validates shape and computes the frontier. Arity checks are the caller's
// concern (PredTable::intern enforces consistency at construction time).
inline void finalizeTgd(Tgd& t) {
    auto n = static_cast<VarId>(t.varNames.size());
    t.inBody.assign(n, false);
    t.inHead.assign(n, false);
    t.isEx.assign(n, false);

    if (t.body.empty()) throw ProgramError("rule '" + t.label + "' has an empty body");
    if (t.head.empty()) throw ProgramError("rule '" + t.label + "' has an empty head");

    auto checkVar = [&](VarId v) {
        if (v >= n) throw ProgramError("rule '" + t.label + "' references an unknown variable");
    };
    for (const auto& a : t.body)
        for (VarId v : a.args) { checkVar(v); t.inBody[v] = true; }
    for (const auto& a : t.head)
        for (VarId v : a.args) { checkVar(v); t.inHead[v] = true; }

    for (VarId v : t.exVars) {
        checkVar(v);
        if (t.isEx[v]) throw ProgramError("rule '" + t.label + "' declares '" + t.varNames[v] +
                                          "' existential twice");
        t.isEx[v] = true;
        if (t.inBody[v])
            throw ProgramError("rule '" + t.label + "' declares body variable '" + t.varNames[v] +
                               "' existential");
        if (!t.inHead[v])
            throw ProgramError("rule '" + t.label + "' declares unused existential '" +
                               t.varNames[v] + "'");
    }
    for (VarId v = 0; v < n; ++v) {
        if (t.inHead[v] && !t.inBody[v] && !t.isEx[v])
            throw ProgramError("rule '" + t.label + "' uses head variable '" + t.varNames[v] +
                               "' that is neither a body variable nor declared existential");
    }

    t.frontier.clear();
    for (VarId v = 0; v < n; ++v)
        if (t.inBody[v] && t.inHead[v]) t.frontier.push_back(v);
}

struct Program {
    std::vector<Tgd> tgds;
};

// ---------------------------------------------------------------------------
// Classification.

enum class TgdClass { SimpleLinear, Linear, Guarded, General };

inline const char* toString(TgdClass c) {
    switch (c) {
        case TgdClass::SimpleLinear: return "SimpleLinear";
        case TgdClass::Linear: return "Linear";
        case TgdClass::Guarded: return "Guarded";
        case TgdClass::General: return "General";
    }
    return "?";
}

// First body atom whose arguments cover every body variable.
inline std::optional<std::size_t> guardIndex(const Tgd& t) {
    std::vector<bool> needed = t.inBody;
    std::size_t needCount = 0;
    for (bool b : needed)
        if (b) ++needCount;
    for (std::size_t i = 0; i < t.body.size(); ++i) {
        std::vector<bool> seen(t.varNames.size(), false);
        std::size_t cover = 0;
        for (VarId v : t.body[i].args)
            if (!seen[v]) { seen[v] = true; ++cover; }
        if (cover == needCount) return i;
    }
    return std::nullopt;
}

inline TgdClass classifyTgd(const Tgd& t) {
    if (t.body.size() == 1) {
        const auto& args = t.body[0].args;
        std::unordered_set<VarId> distinct(args.begin(), args.end());
        return distinct.size() == args.size() ? TgdClass::SimpleLinear : TgdClass::Linear;
    }
    return guardIndex(t) ? TgdClass::Guarded : TgdClass::General;
}

inline TgdClass classify(const Program& p) {
    auto c = TgdClass::SimpleLinear;
    for (const auto& t : p.tgds) c = std::max(c, classifyTgd(t));
    return c;
}

// ---------------------------------------------------------------------------
// Size metrics: atom count, schema size, and max arity over rule predicates.

struct ProgramNorms {
    std::uint64_t atomCount = 0;
    std::uint64_t schemaSize = 0;
    std::uint64_t maxArity = 0;
    std::uint64_t value = 0;  // atomCount * schemaSize * maxArity
};

inline ProgramNorms norms(const Program& p, const PredTable& preds) {
    ProgramNorms n;
    std::unordered_set<PredId> sch;
    for (const auto& t : p.tgds) {
        // Variable namespaces are per-rule, so atoms are deduplicated per rule.
        std::vector<RuleAtom> distinct;
        auto visit = [&](const RuleAtom& a) {
            if (std::find(distinct.begin(), distinct.end(), a) == distinct.end()) {
                distinct.push_back(a);
                sch.insert(a.pred);
            }
        };
        for (const auto& a : t.body) visit(a);
        for (const auto& a : t.head) visit(a);
        n.atomCount += distinct.size();
    }
    n.schemaSize = sch.size();
    for (PredId q : sch) n.maxArity = std::max<std::uint64_t>(n.maxArity, preds.arity(q));
    n.value = n.atomCount * n.schemaSize * n.maxArity;
    return n;
}

// Distinct predicates across all rule atoms.
inline std::vector<PredId> rulePredicates(const Program& p) {
    std::unordered_set<PredId> seen;
    std::vector<PredId> out;
    auto visit = [&](const RuleAtom& a) {
        if (seen.insert(a.pred).second) out.push_back(a.pred);
    };
    for (const auto& t : p.tgds) {
        for (const auto& a : t.body) visit(a);
        for (const auto& a : t.head) visit(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Argument-tuple shape helpers. The id pattern numbers each argument by the
// first occurrence of its value: (x, y, x, z, y) -> (1, 2, 1, 3, 2).

template <typename T>
std::vector<std::uint32_t> idPattern(const std::vector<T>& args) {
    std::vector<std::uint32_t> out(args.size(), 0);
    std::vector<T> seen;
    for (std::size_t i = 0; i < args.size(); ++i) {
        auto it = std::find(seen.begin(), seen.end(), args[i]);
        if (it == seen.end()) {
            seen.push_back(args[i]);
            out[i] = static_cast<std::uint32_t>(seen.size());
        } else {
            out[i] = static_cast<std::uint32_t>(it - seen.begin()) + 1;
        }
    }
    return out;
}

// 0-based positions of first occurrences, ascending.
template <typename T>
std::vector<std::size_t> uniquePositions(const std::vector<T>& args) {
    std::vector<std::size_t> out;
    std::vector<T> seen;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (std::find(seen.begin(), seen.end(), args[i]) == seen.end()) {
            seen.push_back(args[i]);
            out.push_back(i);
        }
    }
    return out;
}

template <typename T>
std::vector<T> uniqueTerms(const std::vector<T>& args) {
    std::vector<T> out;
    for (const T& a : args)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    return out;
}

}  // namespace chasegate

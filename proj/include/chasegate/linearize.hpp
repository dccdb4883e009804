#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chasegate/chase.hpp"
#include "chasegate/core.hpp"

namespace chasegate {

// An atom whose arguments are small integers (type shapes) or term ids
// (instantiations); the two never mix inside one atom.
struct IntAtom {
    PredId pred = 0;
    std::vector<std::uint32_t> args;

    friend bool operator==(const IntAtom&, const IntAtom&) = default;
    friend auto operator<=>(const IntAtom&, const IntAtom&) = default;
};

// A guard shape plus side atoms over the guard's integers. Canonical form:
// integers appear in first-occurrence order starting at 1, side atoms are
// sorted, deduplicated, and never equal to the guard.
struct SigmaType {
    IntAtom guard;
    std::vector<IntAtom> side;

    friend bool operator==(const SigmaType&, const SigmaType&) = default;
    friend auto operator<=>(const SigmaType&, const SigmaType&) = default;

    std::uint32_t width() const {
        std::uint32_t m = 0;
        for (auto i : guard.args) m = std::max(m, i);
        return m;
    }
    std::vector<IntAtom> atoms() const {
        std::vector<IntAtom> out{guard};
        out.insert(out.end(), side.begin(), side.end());
        return out;
    }
};

struct CanonicalType {
    SigmaType type;
    std::vector<std::uint32_t> intToKey;  // 1-based: intToKey[i] = key renamed to integer i
};

// Relabels a guard tuple over arbitrary keys into canonical integers and
// carries the side atoms along. Side atoms over keys outside the guard are
// rejected.
inline CanonicalType canonicalType(PredId pred, std::span<const std::uint32_t> args,
                                   std::vector<IntAtom> side) {
    CanonicalType out;
    out.type.guard.pred = pred;
    out.intToKey.push_back(0);
    std::unordered_map<std::uint32_t, std::uint32_t> toInt;
    for (auto key : args) {
        auto it = toInt.find(key);
        if (it == toInt.end()) {
            it = toInt.emplace(key, static_cast<std::uint32_t>(toInt.size()) + 1).first;
            out.intToKey.push_back(key);
        }
        out.type.guard.args.push_back(it->second);
    }
    std::set<IntAtom> relabeled;
    for (auto& a : side) {
        for (auto& t : a.args) {
            auto it = toInt.find(t);
            if (it == toInt.end()) throw ProgramError("type side atom mentions a foreign term");
            t = it->second;
        }
        if (a != out.type.guard) relabeled.insert(std::move(a));
    }
    out.type.side.assign(relabeled.begin(), relabeled.end());
    return out;
}

inline CanonicalType canonicalType(const Atom& guard, const std::vector<Atom>& side) {
    std::vector<IntAtom> s;
    s.reserve(side.size());
    for (const auto& a : side) s.push_back(IntAtom{a.pred, a.args});
    return canonicalType(guard.pred, guard.args, std::move(s));
}

namespace detail {

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string typeKey(const SigmaType& t, const PredTable& preds) {
    auto one = [&](const IntAtom& a) {
        std::string s = preds.name(a.pred) + "(";
        for (std::size_t i = 0; i < a.args.size(); ++i)
            s += (i ? "," : "") + std::to_string(a.args[i]);
        return s + ")";
    };
    std::vector<std::string> sides;
    sides.reserve(t.side.size());
    for (const auto& a : t.side) sides.push_back(one(a));
    std::sort(sides.begin(), sides.end());
    std::string key = one(t.guard);
    for (const auto& s : sides) key += "|" + s;
    return key;
}

}  // namespace detail

// Interns one predicate per canonical type, named [tau#<hash>] with a numeric
// suffix on the rare hash collision. The name hashes a name-sorted rendering,
// so it is stable across runs and enumeration orders.
class TypeRegistry {
public:
    PredId intern(const SigmaType& t, PredTable& preds) {
        auto key = detail::typeKey(t, preds);
        if (auto it = byKey_.find(key); it != byKey_.end()) return it->second;
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx",
                      static_cast<unsigned long long>(detail::fnv1a64(key)));
        std::string name = std::string("[tau#") + hex + "]";
        for (int k = 2; preds.find(name).has_value(); ++k)
            name = std::string("[tau#") + hex + "-" + std::to_string(k) + "]";
        PredId id = preds.intern(name, t.width());
        byKey_.emplace(std::move(key), id);
        if (types_.size() <= id) types_.resize(id + 1);
        types_[id] = t;
        known_.insert(id);
        return id;
    }

    const SigmaType* find(PredId id) const { return known_.count(id) ? &types_[id] : nullptr; }
    std::size_t size() const { return known_.size(); }

    std::vector<PredId> all() const {
        std::vector<PredId> out(known_.begin(), known_.end());
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::unordered_map<std::string, PredId> byKey_;
    std::vector<SigmaType> types_;
    std::unordered_set<PredId> known_;
};

// ---------------------------------------------------------------------------
// Completion: the chase atoms that mention no invented value.

struct CompletionOptions {
    ChaseOptions chase;  // cap for the direct attempt; divergence falls back
    std::size_t typeBudget = 100000;

    CompletionOptions() {
        chase.maxAtoms = 5000;
        chase.keepLog = false;
    }
};

// Direct engine: when the chase finishes, keep the null-free atoms.
inline std::optional<std::vector<Atom>> completionDirect(const Symbols& syms, const Database& db,
                                                         const Program& p,
                                                         const ChaseOptions& opts) {
    auto outcome = runChase(syms, db, p, opts);
    if (outcome.status != ChaseStatus::Finished) return std::nullopt;
    std::vector<Atom> out;
    for (const auto& a : outcome.instance.atoms()) {
        bool ground = true;
        for (TermId t : a.args)
            if (isNull(t)) ground = false;
        if (ground) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

namespace detail {

// All homomorphisms from a rule body into a small atom set, one binding per
// distinct assignment of the rule's variables.
inline std::vector<std::vector<std::uint32_t>> bodyHoms(const Tgd& t,
                                                        const std::vector<IntAtom>& atoms) {
    std::vector<std::vector<std::uint32_t>> out;
    std::set<std::vector<std::uint32_t>> seen;
    std::vector<std::uint32_t> bind(t.varNames.size(), kNoTerm);
    std::vector<std::size_t> choice(t.body.size(), 0);
    std::vector<std::vector<VarId>> touchedAt(t.body.size());

    auto tryBind = [&](const RuleAtom& ra, const IntAtom& target, std::vector<VarId>& touched) {
        if (ra.pred != target.pred || ra.args.size() != target.args.size()) return false;
        for (std::size_t i = 0; i < ra.args.size(); ++i) {
            VarId v = ra.args[i];
            if (bind[v] == kNoTerm) {
                bind[v] = target.args[i];
                touched.push_back(v);
            } else if (bind[v] != target.args[i]) {
                return false;
            }
        }
        return true;
    };
    auto unbind = [&](std::size_t depth) {
        for (VarId v : touchedAt[depth]) bind[v] = kNoTerm;
        touchedAt[depth].clear();
    };

    std::size_t depth = 0;
    while (true) {
        if (depth == t.body.size()) {
            if (seen.insert(bind).second) out.push_back(bind);
            --depth;
            unbind(depth);
            ++choice[depth];
            continue;
        }
        if (choice[depth] >= atoms.size()) {
            choice[depth] = 0;
            if (depth == 0) break;
            --depth;
            unbind(depth);
            ++choice[depth];
            continue;
        }
        touchedAt[depth].clear();
        if (tryBind(t.body[depth], atoms[choice[depth]], touchedAt[depth])) {
            ++depth;
        } else {
            unbind(depth);
            ++choice[depth];
        }
    }
    return out;
}

// Saturation engine: a table of canonical types, each enriched with the extra
// atoms derivable over its own integers. A trigger whose head invents values
// spawns child types; their enrichment flows back through the spawn context
// until nothing changes anywhere.
class TypeSaturation {
public:
    TypeSaturation(const Program& p, const PredTable& preds, std::size_t budget)
        : p_(p), preds_(preds), budget_(budget) {
        freshBase_ = static_cast<std::uint32_t>(norms(p, preds).maxArity);
    }

    std::size_t ensure(const SigmaType& t) {
        auto key = typeKey(t, preds_);
        if (auto it = index_.find(key); it != index_.end()) return it->second;
        if (entries_.size() >= budget_)
            throw BudgetError("type saturation exceeded the type budget");
        index_.emplace(std::move(key), entries_.size());
        entries_.push_back(Entry{t, {}});
        return entries_.size() - 1;
    }

    void saturate() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::size_t i = 0; i < entries_.size(); ++i) changed |= process(i);
        }
    }

    // Guard, side atoms, and derived extras; every argument <= width.
    std::vector<IntAtom> atomsOf(std::size_t i) const {
        auto out = entries_[i].type.atoms();
        out.insert(out.end(), entries_[i].extra.begin(), entries_[i].extra.end());
        return out;
    }

private:
    struct Entry {
        SigmaType type;
        std::set<IntAtom> extra;
    };

    bool process(std::size_t i) {
        bool changed = false;
        const std::uint32_t width = entries_[i].type.width();
        const auto atoms = atomsOf(i);
        std::set<IntAtom> have(atoms.begin(), atoms.end());

        for (std::size_t ti = 0; ti < p_.tgds.size(); ++ti) {
            const Tgd& t = p_.tgds[ti];
            for (const auto& bind : bodyHoms(t, atoms)) {
                if (t.exVars.empty()) {
                    for (const auto& ha : t.head) {
                        IntAtom img{ha.pred, {}};
                        for (VarId v : ha.args) img.args.push_back(bind[v]);
                        if (have.insert(img).second) {
                            entries_[i].extra.insert(img);
                            changed = true;
                        }
                    }
                } else {
                    changed |= spawn(i, t, bind, width, have);
                }
            }
        }
        return changed;
    }

    bool spawn(std::size_t i, const Tgd& t, const std::vector<std::uint32_t>& bind,
               std::uint32_t width, std::set<IntAtom>& have) {
        const std::uint32_t base = std::max(freshBase_, width);
        auto valueOf = [&](VarId v) -> std::uint32_t {
            if (t.isEx[v]) {
                for (std::size_t k = 0; k < t.exVars.size(); ++k)
                    if (t.exVars[k] == v) return base + 1 + static_cast<std::uint32_t>(k);
            }
            return bind[v];
        };
        std::vector<IntAtom> heads;
        for (const auto& ha : t.head) {
            IntAtom img{ha.pred, {}};
            for (VarId v : ha.args) img.args.push_back(valueOf(v));
            heads.push_back(std::move(img));
        }

        std::set<IntAtom> context(have.begin(), have.end());
        for (const auto& h : heads) context.insert(h);

        bool changed = false;
        bool grown = true;
        while (grown) {
            grown = false;
            for (const auto& h : heads) {
                std::set<std::uint32_t> adom(h.args.begin(), h.args.end());
                std::vector<IntAtom> side;
                for (const auto& b : context) {
                    if (b == h) continue;
                    bool inside = true;
                    for (auto a : b.args)
                        if (!adom.count(a)) inside = false;
                    if (inside) side.push_back(b);
                }
                auto canon = canonicalType(h.pred, h.args, std::move(side));
                const std::size_t before = entries_.size();
                std::size_t ci = ensure(canon.type);
                if (entries_.size() != before) changed = true;
                for (const auto& b : atomsOf(ci)) {
                    IntAtom mapped{b.pred, {}};
                    for (auto a : b.args) mapped.args.push_back(canon.intToKey[a]);
                    if (context.insert(std::move(mapped)).second) grown = true;
                }
            }
        }

        for (const auto& b : context) {
            bool parentOnly = true;
            for (auto a : b.args)
                if (a > width) parentOnly = false;
            if (parentOnly && have.insert(b).second) {
                entries_[i].extra.insert(b);
                changed = true;
            }
        }
        return changed;
    }

    const Program& p_;
    const PredTable& preds_;
    std::size_t budget_;
    std::uint32_t freshBase_ = 0;
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace detail

// Saturation engine entry point: types each fact against the growing fact set
// and instantiates every enrichment back over the fact's own terms. Sound for
// guarded rules because any derivable value-free atom draws its terms from a
// single fact's arguments.
inline std::vector<Atom> completionSaturate(const Symbols& syms, const Database& db,
                                            const Program& p, const CompletionOptions& opts = {}) {
    if (classify(p) == TgdClass::General)
        throw ProgramError("completion by saturation requires a guarded program");
    detail::TypeSaturation sat(p, syms.preds, opts.typeBudget);

    std::vector<Atom> flat = db.facts();
    AtomSet seen(flat.begin(), flat.end());
    bool grown = true;
    while (grown) {
        grown = false;
        for (std::size_t fi = 0; fi < flat.size(); ++fi) {
            const Atom alpha = flat[fi];
            std::set<TermId> adom(alpha.args.begin(), alpha.args.end());
            std::vector<IntAtom> side;
            for (const auto& b : flat) {
                if (b == alpha) continue;
                bool inside = true;
                for (TermId t : b.args)
                    if (!adom.count(t)) inside = false;
                if (inside) side.push_back(IntAtom{b.pred, b.args});
            }
            auto canon = canonicalType(alpha.pred, alpha.args, std::move(side));
            std::size_t i = sat.ensure(canon.type);
            sat.saturate();
            for (const auto& b : sat.atomsOf(i)) {
                Atom mapped{b.pred, {}};
                for (auto a : b.args) mapped.args.push_back(canon.intToKey[a]);
                if (seen.insert(mapped).second) {
                    flat.push_back(std::move(mapped));
                    grown = true;
                }
            }
        }
    }
    std::sort(flat.begin(), flat.end());
    return flat;
}

inline std::vector<Atom> completion(const Symbols& syms, const Database& db, const Program& p,
                                    const CompletionOptions& opts = {}) {
    if (auto direct = completionDirect(syms, db, p, opts.chase)) return *direct;
    return completionSaturate(syms, db, p, opts);
}

// ---------------------------------------------------------------------------
// Linearization: one single-body-atom rule per (rule, compatible type) pair,
// over type predicates whose arguments are the distinct guard integers.

struct LinRuleOrigin {
    std::size_t tgd = 0;     // source rule index
    PredId bodyType = 0;
    std::vector<VarId> rep;  // source body variable -> variable carrying its integer
};

struct LinearizeResult {
    Symbols syms;
    Database db;
    Program prog;
    TypeRegistry types;
    std::vector<LinRuleOrigin> ruleOrigin;  // parallel to prog.tgds
};

struct LinearizeOptions {
    std::size_t typeBudget = 1000000;
    bool fullTypeEnum = false;
    CompletionOptions completion;
};

class Linearizer {
public:
    Linearizer(const Symbols& syms, const Database& db, const Program& p,
               LinearizeOptions opts = {})
        : db_(db), p_(p), opts_(std::move(opts)) {
        if (classify(p) == TgdClass::General)
            throw ProgramError("linearization requires a guarded program");
        out_.syms = syms;
        freshBase_ = static_cast<std::uint32_t>(norms(p, out_.syms.preds).maxArity);
    }

    PredId internType(const SigmaType& t) {
        const std::size_t before = out_.types.size();
        PredId id = out_.types.intern(t, out_.syms.preds);
        if (out_.types.size() != before) {
            if (out_.types.size() > opts_.typeBudget)
                throw BudgetError("linearization exceeded the type budget");
            worklist_.push_back(id);
        }
        return id;
    }

    // Each fact becomes its own type applied to the fact's distinct terms;
    // the side set is the fact-local slice of the completion.
    void seedFromDatabase() {
        auto comp = completion(out_.syms, db_, p_, opts_.completion);
        for (const auto& f : db_.facts()) {
            std::set<TermId> adom(f.args.begin(), f.args.end());
            std::vector<Atom> side;
            for (const auto& b : comp) {
                if (b == f) continue;
                bool inside = true;
                for (TermId t : b.args)
                    if (!adom.count(t)) inside = false;
                if (inside) side.push_back(b);
            }
            auto canon = canonicalType(f, side);
            PredId tp = internType(canon.type);
            out_.db.add(Atom{tp, uniqueTerms(f.args)});
        }
    }

    // Linearizes one rule against one type. Fails when the type's guard does
    // not refine the rule's guard pattern or some body atom is missing from
    // the type; succeeds at most once per (rule, type) pair.
    std::optional<std::size_t> addRule(std::size_t tgdIdx, const SigmaType& tau) {
        const Tgd& t = p_.tgds[tgdIdx];
        const std::size_t gi = *guardIndex(t);
        const RuleAtom& guard = t.body[gi];
        if (tau.guard.pred != guard.pred || tau.guard.args.size() != guard.args.size())
            return std::nullopt;

        PredId taupred = internType(tau);
        if (auto it = made_.find({tgdIdx, taupred}); it != made_.end()) return it->second;

        // The guard match fixes every body variable: repeated variables need
        // equal integers, and the remaining body atoms must sit in the type.
        std::vector<std::uint32_t> bind(t.varNames.size(), kNoTerm);
        for (std::size_t i = 0; i < guard.args.size(); ++i) {
            VarId v = guard.args[i];
            if (bind[v] == kNoTerm)
                bind[v] = tau.guard.args[i];
            else if (bind[v] != tau.guard.args[i])
                return std::nullopt;
        }
        const auto tauAtoms = tau.atoms();
        const std::set<IntAtom> have(tauAtoms.begin(), tauAtoms.end());
        for (std::size_t bi = 0; bi < t.body.size(); ++bi) {
            if (bi == gi) continue;
            IntAtom img{t.body[bi].pred, {}};
            for (VarId v : t.body[bi].args) img.args.push_back(bind[v]);
            if (!have.count(img)) return std::nullopt;
        }

        // One representative variable per integer: the variable at the first
        // guard position carrying it.
        const std::uint32_t width = tau.width();
        std::vector<VarId> repOfInt(width + 1, kNoTerm);
        for (std::size_t i = 0; i < guard.args.size(); ++i)
            if (repOfInt[tau.guard.args[i]] == kNoTerm) repOfInt[tau.guard.args[i]] = guard.args[i];

        const std::uint32_t base = std::max(freshBase_, width);
        auto valueOf = [&](VarId v) -> std::uint32_t {
            if (t.isEx[v]) {
                for (std::size_t k = 0; k < t.exVars.size(); ++k)
                    if (t.exVars[k] == v) return base + 1 + static_cast<std::uint32_t>(k);
            }
            return bind[v];
        };
        std::vector<IntAtom> heads;
        for (const auto& ha : t.head) {
            IntAtom img{ha.pred, {}};
            for (VarId v : ha.args) img.args.push_back(valueOf(v));
            heads.push_back(std::move(img));
        }

        // Head types are read off the completion of type atoms plus heads.
        const auto comp = completionOfInts(tauAtoms, heads);

        Tgd lin;
        lin.label = t.label + "@" + out_.syms.preds.name(taupred);
        lin.varNames = t.varNames;
        lin.exVars = t.exVars;
        RuleAtom bodyAtom{taupred, {}};
        for (std::uint32_t i = 1; i <= width; ++i) bodyAtom.args.push_back(repOfInt[i]);
        lin.body.push_back(std::move(bodyAtom));

        for (std::size_t hi = 0; hi < heads.size(); ++hi) {
            const IntAtom& alpha = heads[hi];
            std::set<std::uint32_t> adom(alpha.args.begin(), alpha.args.end());
            std::vector<IntAtom> side;
            for (const auto& b : comp) {
                if (b == alpha) continue;
                bool inside = true;
                for (auto a : b.args)
                    if (!adom.count(a)) inside = false;
                if (inside) side.push_back(b);
            }
            auto canon = canonicalType(alpha.pred, alpha.args, std::move(side));
            PredId cp = internType(canon.type);

            RuleAtom headAtom{cp, {}};
            std::set<std::uint32_t> seenInts;
            for (std::size_t k = 0; k < alpha.args.size(); ++k) {
                if (!seenInts.insert(alpha.args[k]).second) continue;
                VarId v = t.head[hi].args[k];
                headAtom.args.push_back(t.isEx[v] ? v : repOfInt[bind[v]]);
            }
            lin.head.push_back(std::move(headAtom));
        }
        finalizeTgd(lin);

        const std::size_t idx = out_.prog.tgds.size();
        out_.prog.tgds.push_back(std::move(lin));
        std::vector<VarId> rep(t.varNames.size(), kNoTerm);
        for (VarId v = 0; v < t.varNames.size(); ++v)
            if (bind[v] != kNoTerm && !t.isEx[v]) rep[v] = repOfInt[bind[v]];
        out_.ruleOrigin.push_back(LinRuleOrigin{tgdIdx, taupred, std::move(rep)});
        made_.emplace(std::make_pair(tgdIdx, taupred), idx);
        return idx;
    }

    // Processes types in discovery order; head types enqueue themselves, so
    // this reaches exactly the types derivable from the seeds.
    void drainWorklist() {
        while (!worklist_.empty()) {
            PredId tp = worklist_.front();
            worklist_.pop_front();
            const SigmaType tau = *out_.types.find(tp);
            for (std::size_t ti = 0; ti < p_.tgds.size(); ++ti) addRule(ti, tau);
        }
    }

    // Conformance mode: every type whose guard a rule guard could match, with
    // every side subset over the schema. Doubly exponential, so budgeted.
    void enumerateAllTypes() {
        std::vector<PredId> guardPreds;
        for (const auto& t : p_.tgds) {
            PredId g = t.body[*guardIndex(t)].pred;
            if (std::find(guardPreds.begin(), guardPreds.end(), g) == guardPreds.end())
                guardPreds.push_back(g);
        }
        const std::vector<PredId> sch = schemaUnion();
        std::vector<std::uint32_t> pattern;
        for (PredId g : guardPreds)
            enumeratePatterns(g, out_.syms.preds.arity(g), pattern, sch);
    }

    LinearizeResult finish() { return std::move(out_); }

    const Symbols& syms() const { return out_.syms; }
    const Program& linProgram() const { return out_.prog; }
    const TypeRegistry& types() const { return out_.types; }

private:
    // Completion of a small integer instance, through scratch symbols.
    std::vector<IntAtom> completionOfInts(const std::vector<IntAtom>& typeAtoms,
                                          const std::vector<IntAtom>& heads) {
        Symbols scratch;
        scratch.preds = out_.syms.preds;
        std::unordered_map<std::uint32_t, TermId> toTerm;
        std::vector<std::uint32_t> toInt;
        auto termOf = [&](std::uint32_t i) {
            auto it = toTerm.find(i);
            if (it == toTerm.end()) {
                TermId t = scratch.terms.constant("i" + std::to_string(i));
                it = toTerm.emplace(i, t).first;
                if (toInt.size() <= t) toInt.resize(t + 1);
                toInt[t] = i;
            }
            return it->second;
        };
        Database small;
        for (const auto* group : {&typeAtoms, &heads}) {
            for (const auto& a : *group) {
                Atom atom{a.pred, {}};
                for (auto i : a.args) atom.args.push_back(termOf(i));
                small.add(atom);
            }
        }
        auto comp = completion(scratch, small, p_, opts_.completion);
        std::vector<IntAtom> out;
        out.reserve(comp.size());
        for (const auto& a : comp) {
            IntAtom ia{a.pred, {}};
            for (TermId t : a.args) ia.args.push_back(toInt[t]);
            out.push_back(std::move(ia));
        }
        return out;
    }

    std::vector<PredId> schemaUnion() const {
        std::vector<PredId> sch = rulePredicates(p_);
        for (const auto& f : db_.facts())
            if (std::find(sch.begin(), sch.end(), f.pred) == sch.end()) sch.push_back(f.pred);
        std::sort(sch.begin(), sch.end());
        return sch;
    }

    void enumeratePatterns(PredId g, std::uint32_t arity, std::vector<std::uint32_t>& pattern,
                           const std::vector<PredId>& sch) {
        if (pattern.size() == arity) {
            emitSubsets(g, pattern, sch);
            return;
        }
        std::uint32_t maxSoFar = 0;
        for (auto i : pattern) maxSoFar = std::max(maxSoFar, i);
        const std::uint32_t limit = pattern.empty() ? 1 : maxSoFar + 1;
        for (std::uint32_t i = 1; i <= limit; ++i) {
            pattern.push_back(i);
            enumeratePatterns(g, arity, pattern, sch);
            pattern.pop_back();
        }
    }

    void emitSubsets(PredId g, const std::vector<std::uint32_t>& pattern,
                     const std::vector<PredId>& sch) {
        std::uint32_t width = 0;
        for (auto i : pattern) width = std::max(width, i);
        const IntAtom guard{g, pattern};
        std::vector<IntAtom> base;
        for (PredId r : sch) {
            const std::uint32_t ar = out_.syms.preds.arity(r);
            std::vector<std::uint32_t> tuple(ar, 1);
            while (true) {
                IntAtom a{r, tuple};
                if (a != guard) base.push_back(std::move(a));
                std::size_t k = ar;
                while (k > 0 && tuple[k - 1] == width) tuple[--k] = 1;
                if (k == 0) break;
                ++tuple[k - 1];
            }
        }
        if (base.size() > 20 || (std::size_t{1} << base.size()) > opts_.typeBudget)
            throw BudgetError("full type enumeration exceeds the type budget");
        for (std::size_t mask = 0; mask < (std::size_t{1} << base.size()); ++mask) {
            std::vector<IntAtom> side;
            for (std::size_t b = 0; b < base.size(); ++b)
                if (mask & (std::size_t{1} << b)) side.push_back(base[b]);
            internType(SigmaType{guard, std::move(side)});
        }
    }

    Database db_;
    Program p_;
    LinearizeOptions opts_;
    LinearizeResult out_;
    std::uint32_t freshBase_ = 0;
    std::deque<PredId> worklist_;
    std::map<std::pair<std::size_t, PredId>, std::optional<std::size_t>> made_;
};

inline LinearizeResult linearizeProgram(const Symbols& syms, const Database& db, const Program& p,
                                        const LinearizeOptions& opts = {}) {
    Linearizer l(syms, db, p, opts);
    l.seedFromDatabase();
    if (opts.fullTypeEnum) l.enumerateAllTypes();
    l.drainWorklist();
    return l.finish();
}

// ---------------------------------------------------------------------------
// Equivalence between the two finished chases: every original atom owns the
// class of typed atoms equivalent to it, and the classes partition the typed
// chase while preserving depths.

struct ElReport {
    LinearizeResult lin;
    ChaseOutcome original;
    ChaseOutcome linearized;
    std::vector<std::vector<std::uint32_t>> classes;  // per original atom id
    bool partitionOk = false;
    bool depthsMatch = false;
    std::string diagnostic;
};

namespace detail {

class ElChecker {
public:
    ElChecker(const LinearizeResult& lin, const ChaseOutcome& orig, const ChaseOutcome& linChase,
              const Program& origProg)
        : lin_(lin), orig_(orig), linChase_(linChase), origProg_(origProg) {}

    // alpha from the original chase, beta a typed atom: the guard must match
    // alpha's argument pattern, the type must equal alpha's slice of the
    // chase, and the distinct arguments must be pairwise equivalent.
    bool atomEquiv(const Atom& alpha, const Atom& beta) {
        const SigmaType* tau = lin_.types.find(beta.pred);
        if (!tau) return false;
        if (tau->guard.pred != alpha.pred) return false;
        if (idPattern(alpha.args) != tau->guard.args) return false;

        std::unordered_map<TermId, std::uint32_t> mu;
        for (std::size_t i = 0; i < alpha.args.size(); ++i)
            mu.emplace(alpha.args[i], tau->guard.args[i]);

        std::set<IntAtom> mapped;
        for (const auto& gamma : orig_.instance.atoms()) {
            bool inside = true;
            for (TermId t : gamma.args)
                if (!mu.count(t)) inside = false;
            if (!inside) continue;
            IntAtom ia{gamma.pred, {}};
            for (TermId t : gamma.args) ia.args.push_back(mu[t]);
            mapped.insert(std::move(ia));
        }
        const auto tauAtoms = tau->atoms();
        if (mapped != std::set<IntAtom>(tauAtoms.begin(), tauAtoms.end())) return false;

        const auto uniq = uniqueTerms(alpha.args);
        for (std::size_t i = 0; i < uniq.size(); ++i)
            if (!termEquiv(uniq[i], beta.args[i])) return false;
        return true;
    }

    // Constants are shared between the two symbol tables; invented values are
    // equivalent when one's rule linearizes the other's and the frontier
    // bindings agree through the representative map.
    bool termEquiv(TermId t, TermId u) {
        if (!isNull(t) || !isNull(u)) return t == u && !isNull(t);
        const auto key = std::make_pair(t, u);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        memo_.emplace(key, false);
        const bool eq = nullEquiv(t, u);
        memo_[key] = eq;
        return eq;
    }

private:
    bool nullEquiv(TermId t, TermId u) {
        const NullKey& kt = orig_.syms.terms.nullKey(t);
        const NullKey& ku = linChase_.syms.terms.nullKey(u);
        const LinRuleOrigin& origin = lin_.ruleOrigin[ku.tgd];
        if (origin.tgd != kt.tgd) return false;
        if (kt.exVar != ku.exVar) return false;

        const Tgd& source = origProg_.tgds[kt.tgd];
        const Tgd& linRule = lin_.prog.tgds[ku.tgd];
        for (std::size_t yi = 0; yi < linRule.frontier.size(); ++yi) {
            const VarId y = linRule.frontier[yi];
            for (std::size_t xi = 0; xi < source.frontier.size(); ++xi) {
                if (origin.rep[source.frontier[xi]] != y) continue;
                if (!termEquiv(kt.frontier[xi], ku.frontier[yi])) return false;
            }
        }
        return true;
    }

    const LinearizeResult& lin_;
    const ChaseOutcome& orig_;
    const ChaseOutcome& linChase_;
    const Program& origProg_;
    std::map<std::pair<TermId, TermId>, bool> memo_;
};

}  // namespace detail

inline ElReport elPartition(const Symbols& syms, const Database& db, const Program& p,
                            const LinearizeOptions& lopts = {}, const ChaseOptions& copts = {}) {
    ElReport r;
    r.lin = linearizeProgram(syms, db, p, lopts);
    r.original = runChase(syms, db, p, copts);
    r.linearized = runChase(r.lin.syms, r.lin.db, r.lin.prog, copts);
    if (r.original.status != ChaseStatus::Finished || r.linearized.status != ChaseStatus::Finished)
        throw BudgetError("equivalence check requires both chases to finish within caps");

    detail::ElChecker checker(r.lin, r.original, r.linearized, p);

    const auto& orig = r.original.instance.atoms();
    const auto& lin = r.linearized.instance.atoms();
    r.classes.assign(orig.size(), {});
    std::vector<std::uint32_t> owner(lin.size(), kNoTerm);
    bool ok = true;
    std::string diag;

    for (std::uint32_t ai = 0; ai < orig.size(); ++ai) {
        for (std::uint32_t bi = 0; bi < lin.size(); ++bi) {
            if (!checker.atomEquiv(orig[ai], lin[bi])) continue;
            r.classes[ai].push_back(bi);
            if (owner[bi] != kNoTerm) {
                ok = false;
                if (diag.empty()) diag = "typed atom equivalent to two distinct atoms";
            }
            owner[bi] = ai;
        }
        if (r.classes[ai].empty()) {
            ok = false;
            if (diag.empty()) diag = "atom has no equivalent typed atom";
        }
    }
    for (std::uint32_t bi = 0; bi < lin.size(); ++bi) {
        if (owner[bi] == kNoTerm) {
            ok = false;
            if (diag.empty()) diag = "typed atom not equivalent to any atom";
        }
    }

    bool depths = r.original.maxDepth == r.linearized.maxDepth;
    for (std::uint32_t ai = 0; ai < orig.size() && depths; ++ai)
        for (std::uint32_t bi : r.classes[ai])
            if (atomDepth(orig[ai], r.original.syms.terms) !=
                atomDepth(lin[bi], r.linearized.syms.terms))
                depths = false;

    r.partitionOk = ok;
    r.depthsMatch = depths;
    r.diagnostic = diag;
    return r;
}

}  // namespace chasegate

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "chasegate/core.hpp"

namespace chasegate {

inline constexpr TermId kNoTerm = 0xFFFFFFFFu;
inline constexpr std::uint32_t kNoParent = 0xFFFFFFFFu;

// hom is indexed by the rule's VarId; entries for non-body variables are kNoTerm.
struct Trigger {
    std::uint32_t tgd = 0;
    std::vector<TermId> hom;
};

enum class ChaseStatus { Finished, CapExceeded };
enum class CapKind { None, Atoms, Steps, Depth };
enum class Strategy { Fifo, Lifo, Random };

inline const char* toString(ChaseStatus s) {
    switch (s) {
        case ChaseStatus::Finished: return "Finished";
        case ChaseStatus::CapExceeded: return "CapExceeded";
    }
    return "";
}

inline const char* toString(CapKind k) {
    switch (k) {
        case CapKind::None: return "None";
        case CapKind::Atoms: return "Atoms";
        case CapKind::Steps: return "Steps";
        case CapKind::Depth: return "Depth";
    }
    return "";
}

inline const char* toString(Strategy s) {
    switch (s) {
        case Strategy::Fifo: return "Fifo";
        case Strategy::Lifo: return "Lifo";
        case Strategy::Random: return "Random";
    }
    return "";
}

struct ChaseOptions {
    std::size_t maxAtoms = 100000;
    std::size_t maxSteps = 0;       // 0 selects the default 10 * maxAtoms
    std::uint32_t depthCap = 0;     // 0 is unbounded; stop before inserting deeper atoms
    Strategy strategy = Strategy::Fifo;
    std::uint64_t seed = 0;
    bool keepLog = true;
};

struct ChaseOutcome {
    ChaseStatus status = ChaseStatus::Finished;
    CapKind cap = CapKind::None;
    Symbols syms;              // input symbols extended with the run's nulls
    Instance instance;
    std::size_t dbSize = 0;
    std::uint64_t steps = 0;
    std::uint32_t maxDepth = 0;
    std::vector<Trigger> log;  // applied triggers, in order (when keepLog)
    // Forest: per atom id, the id of the trigger's parent atom (kNoParent for
    // database facts). The parent is the image of the rule's widest body atom
    // (the guard whenever one exists).
    std::vector<std::uint32_t> parent;
};

// Body atom whose argument list covers the most distinct variables; ties go to
// the earliest atom. For guarded rules this is the guard.
inline std::size_t parentBodyIndex(const Tgd& t) {
    std::size_t best = 0;
    std::size_t bestCount = 0;
    for (std::size_t i = 0; i < t.body.size(); ++i) {
        std::unordered_set<VarId> distinct(t.body[i].args.begin(), t.body[i].args.end());
        if (distinct.size() > bestCount) {
            bestCount = distinct.size();
            best = i;
        }
    }
    return best;
}

// result(σ,h): frontier variables map through hom, each existential z to the
// null determined by (σ, hom|fr(σ), z).
inline std::vector<Atom> resultOfTrigger(Symbols& syms, const Program& p, std::uint32_t tgdIdx,
                                         const std::vector<TermId>& hom) {
    const Tgd& t = p.tgds[tgdIdx];
    NullKey key;
    key.tgd = tgdIdx;
    key.frontier.reserve(t.frontier.size());
    for (VarId v : t.frontier) key.frontier.push_back(hom[v]);

    std::vector<TermId> mu(t.varNames.size(), kNoTerm);
    for (VarId v : t.frontier) mu[v] = hom[v];
    for (VarId v = 0; v < t.varNames.size(); ++v) {
        if (t.isEx[v]) {
            key.exVar = v;
            mu[v] = syms.terms.makeNull(key);
        }
    }

    std::vector<Atom> out;
    out.reserve(t.head.size());
    for (const auto& a : t.head) {
        Atom g;
        g.pred = a.pred;
        g.args.reserve(a.args.size());
        for (VarId v : a.args) g.args.push_back(mu[v]);
        out.push_back(std::move(g));
    }
    return out;
}

namespace detail {

struct TriggerKey {
    std::uint32_t tgd;
    std::vector<TermId> frontier;
    bool operator==(const TriggerKey&) const = default;
};

struct TriggerKeyHash {
    std::size_t operator()(const TriggerKey& k) const {
        std::size_t h = k.tgd;
        for (TermId t : k.frontier) h = hashCombine(h, t);
        return h;
    }
};

class ChaseRun {
public:
    ChaseRun(const Symbols& syms, const Database& db, const Program& p, const ChaseOptions& opts)
        : p_(p), opts_(opts), rng_(opts.seed) {
        if (opts_.maxAtoms == 0) throw ProgramError("maxAtoms cap must be positive");
        if (opts_.maxSteps == 0) opts_.maxSteps = 10 * opts_.maxAtoms;
        out_.syms = syms;
        out_.dbSize = db.size();
        parentIdx_.reserve(p.tgds.size());
        for (const auto& t : p.tgds) parentIdx_.push_back(parentBodyIndex(t));
        for (const auto& f : db.facts()) {
            for (TermId t : f.args)
                if (!isConstant(t)) throw ProgramError("database fact contains a non-constant");
            insertAtom(f, kNoParent);
        }
    }

    ChaseOutcome run() {
        while (!pending_.empty()) {
            Trigger trig = pop();
            auto result = resultOfTrigger(out_.syms, p_, trig.tgd, trig.hom);
            bool active = false;
            for (const auto& a : result)
                if (!out_.instance.contains(a)) { active = true; break; }
            if (!active) continue;
            if (opts_.depthCap) {
                for (const auto& a : result)
                    if (atomDepth(a, out_.syms.terms) > opts_.depthCap)
                        return capped(CapKind::Depth);
            }
            if (out_.steps >= opts_.maxSteps) return capped(CapKind::Steps);
            ++out_.steps;
            std::uint32_t parentAtom = parentAtomId(trig);
            for (const auto& a : result) {
                if (out_.instance.size() >= opts_.maxAtoms && !out_.instance.contains(a))
                    return capped(CapKind::Atoms);
                insertAtom(a, parentAtom);
            }
            if (opts_.keepLog) out_.log.push_back(std::move(trig));
        }
        out_.status = ChaseStatus::Finished;
        out_.cap = CapKind::None;
        return std::move(out_);
    }

private:
    ChaseOutcome capped(CapKind kind) {
        out_.status = ChaseStatus::CapExceeded;
        out_.cap = kind;
        return std::move(out_);
    }

    std::uint32_t parentAtomId(const Trigger& trig) {
        const Tgd& t = p_.tgds[trig.tgd];
        const RuleAtom& pa = t.body[parentIdx_[trig.tgd]];
        Atom g;
        g.pred = pa.pred;
        for (VarId v : pa.args) g.args.push_back(trig.hom[v]);
        return out_.instance.insert(g).first;
    }

    void insertAtom(const Atom& a, std::uint32_t parent) {
        auto [id, fresh] = out_.instance.insert(a);
        if (!fresh) return;
        out_.parent.push_back(parent);
        out_.maxDepth = std::max(out_.maxDepth, atomDepth(a, out_.syms.terms));
        discover(id);
    }

    // Finds homs that map some body atom of some rule onto the new atom; all
    // other body atoms match previously inserted atoms.
    void discover(std::uint32_t newAtomId) {
        const Atom& atom = out_.instance.atom(newAtomId);
        for (std::uint32_t ti = 0; ti < p_.tgds.size(); ++ti) {
            const Tgd& t = p_.tgds[ti];
            for (std::size_t j = 0; j < t.body.size(); ++j) {
                if (t.body[j].pred != atom.pred) continue;
                std::vector<TermId> hom(t.varNames.size(), kNoTerm);
                if (!bindAtom(t.body[j], atom, hom)) continue;
                std::vector<bool> done(t.body.size(), false);
                done[j] = true;
                matchRemaining(ti, t, done, hom);
            }
        }
    }

    static bool bindAtom(const RuleAtom& ra, const Atom& a, std::vector<TermId>& hom) {
        for (std::size_t i = 0; i < ra.args.size(); ++i) {
            TermId bound = hom[ra.args[i]];
            if (bound == kNoTerm)
                hom[ra.args[i]] = a.args[i];
            else if (bound != a.args[i])
                return false;
        }
        return true;
    }

    void matchRemaining(std::uint32_t ti, const Tgd& t, std::vector<bool>& done,
                        std::vector<TermId>& hom) {
        // Next body atom: fully bound ones first (membership check), then the
        // one with the most bound arguments.
        std::size_t next = t.body.size();
        std::size_t bestBound = 0;
        bool found = false;
        for (std::size_t i = 0; i < t.body.size(); ++i) {
            if (done[i]) continue;
            std::size_t bound = 0;
            for (VarId v : t.body[i].args)
                if (hom[v] != kNoTerm) ++bound;
            if (!found || bound > bestBound) {
                next = i;
                bestBound = bound;
                found = true;
            }
        }
        if (!found) {
            enqueue(ti, hom);
            return;
        }

        const RuleAtom& ra = t.body[next];
        done[next] = true;
        if (bestBound == ra.args.size()) {
            Atom g;
            g.pred = ra.pred;
            for (VarId v : ra.args) g.args.push_back(hom[v]);
            if (out_.instance.contains(g)) matchRemaining(ti, t, done, hom);
        } else {
            for (std::uint32_t id : out_.instance.byPred(ra.pred)) {
                std::vector<TermId> saved = hom;
                if (bindAtom(ra, out_.instance.atom(id), hom)) matchRemaining(ti, t, done, hom);
                hom = std::move(saved);
            }
        }
        done[next] = false;
    }

    void enqueue(std::uint32_t ti, const std::vector<TermId>& hom) {
        TriggerKey key;
        key.tgd = ti;
        for (VarId v : p_.tgds[ti].frontier) key.frontier.push_back(hom[v]);
        if (!seen_.insert(key).second) return;
        pending_.push_back(Trigger{ti, hom});
    }

    Trigger pop() {
        switch (opts_.strategy) {
            case Strategy::Fifo: {
                Trigger t = std::move(pending_.front());
                pending_.pop_front();
                return t;
            }
            case Strategy::Lifo: {
                Trigger t = std::move(pending_.back());
                pending_.pop_back();
                return t;
            }
            case Strategy::Random: {
                std::uniform_int_distribution<std::size_t> dist(0, pending_.size() - 1);
                std::size_t i = dist(rng_);
                std::swap(pending_[i], pending_.back());
                Trigger t = std::move(pending_.back());
                pending_.pop_back();
                return t;
            }
        }
        throw ProgramError("unknown strategy");
    }

    const Program& p_;
    ChaseOptions opts_;
    ChaseOutcome out_;
    std::vector<std::size_t> parentIdx_;
    std::deque<Trigger> pending_;
    std::unordered_set<TriggerKey, TriggerKeyHash> seen_;
    std::mt19937_64 rng_;
};

}  // namespace detail

inline ChaseOutcome runChase(const Symbols& syms, const Database& db, const Program& p,
                             const ChaseOptions& opts = {}) {
    return detail::ChaseRun(syms, db, p, opts).run();
}

// Atoms of each depth in the forest tree rooted at a database fact. Non-root
// atoms belong to the tree of their producing trigger's parent atom.
inline std::map<std::uint32_t, std::uint64_t> forestLevelCounts(const ChaseOutcome& outcome,
                                                                const Atom& root) {
    std::optional<std::uint32_t> rootId;
    for (std::uint32_t id = 0; id < outcome.dbSize; ++id) {
        if (outcome.instance.atom(id) == root) {
            rootId = id;
            break;
        }
    }
    if (!rootId) throw ProgramError("forest root is not a database fact");

    std::vector<std::uint32_t> rootOf(outcome.instance.size());
    for (std::uint32_t id = 0; id < outcome.instance.size(); ++id)
        rootOf[id] = outcome.parent[id] == kNoParent ? id : rootOf[outcome.parent[id]];

    std::map<std::uint32_t, std::uint64_t> counts;
    for (std::uint32_t id = 0; id < outcome.instance.size(); ++id) {
        if (rootOf[id] != *rootId) continue;
        counts[atomDepth(outcome.instance.atom(id), outcome.syms.terms)] += 1;
    }
    return counts;
}

}  // namespace chasegate

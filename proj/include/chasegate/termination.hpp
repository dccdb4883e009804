#pragma once

// Termination deciders: the depth and size bound formulas, the
// characterization-based decider per class, the naive bound-capped chase, and
// cross-validation of the independent methods.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "chasegate/chase.hpp"
#include "chasegate/core.hpp"
#include "chasegate/depgraph.hpp"
#include "chasegate/linearize.hpp"
#include "chasegate/simplify.hpp"

namespace chasegate {

using BigInt = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Depth bound d_C and size factor f_C per class:
//   d_SL = |sch|*ar
//   d_L  = |sch|*ar^(ar+1)
//   d_G  = |sch|*ar^(2*ar+1)*2^(|sch|*ar^ar)
//   f_C  = (d_C+1)*||S||^(2*ar*(d_C+1))      with ||S|| = |atoms|*|sch|*ar
// A finished chase satisfies |chase| <= |D|*f_C and maxDepth <= d_C.

struct Bounds {
    TgdClass cls = TgdClass::SimpleLinear;
    std::optional<BigInt> d;  // absent when the value exceeds the bit budget
    std::optional<BigInt> f;
    BigInt dBits = 0;  // lower bounds on the bit lengths, always valid
    BigInt fBits = 0;
};

namespace detail {

inline BigInt ipow(BigInt base, std::uint64_t e) {
    BigInt r = 1;
    while (e) {
        if (e & 1) r *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return r;
}

inline BigInt bitLength(const BigInt& x) {
    return x.is_zero() ? BigInt(0) : BigInt(boost::multiprecision::msb(x)) + 1;
}

}  // namespace detail

inline Bounds bounds(const Program& p, const PredTable& preds, TgdClass cls,
                     std::size_t bitBudget = std::size_t{1} << 20) {
    if (cls == TgdClass::General)
        throw ProgramError("no bound formulas exist for general rules");
    const ProgramNorms n = norms(p, preds);
    const BigInt sch = n.schemaSize;
    const std::uint64_t ar = n.maxArity;
    const BigInt norm = BigInt(n.atomCount) * sch * ar;

    Bounds b;
    b.cls = cls;
    switch (cls) {
        case TgdClass::SimpleLinear:
            b.d = sch * ar;
            break;
        case TgdClass::Linear:
            b.d = sch * detail::ipow(ar, ar + 1);
            break;
        case TgdClass::Guarded: {
            const BigInt shift = sch * detail::ipow(ar, ar);
            const BigInt head = sch * detail::ipow(ar, 2 * ar + 1);
            if (head.is_zero()) {
                b.d = BigInt(0);
            } else {
                b.dBits = detail::bitLength(head) + shift;
                if (b.dBits <= bitBudget) b.d = head << shift.convert_to<std::size_t>();
            }
            break;
        }
        default:
            break;
    }
    if (b.d) b.dBits = detail::bitLength(*b.d);

    if (!b.d) {
        b.fBits = b.dBits;  // f >= 2^d; weak lower bound past the budget
        return b;
    }
    if (norm <= 1) {
        b.f = *b.d + 1;  // ||S|| <= 1 forces the power to 1 (0^0 included)
        b.fBits = detail::bitLength(*b.f);
        return b;
    }
    const BigInt e = 2 * BigInt(ar) * (*b.d + 1);
    const BigInt fBitsHigh = detail::bitLength(*b.d + 1) + e * detail::bitLength(norm);
    if (fBitsHigh <= bitBudget) {
        b.f = (*b.d + 1) * detail::ipow(norm, e.convert_to<std::uint64_t>());
        b.fBits = detail::bitLength(*b.f);
    } else {
        b.fBits = e * (detail::bitLength(norm) - 1) + 1;
    }
    return b;
}

// ---------------------------------------------------------------------------
// Verdicts.

enum class Answer { Terminates, Diverges, Unknown };
enum class Method { Characterization, Bound, CappedChase };

inline const char* toString(Answer a) {
    switch (a) {
        case Answer::Terminates: return "Terminates";
        case Answer::Diverges: return "Diverges";
        case Answer::Unknown: return "Unknown";
    }
    return "";
}

inline const char* toString(Method m) {
    switch (m) {
        case Method::Characterization: return "Characterization";
        case Method::Bound: return "Bound";
        case Method::CappedChase: return "CappedChase";
    }
    return "";
}

inline int exitCode(Answer a) {
    switch (a) {
        case Answer::Terminates: return 0;
        case Answer::Diverges: return 1;
        case Answer::Unknown: return 2;
    }
    return 2;
}

struct ChaseStats {
    ChaseStatus status = ChaseStatus::Finished;
    CapKind cap = CapKind::None;
    std::size_t atoms = 0;
    std::size_t dbFacts = 0;
    std::size_t steps = 0;
    std::uint32_t maxDepth = 0;
};

inline ChaseStats statsOf(const ChaseOutcome& oc) {
    return ChaseStats{oc.status, oc.cap, oc.instance.size(), oc.dbSize, oc.steps, oc.maxDepth};
}

struct Verdict {
    Answer answer = Answer::Unknown;
    Method method = Method::Characterization;
    TgdClass cls = TgdClass::SimpleLinear;
    std::optional<WaWitness> witness;      // supported special cycle, when one exists
    std::string witnessText;               // rendered over the analyzed program
    std::vector<std::string> witnessCycle; // the cycle's position names, closed walk
    std::optional<ChaseStats> stats;   // evidence for the chase-based methods
    std::optional<Bounds> bounds;      // absent for general rules
    std::optional<BigInt> sizeBound;   // |D|*f when materialized
    std::string warning;
};

inline std::string renderWitness(const DepGraph& g, const WaWitness& w, const Program& p,
                                 const PredTable& preds) {
    std::string out = "supported special cycle ";
    for (std::size_t i = 0; i < w.cycle.size(); ++i) {
        if (i) out += " -> ";
        out += g.nodeName(w.cycle[i], preds);
    }
    out += ", special edge from rule " + p.tgds[w.specialEdge.tgd].label;
    out += ", supported by " + preds.name(w.support);
    return out;
}

struct DecideOptions {
    std::optional<TgdClass> cls;  // force a class no tighter than the actual one
    ChaseOptions chase;           // cap for the general-rules semi-decision
    SimplifyOptions simplify;
    LinearizeOptions linearize;
    BigInt ceiling = 1000000000;  // refusal threshold on |D|*f for the bound method
    std::size_t boundBitBudget = std::size_t{1} << 20;
    bool depthExit = true;        // stop the bound run once depth passes d_C
};

inline TgdClass effectiveClass(const Program& p, std::optional<TgdClass> requested) {
    const TgdClass actual = classify(p);
    if (!requested) return actual;
    if (static_cast<int>(*requested) < static_cast<int>(actual))
        throw ProgramError(std::string("program classifies as ") + toString(actual) +
                           ", outside the requested class " + toString(*requested));
    return *requested;
}

// Naive decider: chase under the cap |D|*f_C. Finished proves termination;
// outgrowing the cap proves divergence, as does any atom deeper than d_C,
// which ends divergent runs long before the astronomic atom cap.
inline Verdict decideByBound(const Symbols& syms, const Database& db, const Program& p,
                             const DecideOptions& opts = {}) {
    const TgdClass cls = effectiveClass(p, opts.cls);
    if (cls == TgdClass::General)
        throw ProgramError("the bound decider requires a guarded class");

    Verdict v;
    v.method = Method::Bound;
    v.cls = cls;
    v.bounds = bounds(p, syms.preds, cls, opts.boundBitBudget);
    if (!v.bounds->f)
        throw BudgetError("the size bound exceeds the bit budget; use the characterization decider");
    const BigInt sizeBound = BigInt(db.size()) * *v.bounds->f;
    v.sizeBound = sizeBound;
    if (sizeBound > opts.ceiling)
        throw BudgetError("naive cap |D|*f = " + sizeBound.str() +
                          " exceeds the ceiling; use the characterization decider");

    constexpr std::size_t kClamp = std::numeric_limits<std::size_t>::max() / 2;
    const bool clamped = sizeBound > kClamp;
    ChaseOptions co = opts.chase;
    co.maxAtoms =
        std::max<std::size_t>(clamped ? kClamp : sizeBound.convert_to<std::size_t>(), 1);
    co.maxSteps = co.maxAtoms;  // every applied trigger adds at least one atom
    co.keepLog = false;
    co.depthCap = 0;
    if (opts.depthExit && v.bounds->d && *v.bounds->d < BigInt(0xFFFFFFFFu))
        co.depthCap = v.bounds->d->convert_to<std::uint32_t>();

    const ChaseOutcome oc = runChase(syms, db, p, co);
    v.stats = statsOf(oc);
    if (oc.status == ChaseStatus::Finished) {
        v.answer = Answer::Terminates;
    } else if (oc.cap == CapKind::Depth) {
        v.answer = Answer::Diverges;
    } else if (!clamped) {
        v.answer = Answer::Diverges;
    } else {
        throw BudgetError("the cap exceeds the platform word size and the run hit the clamp; "
                          "use the characterization decider");
    }
    return v;
}

// Characterization decider: acyclicity of the class-specific reduct, a capped
// chase for general rules. Transformation budget overruns degrade to the
// naive bound with a warning.
inline Verdict decide(const Symbols& syms, const Database& db, const Program& p,
                      const DecideOptions& opts = {}) {
    const TgdClass cls = effectiveClass(p, opts.cls);
    Verdict v;
    v.cls = cls;

    auto conclude = [&v](const DepGraph& g, const Database& facts, const Program& analyzed,
                         const PredTable& preds) {
        v.witness = findWaViolation(g, facts);
        if (v.witness) {
            v.witnessText = renderWitness(g, *v.witness, analyzed, preds);
            for (std::uint32_t node : v.witness->cycle)
                v.witnessCycle.push_back(g.nodeName(node, preds));
        }
        v.answer = v.witness ? Answer::Diverges : Answer::Terminates;
    };

    switch (cls) {
        case TgdClass::SimpleLinear: {
            v.bounds = bounds(p, syms.preds, cls, opts.boundBitBudget);
            const DepGraph g = buildDependencyGraph(p, syms.preds);
            conclude(g, db, p, syms.preds);
            return v;
        }
        case TgdClass::Linear: {
            v.bounds = bounds(p, syms.preds, cls, opts.boundBitBudget);
            const SimplifyResult s = simplifyProgram(syms, db, p, opts.simplify);
            const DepGraph g = buildDependencyGraph(s.prog, s.syms.preds);
            conclude(g, s.db, s.prog, s.syms.preds);
            return v;
        }
        case TgdClass::Guarded: {
            v.bounds = bounds(p, syms.preds, cls, opts.boundBitBudget);
            try {
                const LinearizeResult lin = linearizeProgram(syms, db, p, opts.linearize);
                const SimplifyResult s = simplifyProgram(lin.syms, lin.db, lin.prog, opts.simplify);
                const DepGraph g = buildDependencyGraph(s.prog, s.syms.preds);
                conclude(g, s.db, s.prog, s.syms.preds);
                return v;
            } catch (const BudgetError& e) {
                Verdict fallback = decideByBound(syms, db, p, opts);
                fallback.warning = std::string("transformation budget exceeded (") + e.what() +
                                   "); decided by the naive bound";
                return fallback;
            }
        }
        case TgdClass::General: {
            const ChaseOutcome oc = runChase(syms, db, p, opts.chase);
            v.method = Method::CappedChase;
            v.stats = statsOf(oc);
            v.answer = oc.status == ChaseStatus::Finished ? Answer::Terminates : Answer::Unknown;
            return v;
        }
    }
    throw ProgramError("unknown class");
}

// ---------------------------------------------------------------------------
// Agreement of the three independent methods on the two linear classes.

struct CrossReport {
    Verdict characterization;
    Verdict bound;
    bool ucqSaysDiverges = false;
    bool agree = false;
};

inline CrossReport crossValidate(const Symbols& syms, const Database& db, const Program& p,
                                 const DecideOptions& opts = {}) {
    const TgdClass cls = effectiveClass(p, opts.cls);
    if (cls != TgdClass::SimpleLinear && cls != TgdClass::Linear)
        throw ProgramError("cross-validation covers the two linear classes");

    CrossReport r;
    r.characterization = decide(syms, db, p, opts);
    r.bound = decideByBound(syms, db, p, opts);
    const Ucq q = buildUcq(
        syms, p, cls == TgdClass::SimpleLinear ? UcqVariant::SL : UcqVariant::LinearSimplified,
        opts.simplify);
    r.ucqSaysDiverges = evalUcq(q, db);
    r.agree = r.characterization.answer == r.bound.answer &&
              r.ucqSaysDiverges == (r.characterization.answer == Answer::Diverges);
    return r;
}

}  // namespace chasegate

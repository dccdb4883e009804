#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "chasegate/chase.hpp"
#include "chasegate/core.hpp"

namespace chasegate {

struct SimplifyOptions {
    std::size_t maxDistinctVars = 10;  // Bell(10) = 115975 specializations per rule
};

struct SimplifiedPredInfo {
    PredId base = 0;
    std::vector<std::uint32_t> idTuple;
};

struct SimplifyResult {
    Symbols syms;  // input symbols extended with the simplified predicates
    Database db;
    Program prog;
    // Per output rule: the source rule index and the specialization f over its
    // variable ids (f[v] = v for untouched variables).
    std::vector<std::pair<std::uint32_t, std::vector<VarId>>> ruleOrigin;
    std::unordered_map<PredId, SimplifiedPredInfo> predInfo;
};

inline std::string simplifiedPredName(const std::string& base,
                                      const std::vector<std::uint32_t>& idTuple) {
    std::string out = base + "_{(";
    for (std::size_t i = 0; i < idTuple.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(idTuple[i]);
    }
    return out + ")}";
}

// All substitutions with f(x_1) = x_1 and f(x_i) in {f(x_1),...,f(x_{i-1}), x_i}.
// Count is the Bell number of the tuple length.
inline std::vector<std::vector<VarId>> specializations(const std::vector<VarId>& vars,
                                                       std::size_t maxVars = 10) {
    if (vars.size() > maxVars)
        throw BudgetError("specialization budget: " + std::to_string(vars.size()) +
                          " distinct variables exceeds the cap of " + std::to_string(maxVars));
    std::vector<std::vector<VarId>> out;
    std::vector<VarId> f;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == vars.size()) {
            out.push_back(f);
            return;
        }
        std::vector<VarId> choices;
        for (VarId v : f)
            if (std::find(choices.begin(), choices.end(), v) == choices.end())
                choices.push_back(v);
        choices.push_back(vars[i]);
        for (VarId c : choices) {
            f.push_back(c);
            self(self, i + 1);
            f.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

namespace detail {

inline PredId internSimplified(Symbols& syms, PredId base, const std::vector<std::uint32_t>& idTuple,
                               std::unordered_map<PredId, SimplifiedPredInfo>& predInfo,
                               const PredTable& basePreds) {
    std::uint32_t distinct = 0;
    for (std::uint32_t v : idTuple) distinct = std::max(distinct, v);
    PredId id = syms.preds.intern(simplifiedPredName(basePreds.name(base), idTuple), distinct);
    predInfo.emplace(id, SimplifiedPredInfo{base, idTuple});
    return id;
}

}  // namespace detail

// simple(R(t)) = R_{id(t)}(unique(t)).
inline Atom simplifyAtom(const Atom& a, const PredTable& inPreds, Symbols& outSyms,
                         std::unordered_map<PredId, SimplifiedPredInfo>& predInfo) {
    Atom out;
    out.pred = detail::internSimplified(outSyms, a.pred, idPattern(a.args), predInfo, inPreds);
    out.args = uniqueTerms(a.args);
    return out;
}

inline RuleAtom simplifyRuleAtom(const RuleAtom& a, const PredTable& inPreds, Symbols& outSyms,
                                 std::unordered_map<PredId, SimplifiedPredInfo>& predInfo) {
    RuleAtom out;
    out.pred = detail::internSimplified(outSyms, a.pred, idPattern(a.args), predInfo, inPreds);
    out.args = uniqueTerms(a.args);
    return out;
}

// simple(D) and simple(Sigma): every specialization of every rule, with every
// atom replaced by its simplified form. The output program is simple-linear.
inline SimplifyResult simplifyProgram(const Symbols& syms, const Database& db, const Program& p,
                                      const SimplifyOptions& opts = {}) {
    auto cls = classify(p);
    if (cls != TgdClass::SimpleLinear && cls != TgdClass::Linear)
        throw ProgramError("simplification requires a linear program, got " +
                           std::string(toString(cls)));

    SimplifyResult out;
    out.syms = syms;
    for (const auto& f : db.facts())
        out.db.add(simplifyAtom(f, syms.preds, out.syms, out.predInfo));

    for (std::uint32_t ti = 0; ti < p.tgds.size(); ++ti) {
        const Tgd& t = p.tgds[ti];
        std::vector<VarId> bodyVars = uniqueTerms(t.body[0].args);
        auto specs = specializations(bodyVars, opts.maxDistinctVars);
        for (std::size_t si = 0; si < specs.size(); ++si) {
            std::vector<VarId> f(t.varNames.size());
            for (VarId v = 0; v < t.varNames.size(); ++v) f[v] = v;
            for (std::size_t i = 0; i < bodyVars.size(); ++i) f[bodyVars[i]] = specs[si][i];

            Tgd s;
            s.label = t.label + "#" + std::to_string(si + 1);
            s.varNames = t.varNames;
            s.exVars = t.exVars;
            auto apply = [&](const RuleAtom& a) {
                RuleAtom r;
                r.pred = a.pred;
                for (VarId v : a.args) r.args.push_back(f[v]);
                return r;
            };
            for (const auto& a : t.body)
                s.body.push_back(simplifyRuleAtom(apply(a), syms.preds, out.syms, out.predInfo));
            for (const auto& a : t.head)
                s.head.push_back(simplifyRuleAtom(apply(a), syms.preds, out.syms, out.predInfo));
            finalizeTgd(s);
            out.prog.tgds.push_back(std::move(s));
            out.ruleOrigin.emplace_back(ti, std::move(f));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Equivalence up to simplification: pairs an original chase atom with the
// simplified chase atoms that simulate it, and checks the partition and depth
// preservation properties.

struct EsReport {
    ChaseOutcome original;
    ChaseOutcome simplified;
    std::vector<std::vector<std::uint32_t>> classes;  // per original atom id
    bool partitionOk = false;
    bool depthsMatch = false;
    std::string diagnostic;
};

namespace detail {

class EsChecker {
public:
    EsChecker(const ChaseOutcome& orig, const ChaseOutcome& simp, const Program& origProg,
              const Program& simpProg, const SimplifyResult& sr)
        : orig_(orig), simp_(simp), origProg_(origProg), simpProg_(simpProg), sr_(sr) {}

    bool termEquiv(TermId t, TermId u) {
        if (isConstant(t) || isConstant(u)) return t == u;
        auto key = std::make_pair(t, u);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        bool eq = nullEquiv(t, u);
        memo_.emplace(key, eq);
        return eq;
    }

    bool atomEquiv(const Atom& alpha, const Atom& beta) {
        auto info = sr_.predInfo.find(beta.pred);
        if (info == sr_.predInfo.end()) return false;
        if (info->second.base != alpha.pred) return false;
        if (info->second.idTuple != idPattern(alpha.args)) return false;
        auto uniq = uniqueTerms(alpha.args);
        if (uniq.size() != beta.args.size()) return false;
        for (std::size_t i = 0; i < uniq.size(); ++i)
            if (!termEquiv(uniq[i], beta.args[i])) return false;
        return true;
    }

private:
    bool nullEquiv(TermId t, TermId u) {
        const NullKey& kt = orig_.syms.terms.nullKey(t);
        const NullKey& ku = simp_.syms.terms.nullKey(u);
        const auto& [origIdx, f] = sr_.ruleOrigin[ku.tgd];
        if (origIdx != kt.tgd) return false;
        if (ku.exVar != kt.exVar) return false;  // variable ids are shared namespaces

        const Tgd& ot = origProg_.tgds[kt.tgd];
        const Tgd& st = simpProg_.tgds[ku.tgd];

        // g(f(x)) = h(x) over the original frontier must be a function, and
        // g must agree with the simplified binding on the simplified frontier.
        std::unordered_map<VarId, TermId> g;
        for (std::size_t i = 0; i < ot.frontier.size(); ++i) {
            VarId y = f[ot.frontier[i]];
            TermId val = kt.frontier[i];
            auto it = g.find(y);
            if (it == g.end())
                g.emplace(y, val);
            else if (it->second != val)
                return false;
        }
        for (std::size_t i = 0; i < st.frontier.size(); ++i) {
            auto it = g.find(st.frontier[i]);
            if (it == g.end()) return false;
            if (!termEquiv(it->second, ku.frontier[i])) return false;
        }
        return true;
    }

    const ChaseOutcome& orig_;
    const ChaseOutcome& simp_;
    const Program& origProg_;
    const Program& simpProg_;
    const SimplifyResult& sr_;

    struct PairHash {
        std::size_t operator()(const std::pair<TermId, TermId>& p) const {
            return hashCombine(p.first, p.second);
        }
    };
    std::unordered_map<std::pair<TermId, TermId>, bool, PairHash> memo_;
};

}  // namespace detail

inline EsReport esPartition(const Symbols& syms, const Database& db, const Program& p,
                            const SimplifyOptions& sopts = {}, const ChaseOptions& copts = {}) {
    auto sr = simplifyProgram(syms, db, p, sopts);

    EsReport rep;
    rep.original = runChase(syms, db, p, copts);
    if (rep.original.status != ChaseStatus::Finished)
        throw BudgetError("es_partition: the original chase exceeded its cap");
    rep.simplified = runChase(sr.syms, sr.db, sr.prog, copts);
    if (rep.simplified.status != ChaseStatus::Finished)
        throw BudgetError("es_partition: the simplified chase exceeded its cap");

    detail::EsChecker eq(rep.original, rep.simplified, p, sr.prog, sr);
    rep.classes.resize(rep.original.instance.size());
    rep.partitionOk = true;
    rep.depthsMatch = true;

    for (std::uint32_t ai = 0; ai < rep.original.instance.size(); ++ai) {
        const Atom& alpha = rep.original.instance.atom(ai);
        for (std::uint32_t bi = 0; bi < rep.simplified.instance.size(); ++bi) {
            if (!eq.atomEquiv(alpha, rep.simplified.instance.atom(bi))) continue;
            rep.classes[ai].push_back(bi);
            if (atomDepth(alpha, rep.original.syms.terms) !=
                atomDepth(rep.simplified.instance.atom(bi), rep.simplified.syms.terms)) {
                rep.depthsMatch = false;
                rep.diagnostic = "depth mismatch between class " + std::to_string(ai) +
                                 " and member " + std::to_string(bi);
            }
        }
        if (rep.classes[ai].empty()) {
            rep.partitionOk = false;
            rep.diagnostic = "empty class for original atom " + std::to_string(ai);
        }
    }

    // Classes must be pairwise disjoint or identical, and cover the simplified
    // instance.
    std::vector<std::uint32_t> firstOwner(rep.simplified.instance.size(), kNoParent);
    for (std::uint32_t ai = 0; ai < rep.classes.size() && rep.partitionOk; ++ai) {
        for (std::uint32_t bi : rep.classes[ai]) {
            if (firstOwner[bi] == kNoParent) {
                firstOwner[bi] = ai;
            } else if (rep.classes[firstOwner[bi]] != rep.classes[ai]) {
                rep.partitionOk = false;
                rep.diagnostic = "classes " + std::to_string(firstOwner[bi]) + " and " +
                                 std::to_string(ai) + " overlap without being equal";
                break;
            }
        }
    }
    if (rep.partitionOk) {
        for (std::uint32_t bi = 0; bi < rep.simplified.instance.size(); ++bi) {
            if (firstOwner[bi] == kNoParent) {
                rep.partitionOk = false;
                rep.diagnostic = "simplified atom " + std::to_string(bi) + " is in no class";
                break;
            }
        }
    }
    return rep;
}

}  // namespace chasegate

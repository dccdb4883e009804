#pragma once

// Instance families with known chase behaviour: the lower-bound families for
// the three decidable classes, the linear-depth family, the fixed rule set
// simulating a Turing machine, and a seeded random generator for agreement
// corpora. Generators emit program text, so every output goes through the
// parser before anything consumes it.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chasegate/core.hpp"
#include "chasegate/textio.hpp"

namespace chasegate {

namespace detail {

inline std::string joinTerms(const std::vector<std::string>& ts, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) s += sep;
        s += ts[i];
    }
    return s;
}

inline std::string atomText(const std::string& pred, const std::vector<std::string>& args) {
    return pred + "(" + joinTerms(args, ",") + ")";
}

inline std::vector<std::string> numbered(const char* stem, std::uint32_t count) {
    std::vector<std::string> v;
    v.reserve(count);
    for (std::uint32_t i = 1; i <= count; ++i) v.push_back(stem + std::to_string(i));
    return v;
}

inline std::vector<std::string> repeated(const std::string& s, std::uint32_t count) {
    return std::vector<std::string>(count, s);
}

inline std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

struct ProgramText {
    std::string out;

    void fact(const std::string& pred, const std::vector<std::string>& args) {
        out += atomText(pred, args) + ".\n";
    }

    void rule(const std::vector<std::string>& body, const std::vector<std::string>& exVars,
              const std::vector<std::string>& head) {
        out += joinTerms(body, ", ");
        out += " -> ";
        if (!exVars.empty()) out += "exists " + joinTerms(exVars, ", ") + ": ";
        out += joinTerms(head, ", ") + ".\n";
    }
};

inline void requirePositive(std::uint32_t roots, std::uint32_t n, std::uint32_t m) {
    if (roots < 1 || n < 1 || m < 1) throw ProgramError("family parameters must be positive");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Simple-linear family: R0 roots seed an m-tuple of fresh values per level;
// swap/collapse rules close each seed under all tuples over its values, so
// level i holds exactly m^(i*m) R_i-tuples per root.

inline std::string genSlLower(std::uint32_t roots, std::uint32_t n, std::uint32_t m) {
    detail::requirePositive(roots, n, m);
    using detail::atomText;
    detail::ProgramText pt;
    for (std::uint32_t r = 1; r <= roots; ++r) pt.fact("R0", {"c" + std::to_string(r)});

    const auto X = detail::numbered("X", m);
    const auto Y = detail::numbered("Y", m);
    const auto Z = detail::numbered("Z", m);
    pt.rule({atomText("R0", {"X"})}, Y, {atomText("R0", {"X"}), atomText("R1", Y)});
    for (std::uint32_t i = 1; i <= n; ++i) {
        const std::string Ri = "R" + std::to_string(i);
        for (std::uint32_t j = 1; j <= m; ++j) {
            auto swapped = X;
            std::swap(swapped[0], swapped[j - 1]);
            pt.rule({atomText(Ri, X)}, {}, {atomText(Ri, swapped)});
            auto collapsed = X;
            collapsed[0] = X[j - 1];
            pt.rule({atomText(Ri, X)}, {}, {atomText(Ri, collapsed)});
        }
        if (i < n)
            pt.rule({atomText(Ri, X)}, Z,
                    {atomText(Ri, X), atomText("R" + std::to_string(i + 1), Z)});
    }
    return pt.out;
}

// ---------------------------------------------------------------------------
// Linear family: arity m+3 atoms carry an m-bit counter plus pinned zero/one
// values and a per-atom fresh tail. Each increment rule doubles the atoms, so
// a full binary tree of height 2^m-1 grows per level, and the all-ones leaves
// seed the next level.

inline std::string genLinearLower(std::uint32_t roots, std::uint32_t n, std::uint32_t m) {
    detail::requirePositive(roots, n, m);
    using detail::atomText;
    using detail::cat;
    using detail::repeated;
    detail::ProgramText pt;
    for (std::uint32_t r = 1; r <= roots; ++r) pt.fact("R0", {"c" + std::to_string(r)});

    pt.rule({atomText("R0", {"X"})}, {"Y", "Z"},
            {atomText("R0", {"X"}),
             atomText("R1", cat(repeated("Y", m), {"Y", "Z", "Y"}))});
    for (std::uint32_t i = 1; i <= n; ++i) {
        const std::string Ri = "R" + std::to_string(i);
        for (std::uint32_t j = 0; j < m; ++j) {
            const auto prefix = detail::numbered("X", m - j - 1);
            const auto body = cat(cat(cat(prefix, {"Y"}), repeated("Z", j)), {"Y", "Z", "U"});
            const auto flipped = cat(cat(cat(prefix, {"Z"}), repeated("Y", j)), {"Y", "Z"});
            pt.rule({atomText(Ri, body)}, {"V", "W"},
                    {atomText(Ri, body), atomText(Ri, cat(flipped, {"V"})),
                     atomText(Ri, cat(flipped, {"W"}))});
        }
        if (i < n) {
            const auto leaf = cat(repeated("X", m), {"Y", "X", "Z"});
            pt.rule({atomText(Ri, leaf)}, {"V", "W"},
                    {atomText(Ri, leaf),
                     atomText("R" + std::to_string(i + 1), cat(repeated("V", m), {"V", "W", "V"}))});
        }
    }
    return pt.out;
}

// ---------------------------------------------------------------------------
// Guarded family: each root grows 2^n strata of full binary trees of depth
// 2^(2^m)-1. Strata are counted by one bit per S_i predicate; tree depth by a
// 2^m-bit counter whose digits are addressed with m-bit ids carried on the
// Did/Succ edge relations. The zero/one constants ride along in every Node,
// Did, and Succ atom, which keeps the rules constant-free and lets guards pin
// the bit values wherever a rule must tell zero from one.
//
// Two notes on fidelity. The increment of the stratum counter is emitted for
// every digit i in [n]; restricting it to i >= 2 would leave the S_1 bit of
// new roots unset and stall the counter after 2^(n-1) strata. And the
// NonMaxDepth plus base depth-classification rules carry a Did guard; without
// it their zero/one variables would be unconstrained, every node would count
// as below maximal depth, and the trees would never stop growing.

inline std::string genGuardedLower(std::uint32_t roots, std::uint32_t n, std::uint32_t m,
                                   bool allowLarge = false) {
    detail::requirePositive(roots, n, m);
    if (!allowLarge && (n > 2 || m > 2))
        throw ProgramError("guarded family grows triple-exponentially; pass allowLarge past n,m = 2");
    using detail::atomText;
    using detail::cat;
    using detail::repeated;
    detail::ProgramText pt;
    for (std::uint32_t r = 1; r <= roots; ++r) {
        const std::string c = "c" + std::to_string(r);
        pt.fact("Node", {c, c, "zero", "one"});
    }

    const std::vector<std::string> node{"X", "Y", "Z", "O"};
    const auto W = detail::numbered("W", m);
    const auto V = detail::numbered("V", m);
    const auto allOnes = repeated("O", m);
    auto S = [](std::uint32_t i) { return "S" + std::to_string(i); };
    const std::string nodeAtom = atomText("Node", node);
    const std::string didAtom = atomText("Did", cat(node, W));
    const std::string succAtom = atomText("Succ", cat(cat(node, W), V));

    // Database self-loops mark the roots of the 0th stratum; the stratum
    // counter starts at zero.
    {
        std::vector<std::string> head{atomText("Root", {"X"})};
        for (std::uint32_t i = 1; i <= n; ++i) head.push_back(atomText(S(i), {"X", "Z"}));
        pt.rule({atomText("Node", {"X", "X", "Z", "O"})}, {}, head);
    }

    // Every edge carries all 2^m digit ids, grown from the zero id by flipping
    // one bit at a time, plus the successor relation over ids.
    pt.rule({nodeAtom}, {}, {atomText("Did", cat(node, repeated("Z", m)))});
    for (std::uint32_t i = 1; i <= m; ++i) {
        auto from = W;
        from[i - 1] = "Z";
        auto to = W;
        to[i - 1] = "O";
        pt.rule({atomText("Did", cat(node, from))}, {}, {atomText("Did", cat(node, to))});
    }
    for (std::uint32_t i = 1; i <= m; ++i) {
        std::vector<std::string> id(W.begin(), W.begin() + (i - 1));
        auto next = id;
        id.push_back("Z");
        next.push_back("O");
        for (std::uint32_t k = i; k < m; ++k) {
            id.push_back("O");
            next.push_back("Z");
        }
        pt.rule({atomText("Did", cat(node, id))}, {}, {atomText("Succ", cat(cat(node, id), next))});
    }

    // Roots sit at depth zero: every digit of their depth counter is zero.
    pt.rule({didAtom, atomText("Root", {"Y"})}, {}, {atomText("Depth", cat(cat({"Y"}, W), {"Z"}))});

    // Complements of "last stratum" and "maximal depth": some bit is zero.
    for (std::uint32_t i = 1; i <= n; ++i)
        pt.rule({nodeAtom, atomText(S(i), {"Y", "Z"})}, {}, {atomText("NonMaxStratum", {"Y"})});
    pt.rule({didAtom, atomText("Depth", cat(cat({"Y"}, W), {"Z"}))}, {},
            {atomText("NonMaxDepth", {"Y"})});

    // Two children below every node that has not reached maximal depth; they
    // stay in their parent's stratum.
    pt.rule({nodeAtom, atomText("NonMaxDepth", {"Y"})}, {"V", "W"},
            {atomText("Node", {"Y", "V", "Z", "O"}), atomText("NonRoot", {"V"}),
             atomText("Node", {"Y", "W", "Z", "O"}), atomText("NonRoot", {"W"})});
    for (std::uint32_t i = 1; i <= n; ++i) {
        pt.rule({nodeAtom, atomText("NonRoot", {"Y"}), atomText(S(i), {"X", "Z"})}, {},
                {atomText(S(i), {"Y", "Z"})});
        pt.rule({nodeAtom, atomText("NonRoot", {"Y"}), atomText(S(i), {"X", "O"})}, {},
                {atomText(S(i), {"Y", "O"})});
    }

    // Depth digits classify as pivot (rightmost zero), change (right of the
    // pivot), or copy (left of it), walking successor edges from the last id.
    const std::string didOnes = atomText("Did", cat(node, allOnes));
    pt.rule({didOnes, atomText("Depth", cat(cat({"Y"}, allOnes), {"Z"}))}, {},
            {atomText("DPivot", cat({"Y"}, allOnes))});
    pt.rule({didOnes, atomText("Depth", cat(cat({"Y"}, allOnes), {"O"}))}, {},
            {atomText("DChange", cat({"Y"}, allOnes))});
    pt.rule({succAtom, atomText("DChange", cat({"Y"}, V)),
             atomText("Depth", cat(cat({"Y"}, W), {"Z"}))},
            {}, {atomText("DPivot", cat({"Y"}, W))});
    pt.rule({succAtom, atomText("DChange", cat({"Y"}, V)),
             atomText("Depth", cat(cat({"Y"}, W), {"O"}))},
            {}, {atomText("DChange", cat({"Y"}, W))});
    pt.rule({succAtom, atomText("DPivot", cat({"Y"}, V))}, {}, {atomText("DCopy", cat({"Y"}, W))});
    pt.rule({succAtom, atomText("DCopy", cat({"Y"}, V))}, {}, {atomText("DCopy", cat({"Y"}, W))});

    // A child's depth is its parent's depth plus one.
    pt.rule({didAtom, atomText("NonRoot", {"Y"}), atomText("DChange", cat({"X"}, W))}, {},
            {atomText("Depth", cat(cat({"Y"}, W), {"Z"}))});
    pt.rule({didAtom, atomText("NonRoot", {"Y"}), atomText("DPivot", cat({"X"}, W))}, {},
            {atomText("Depth", cat(cat({"Y"}, W), {"O"}))});
    pt.rule({didAtom, atomText("NonRoot", {"Y"}), atomText("DCopy", cat({"X"}, W)),
             atomText("Depth", cat(cat({"X"}, W), {"Z"}))},
            {}, {atomText("Depth", cat(cat({"Y"}, W), {"Z"}))});
    pt.rule({didAtom, atomText("NonRoot", {"Y"}), atomText("DCopy", cat({"X"}, W)),
             atomText("Depth", cat(cat({"X"}, W), {"O"}))},
            {}, {atomText("Depth", cat(cat({"Y"}, W), {"O"}))});

    // One next-stratum root below every node of a non-maximal stratum.
    pt.rule({nodeAtom, atomText("NonMaxStratum", {"Y"})}, {"W"},
            {atomText("Node", {"Y", "W", "Z", "O"}), atomText("NewRoot", {"W"})});
    pt.rule({atomText("NewRoot", {"X"})}, {}, {atomText("Root", {"X"})});

    // Stratum digits classify the same way, one predicate per digit.
    auto SPivot = [](std::uint32_t i) { return "SPivot" + std::to_string(i); };
    auto SChange = [](std::uint32_t i) { return "SChange" + std::to_string(i); };
    auto SCopy = [](std::uint32_t i) { return "SCopy" + std::to_string(i); };
    pt.rule({nodeAtom, atomText(S(n), {"Y", "Z"})}, {}, {atomText(SPivot(n), {"Y"})});
    pt.rule({nodeAtom, atomText(S(n), {"Y", "O"})}, {}, {atomText(SChange(n), {"Y"})});
    for (std::uint32_t i = 2; i <= n; ++i) {
        pt.rule({nodeAtom, atomText(SChange(i), {"Y"}), atomText(S(i - 1), {"Y", "Z"})}, {},
                {atomText(SPivot(i - 1), {"Y"})});
        pt.rule({nodeAtom, atomText(SChange(i), {"Y"}), atomText(S(i - 1), {"Y", "O"})}, {},
                {atomText(SChange(i - 1), {"Y"})});
        pt.rule({nodeAtom, atomText(SPivot(i), {"Y"})}, {}, {atomText(SCopy(i - 1), {"Y"})});
        pt.rule({nodeAtom, atomText(SCopy(i), {"Y"})}, {}, {atomText(SCopy(i - 1), {"Y"})});
    }

    // A new root's stratum is its parent's stratum plus one.
    for (std::uint32_t i = 1; i <= n; ++i) {
        pt.rule({nodeAtom, atomText("NewRoot", {"Y"}), atomText(SChange(i), {"X"})}, {},
                {atomText(S(i), {"Y", "Z"})});
        pt.rule({nodeAtom, atomText("NewRoot", {"Y"}), atomText(SPivot(i), {"X"})}, {},
                {atomText(S(i), {"Y", "O"})});
        pt.rule({nodeAtom, atomText("NewRoot", {"Y"}), atomText(SCopy(i), {"X"}),
                 atomText(S(i), {"X", "Z"})},
                {}, {atomText(S(i), {"Y", "Z"})});
        pt.rule({nodeAtom, atomText("NewRoot", {"Y"}), atomText(SCopy(i), {"X"}),
                 atomText(S(i), {"X", "O"})},
                {}, {atomText(S(i), {"Y", "O"})});
    }
    return pt.out;
}

// ---------------------------------------------------------------------------
// Depth family: a P-token walks an R-chain of n constants, nesting one null
// per hop, so the chase finishes at depth exactly n-1.

inline std::string genDepthFamily(std::uint32_t n) {
    if (n < 2) throw ProgramError("the depth family starts at n = 2");
    detail::ProgramText pt;
    pt.fact("P", {"a1", "b", "b"});
    for (std::uint32_t i = 1; i < n; ++i)
        pt.fact("R", {"a" + std::to_string(i), "a" + std::to_string(i + 1)});
    pt.rule({"R(X,Y)", "P(X,Z,V)"}, {"W"}, {"P(Y,W,Z)"});
    return pt.out;
}

// ---------------------------------------------------------------------------
// Turing machine encoding. The rule set is fixed and constant-free; only the
// database depends on the machine. Rows of Tape/Head atoms encode successive
// configurations, linked by L/R columns left and right of the head, and the
// chase is finite exactly when the machine halts on the empty input. The
// machine must never move onto the begin marker; that is not checked here.

struct TmTransition {
    std::string state;
    std::string read;
    std::string next;
    std::string write;
    char move = 'S';  // 'L', 'S', or 'R'
};

struct TmSpec {
    std::vector<std::string> states;
    std::vector<std::string> symbols;  // full tape alphabet, markers included
    std::string init;
    std::vector<TmTransition> transitions;
};

namespace detail {

inline bool tmName(const std::string& s) {
    if (s.empty() || std::islower(static_cast<unsigned char>(s[0])) == 0) return false;
    for (char c : s)
        if (std::islower(static_cast<unsigned char>(c)) == 0 &&
            std::isdigit(static_cast<unsigned char>(c)) == 0 && c != '_')
            return false;
    return true;
}

inline const std::set<std::string>& tmReservedNames() {
    static const std::set<std::string> names{"left", "stay", "right", "c0", "c1", "c2", "c3"};
    return names;
}

inline void checkTmDeterminism(const TmSpec& spec) {
    std::set<std::pair<std::string, std::string>> keys;
    for (const auto& t : spec.transitions)
        if (!keys.insert({t.state, t.read}).second)
            throw ProgramError("nondeterministic: two transitions for (" + t.state + ", " +
                               t.read + ")");
}

}  // namespace detail

// Line-oriented spec: 'states s...', 'alphabet a...' (lend, rend, and blank
// are implicit), 'init s', 'trans state read next write L|S|R'. '#' comments.
// Names are [a-z][a-z0-9_]* and must avoid the encoding's own constants.
inline TmSpec parseTmSpec(std::string_view text) {
    TmSpec spec;
    spec.symbols = {"lend", "rend", "blank"};
    std::set<std::string> states;
    std::set<std::string> symbols(spec.symbols.begin(), spec.symbols.end());
    std::uint32_t lineNo = 0;
    auto fail = [&](const std::string& msg) -> void { throw ParseError(lineNo, 1, msg); };
    auto checkName = [&](const std::string& s) {
        if (!detail::tmName(s)) fail("name '" + s + "' must match [a-z][a-z0-9_]*");
        if (detail::tmReservedNames().count(s)) fail("name '" + s + "' is reserved by the encoding");
    };

    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++lineNo;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> tok{std::istream_iterator<std::string>(ls),
                                     std::istream_iterator<std::string>()};
        if (tok.empty()) continue;
        if (tok[0] == "states") {
            if (tok.size() < 2) fail("states needs at least one name");
            for (std::size_t i = 1; i < tok.size(); ++i) {
                checkName(tok[i]);
                if (symbols.count(tok[i])) fail("state '" + tok[i] + "' is already a tape symbol");
                if (states.insert(tok[i]).second) spec.states.push_back(tok[i]);
            }
        } else if (tok[0] == "alphabet") {
            for (std::size_t i = 1; i < tok.size(); ++i) {
                checkName(tok[i]);
                if (states.count(tok[i])) fail("symbol '" + tok[i] + "' is already a state");
                if (symbols.insert(tok[i]).second) spec.symbols.push_back(tok[i]);
            }
        } else if (tok[0] == "init") {
            if (tok.size() != 2) fail("init needs exactly one state");
            spec.init = tok[1];
        } else if (tok[0] == "trans") {
            if (tok.size() != 6) fail("trans needs: state read next write move");
            if (tok[5] != "L" && tok[5] != "S" && tok[5] != "R") fail("move must be L, S, or R");
            spec.transitions.push_back({tok[1], tok[2], tok[3], tok[4], tok[5][0]});
        } else {
            fail("unknown directive '" + tok[0] + "'");
        }
    }

    if (spec.init.empty()) throw ProgramError("tm spec declares no initial state");
    if (!states.count(spec.init))
        throw ProgramError("initial state '" + spec.init + "' is not declared");
    for (const auto& t : spec.transitions) {
        if (!states.count(t.state)) throw ProgramError("undeclared state '" + t.state + "'");
        if (!states.count(t.next)) throw ProgramError("undeclared state '" + t.next + "'");
        if (!symbols.count(t.read)) throw ProgramError("undeclared symbol '" + t.read + "'");
        if (!symbols.count(t.write)) throw ProgramError("undeclared symbol '" + t.write + "'");
    }
    detail::checkTmDeterminism(spec);
    return spec;
}

inline std::string genTm(const TmSpec& spec) {
    detail::checkTmDeterminism(spec);
    auto dirConst = [](char move) -> std::string {
        switch (move) {
            case 'L': return "left";
            case 'S': return "stay";
            case 'R': return "right";
            default: throw ProgramError("move must be L, S, or R");
        }
    };

    detail::ProgramText pt;
    for (const auto& t : spec.transitions)
        pt.fact("Trans", {t.state, t.read, t.next, t.write, dirConst(t.move)});
    pt.fact("Tape", {"c0", "lend", "c1"});
    pt.fact("Tape", {"c1", "blank", "c2"});
    pt.fact("Head", {"c1", spec.init, "c2"});
    pt.fact("Tape", {"c2", "rend", "c3"});
    pt.fact("LDir", {"left"});
    pt.fact("SDir", {"stay"});
    pt.fact("RDir", {"right"});
    pt.fact("Blank", {"blank"});
    pt.fact("End", {"rend"});
    for (const auto& s : spec.symbols)
        if (s != "lend" && s != "rend") pt.fact("NormSymb", {s});

    // Right move into a regular cell, and right move that extends the tape
    // with a blank when the head sits before the end marker.
    pt.rule({"Trans(X1,X2,X3,X4,X5)", "RDir(X5)", "NormSymb(W)", "Head(X,X1,Y)", "Tape(X,X2,Y)",
             "Tape(Y,W,Z)"},
            {"XP", "YP", "ZP"},
            {"L(X,XP)", "R(Y,YP)", "R(Z,ZP)", "Tape(XP,X4,YP)", "Head(YP,X3,ZP)",
             "Tape(YP,W,ZP)"});
    pt.rule({"Trans(X1,X2,X3,X4,X5)", "RDir(X5)", "Blank(U)", "End(W)", "Head(X,X1,Y)",
             "Tape(X,X2,Y)", "Tape(Y,W,Z)"},
            {"XP", "YP", "ZP", "WP"},
            {"L(X,XP)", "R(Y,YP)", "R(Z,ZP)", "Tape(XP,X4,YP)", "Head(YP,X3,ZP)", "Tape(YP,U,ZP)",
             "Tape(ZP,W,WP)"});
    // Left move and stay.
    pt.rule({"Trans(X1,X2,X3,X4,X5)", "LDir(X5)", "Tape(X,W,Y)", "Head(Y,X1,Z)", "Tape(Y,X2,Z)"},
            {"XP", "YP", "ZP"},
            {"R(X,XP)", "R(Y,YP)", "L(Z,ZP)", "Head(XP,X3,YP)", "Tape(XP,W,YP)",
             "Tape(YP,X4,ZP)"});
    pt.rule({"Trans(X1,X2,X3,X4,X5)", "SDir(X5)", "Head(X,X1,Y)", "Tape(X,X2,Y)"}, {"XP", "YP"},
            {"L(X,XP)", "R(Y,YP)", "Head(XP,X3,YP)", "Tape(XP,X4,YP)"});
    // Copy untouched cells into the next row, left and right of the head.
    pt.rule({"Tape(X,Z,Y)", "L(Y,YP)"}, {"XP"}, {"L(X,XP)", "Tape(XP,Z,YP)"});
    pt.rule({"Tape(X,Z,Y)", "R(X,XP)"}, {"YP"}, {"Tape(XP,Z,YP)", "R(Y,YP)"});
    return pt.out;
}

// ---------------------------------------------------------------------------
// Seeded random instances for the agreement corpora. Class-conformant by
// construction (the class is an upper bound: a guarded draw may come out
// linear). Half of all seeds order predicate positions by level and orient
// every special edge strictly upward, which rules out special cycles and
// makes the instance weakly acyclic regardless of the database.

struct RandomParams {
    TgdClass cls = TgdClass::SimpleLinear;
    std::uint32_t preds = 3;
    std::uint32_t maxArity = 2;
    std::uint32_t tgds = 3;
    std::uint32_t facts = 4;
};

struct RandomInstance {
    std::string text;
    bool acyclic = false;
};

inline RandomInstance genRandom(const RandomParams& params, std::uint64_t seed) {
    if (params.cls == TgdClass::General)
        throw ProgramError("random generation covers the three decidable classes");
    if (params.preds < 1 || params.maxArity < 1)
        throw ProgramError("random generation needs a predicate and positive arity");

    std::mt19937_64 rng(seed);
    auto pick = [&rng](std::uint32_t n) { return static_cast<std::uint32_t>(rng() % n); };

    RandomInstance out;
    out.acyclic = (rng() & 1) != 0;

    std::vector<std::uint32_t> arity(params.preds);
    std::vector<std::vector<std::uint32_t>> level(params.preds);
    for (std::uint32_t i = 0; i < params.preds; ++i) {
        arity[i] = 1 + pick(params.maxArity);
        level[i].resize(arity[i]);
        for (auto& l : level[i]) l = pick(4);
    }
    auto pred = [](std::uint32_t i) { return "P" + std::to_string(i + 1); };

    detail::ProgramText pt;
    const std::uint32_t pool =
        std::max<std::uint32_t>(2, std::min<std::uint32_t>(6, params.facts));
    for (std::uint32_t f = 0; f < params.facts; ++f) {
        const std::uint32_t i = pick(params.preds);
        std::vector<std::string> args;
        for (std::uint32_t q = 0; q < arity[i]; ++q)
            args.push_back("c" + std::to_string(1 + pick(pool)));
        pt.fact(pred(i), args);
    }

    struct BodyAtom {
        std::uint32_t pred = 0;
        std::vector<std::uint32_t> vars;
    };

    for (std::uint32_t t = 0; t < params.tgds; ++t) {
        bool emitted = false;
        for (std::uint32_t attempt = 0; attempt < 200 && !emitted; ++attempt) {
            std::vector<BodyAtom> body;
            std::uint32_t varCount = 0;
            auto freshOrReuse = [&](bool allowReuse) {
                if (allowReuse && varCount > 0 && pick(3) == 0) return pick(varCount);
                return varCount++;
            };
            {
                BodyAtom guard;
                guard.pred = pick(params.preds);
                const bool repeats = params.cls != TgdClass::SimpleLinear;
                for (std::uint32_t q = 0; q < arity[guard.pred]; ++q)
                    guard.vars.push_back(freshOrReuse(repeats && q > 0));
                body.push_back(std::move(guard));
            }
            if (params.cls == TgdClass::Guarded) {
                const std::uint32_t sides = pick(3);
                for (std::uint32_t s = 0; s < sides; ++s) {
                    BodyAtom side;
                    side.pred = pick(params.preds);
                    for (std::uint32_t q = 0; q < arity[side.pred]; ++q)
                        side.vars.push_back(pick(varCount));
                    body.push_back(std::move(side));
                }
            }

            std::vector<std::uint32_t> varLevel(varCount, 0);
            std::uint32_t maxBodyLevel = 0;
            for (const auto& a : body)
                for (std::uint32_t q = 0; q < a.vars.size(); ++q) {
                    varLevel[a.vars[q]] = std::max(varLevel[a.vars[q]], level[a.pred][q]);
                    maxBodyLevel = std::max(maxBodyLevel, level[a.pred][q]);
                }

            struct HeadAtom {
                std::uint32_t pred = 0;
                std::vector<std::string> args;
            };
            std::vector<HeadAtom> head;
            std::vector<std::string> exVars;
            bool stuck = false;
            const std::uint32_t headCount = 1 + pick(2);
            for (std::uint32_t h = 0; h < headCount && !stuck; ++h) {
                HeadAtom ha;
                ha.pred = pick(params.preds);
                for (std::uint32_t q = 0; q < arity[ha.pred] && !stuck; ++q) {
                    const bool exAllowed = !out.acyclic || level[ha.pred][q] > maxBodyLevel;
                    std::vector<std::uint32_t> allowed;
                    for (std::uint32_t v = 0; v < varCount; ++v)
                        if (!out.acyclic || level[ha.pred][q] >= varLevel[v]) allowed.push_back(v);
                    if (exAllowed && (pick(3) == 0 || allowed.empty())) {
                        exVars.push_back("Z" + std::to_string(exVars.size() + 1));
                        ha.args.push_back(exVars.back());
                    } else if (!allowed.empty()) {
                        ha.args.push_back("X" + std::to_string(allowed[pick(
                                                    static_cast<std::uint32_t>(allowed.size()))] +
                                                1));
                    } else {
                        stuck = true;
                    }
                }
                if (!stuck) head.push_back(std::move(ha));
            }
            if (stuck) continue;

            std::vector<std::string> bodyText;
            for (const auto& a : body) {
                std::vector<std::string> args;
                for (auto v : a.vars) args.push_back("X" + std::to_string(v + 1));
                bodyText.push_back(detail::atomText(pred(a.pred), args));
            }
            std::vector<std::string> headText;
            for (const auto& a : head) headText.push_back(detail::atomText(pred(a.pred), a.args));
            pt.rule(bodyText, exVars, headText);
            emitted = true;
        }
        if (!emitted) {
            // Identity rule: level-safe in every mode and never active.
            const std::uint32_t i = pick(params.preds);
            const auto args = detail::numbered("X", arity[i]);
            pt.rule({detail::atomText(pred(i), args)}, {}, {detail::atomText(pred(i), args)});
        }
    }
    out.text = pt.out;
    return out;
}

}  // namespace chasegate

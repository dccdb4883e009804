#include <gtest/gtest.h>

#include "chasegate/core.hpp"
#include "chasegate/textio.hpp"

using namespace chasegate;

namespace {

std::string roundTrip(const std::string& text) { return renderProgram(parseProgram(text)); }

}  // namespace

// Facts

TEST(Parse, SingleFact) {
    auto sp = parseProgram("R(a,b).");
    ASSERT_EQ(sp.db.size(), 1u);
    EXPECT_TRUE(sp.prog.tgds.empty());
    const auto& f = sp.db.facts()[0];
    EXPECT_EQ(sp.syms.preds.name(f.pred), "R");
    EXPECT_EQ(sp.syms.preds.arity(f.pred), 2u);
    EXPECT_EQ(sp.syms.terms.constantName(f.args[0]), "a");
    EXPECT_EQ(sp.syms.terms.constantName(f.args[1]), "b");
}

TEST(Parse, ConstantFormsAndDuplicates) {
    auto sp = parseProgram(
        "P(a, 42, 'Mixed Case!').\n"
        "P(a,42,'Mixed Case!').  % duplicate\n"
        "P(b, 42, 'Mixed Case!').\n");
    EXPECT_EQ(sp.db.size(), 2u);
    const auto& f = sp.db.facts()[0];
    EXPECT_EQ(sp.syms.terms.constantName(f.args[1]), "42");
    EXPECT_EQ(sp.syms.terms.constantName(f.args[2]), "Mixed Case!");
}

TEST(Parse, QuotedPredicates) {
    auto sp = parseProgram("\"R_{(1,1)}\"(a).\n\"[tau#3]\"(a,b).");
    ASSERT_EQ(sp.db.size(), 2u);
    EXPECT_EQ(sp.syms.preds.name(sp.db.facts()[0].pred), "R_{(1,1)}");
    EXPECT_EQ(sp.syms.preds.name(sp.db.facts()[1].pred), "[tau#3]");
}

// Rules

TEST(Parse, RuleWithExistential) {
    auto sp = parseProgram("R(X,Y) -> exists Z: R(Y,Z).");
    ASSERT_EQ(sp.prog.tgds.size(), 1u);
    const auto& t = sp.prog.tgds[0];
    ASSERT_EQ(t.frontier.size(), 1u);
    EXPECT_EQ(t.varNames[t.frontier[0]], "Y");
    ASSERT_EQ(t.exVars.size(), 1u);
    EXPECT_EQ(t.varNames[t.exVars[0]], "Z");
    EXPECT_EQ(classifyTgd(t), TgdClass::SimpleLinear);
}

TEST(Parse, RepeatedBodyVariableClassifiesLinear) {
    auto sp = parseProgram("R(X,X) -> exists Z: R(Z,X).");
    ASSERT_EQ(sp.prog.tgds.size(), 1u);
    EXPECT_EQ(classifyTgd(sp.prog.tgds[0]), TgdClass::Linear);
}

TEST(Parse, MultiAtomBodyAndHead) {
    auto sp = parseProgram(
        "P(X,Y,X,U,W), S(X,U) -> exists Z1, Z2: R(U,Y,X,Z1), T(Z1,Z2,X).");
    ASSERT_EQ(sp.prog.tgds.size(), 1u);
    const auto& t = sp.prog.tgds[0];
    EXPECT_EQ(t.body.size(), 2u);
    EXPECT_EQ(t.head.size(), 2u);
    EXPECT_EQ(t.exVars.size(), 2u);
    EXPECT_EQ(classifyTgd(t), TgdClass::Guarded);
}

TEST(Parse, NoQuantifierMeansAllHeadVariablesFrontier) {
    auto sp = parseProgram("R(X,Y) -> P(X).");
    EXPECT_EQ(sp.prog.tgds[0].exVars.size(), 0u);
    EXPECT_THROW(parseProgram("R(X,Y) -> P(Z)."), ParseError);
}

TEST(Parse, ExistsAsPredicateName) {
    auto sp = parseProgram("P(X) -> exists(X).");
    ASSERT_EQ(sp.prog.tgds.size(), 1u);
    EXPECT_EQ(sp.syms.preds.name(sp.prog.tgds[0].head[0].pred), "exists");
}

TEST(Parse, VariablesRenamedApartAcrossRules) {
    auto sp = parseProgram("R(X,Y) -> P(X).\nP(X) -> exists Y: R(X,Y).");
    ASSERT_EQ(sp.prog.tgds.size(), 2u);
    EXPECT_EQ(sp.prog.tgds[0].label, "r1");
    EXPECT_EQ(sp.prog.tgds[1].label, "r2");
    // Each rule has its own variable namespace.
    EXPECT_EQ(sp.prog.tgds[0].varNames.size(), 2u);
    EXPECT_EQ(sp.prog.tgds[1].varNames.size(), 2u);
}

// Errors

TEST(ParseErrors, PositionsAndMessages) {
    try {
        parseProgram("R(a,b).\nR(X) -> P(X).");
        FAIL() << "expected arity conflict";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line, 2u);
        EXPECT_EQ(e.col, 1u);
        EXPECT_NE(std::string(e.what()).find("arity"), std::string::npos);
    }
}

TEST(ParseErrors, RejectsMalformedInput) {
    EXPECT_THROW(parseProgram("R(a,X)."), ParseError);               // variable in fact
    EXPECT_THROW(parseProgram("R(X,a) -> P(X)."), ParseError);       // constant in rule
    EXPECT_THROW(parseProgram("R(a,b)"), ParseError);                // missing '.'
    EXPECT_THROW(parseProgram("R(a,.b)."), ParseError);              // stray token
    EXPECT_THROW(parseProgram("R(a,b), P(a)."), ParseError);         // fact list without '->'
    EXPECT_THROW(parseProgram("R(X,Y) - P(X)."), ParseError);        // broken arrow
    EXPECT_THROW(parseProgram("R('a)."), ParseError);                // unterminated quote
    EXPECT_THROW(parseProgram("R(X,Y) -> exists X: P(X,Y)."), ParseError);  // body var existential
    EXPECT_THROW(parseProgram("R(X,Y) -> exists W: P(X)."), ParseError);    // unused existential
    EXPECT_THROW(parseProgram("R() -> P(a)."), ParseError);          // empty argument list
}

// Rendering

TEST(Render, NormalizesWhitespaceAndComments) {
    auto sp = parseProgram("  % leading comment\n R( a ,b ).\n R(X,Y)->exists  Z :R(Y,Z).");
    EXPECT_EQ(renderProgram(sp), "R(a,b).\nR(X,Y) -> exists Z: R(Y,Z).\n");
}

TEST(Render, QuotesOnlyWhereRequired) {
    auto sp = parseProgram("\"R_{(1,1)}\"('Q', x7, 3).\n\"P\"(a).");
    EXPECT_EQ(renderProgram(sp), "\"R_{(1,1)}\"('Q',x7,3).\nP(a).\n");
}

TEST(Render, EmptyProgram) { EXPECT_EQ(renderProgram(parseProgram("  % nothing\n")), ""); }

TEST(Render, RoundTripIsStable) {
    const char* cases[] = {
        "R(a,b).",
        "R(a,b).\nR(X,Y) -> exists Z: R(Y,Z).",
        "R(X,X) -> exists Z: R(Z,X).",
        "P(X,Y,X,U,W), S(X,U) -> exists Z1,Z2: R(U,Y,X,Z1), T(Z1,Z2,X).",
        "\"R_{(1,2)}\"(a,b).\n\"R_{(1,2)}\"(X,Y) -> exists Z: \"R_{(1,2)}\"(Y,Z).",
        "A(x1).\nB(3,'a b').\nA(X) -> B(X,X).",
    };
    for (const char* text : cases) {
        auto once = roundTrip(text);
        EXPECT_EQ(roundTrip(once), once) << text;
    }
}

TEST(Render, NullsRenderOutsideTheGrammar) {
    Symbols s;
    auto a = s.terms.constant("a");
    auto n = s.terms.makeNull(NullKey{0, 0, {a}});
    auto r = s.preds.intern("R", 2);
    EXPECT_EQ(renderAtom(Atom{r, {a, n}}, s), "R(a,?n0)");
}

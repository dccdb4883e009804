#include "chasegate/termination.hpp"

#include <gtest/gtest.h>

#include <string>

#include "chasegate/chase.hpp"
#include "chasegate/depgraph.hpp"
#include "chasegate/textio.hpp"
#include "test_util.hpp"

using namespace chasegate;

namespace {

constexpr const char* kSlDivergent = "R(X,Y) -> exists Z: R(Y,Z).\nR(a,b).\n";

constexpr const char* kGuardedPair =
    "P(X,Y,X,U,W), S(X,U) -> exists Z1,Z2: R(U,Y,X,Z1), T(Z1,Z2,X).\n"
    "R(X,X,Y,Z) -> Q(X,Z).\n";

TEST(Bounds, SimpleLinearFormulas) {
    auto sp = parseProgram("R(X,Y) -> exists Z: R(Y,Z).");
    auto b = bounds(sp.prog, sp.syms.preds, TgdClass::SimpleLinear);
    ASSERT_TRUE(b.d && b.f);
    EXPECT_EQ(*b.d, 2);
    EXPECT_EQ(*b.f, 50331648);  // 3 * 4^12
    EXPECT_EQ(b.dBits, 2);
}

TEST(Bounds, LinearAndGuardedFormulas) {
    auto sp = parseProgram("R(X,Y) -> exists Z: R(Y,Z).");
    auto l = bounds(sp.prog, sp.syms.preds, TgdClass::Linear);
    ASSERT_TRUE(l.d && l.f);
    EXPECT_EQ(*l.d, 8);  // 1 * 2^3
    EXPECT_EQ(*l.f, BigInt(9) * (BigInt(1) << 72));

    auto su = parseProgram("P(X) -> exists Z: P(Z).");
    auto g = bounds(su.prog, su.syms.preds, TgdClass::Guarded);
    ASSERT_TRUE(g.d && g.f);
    EXPECT_EQ(*g.d, 2);   // 1 * 1^3 * 2^1
    EXPECT_EQ(*g.f, 192); // 3 * 2^6
}

TEST(Bounds, EmptyProgramIsDepthZeroFactorOne) {
    auto sp = parseProgram("R(a).");
    auto b = bounds(sp.prog, sp.syms.preds, TgdClass::SimpleLinear);
    ASSERT_TRUE(b.d && b.f);
    EXPECT_EQ(*b.d, 0);
    EXPECT_EQ(*b.f, 1);
}

TEST(Bounds, GuardedValuesPastTheBitBudgetStayUnmaterialized) {
    Symbols syms;
    std::vector<std::string> vars{"X1", "X2", "X3", "X4", "X5", "X6", "X7", "X8"};
    Program p;
    p.tgds.push_back(testutil::tgd(syms, "r", {{"Q", vars}}, {{"Q", vars}}, {}));
    auto b = bounds(p, syms.preds, TgdClass::Guarded);
    EXPECT_FALSE(b.d.has_value());
    EXPECT_FALSE(b.f.has_value());
    // head 8^17 has 52 bits; the shift adds 8^8.
    EXPECT_EQ(b.dBits, BigInt(52) + 16777216);
    EXPECT_EQ(b.fBits, b.dBits);

    EXPECT_THROW(bounds(p, syms.preds, TgdClass::General), ProgramError);
}

TEST(ChaseDepthCap, StopsBeforeDeeperAtoms) {
    auto sp = parseProgram(kSlDivergent);
    ChaseOptions opts;
    opts.depthCap = 3;
    auto oc = runChase(sp.syms, sp.db, sp.prog, opts);
    EXPECT_EQ(oc.status, ChaseStatus::CapExceeded);
    EXPECT_EQ(oc.cap, CapKind::Depth);
    EXPECT_EQ(oc.instance.size(), 4u);
    EXPECT_EQ(oc.maxDepth, 3u);
}

TEST(Decide, SimpleLinearDivergenceWithWitness) {
    auto sp = parseProgram(kSlDivergent);
    auto v = decide(sp.syms, sp.db, sp.prog);
    EXPECT_EQ(v.answer, Answer::Diverges);
    EXPECT_EQ(v.method, Method::Characterization);
    EXPECT_EQ(v.cls, TgdClass::SimpleLinear);
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_NE(v.witnessText.find("special"), std::string::npos);
    ASSERT_TRUE(v.bounds && v.bounds->f);
    EXPECT_EQ(*v.bounds->f, 50331648);
}

TEST(Decide, SimpleLinearWithoutSpecialEdgesTerminates) {
    auto sp = parseProgram("R(X,Y) -> S(Y,X).\nR(a,b).\n");
    auto v = decide(sp.syms, sp.db, sp.prog);
    EXPECT_EQ(v.answer, Answer::Terminates);
    EXPECT_FALSE(v.witness.has_value());
}

TEST(Decide, LinearSeesThroughRepeatedVariables) {
    // Plain acyclicity of the rule set is violated, yet no diagonal atom ever
    // arises from R(a,b), so the chase is finite and the decider must agree.
    auto sp = parseProgram("R(X,X) -> exists Z: R(Z,X).\nR(a,b).\n");
    ASSERT_TRUE(findWaViolation(sp.syms, sp.db, sp.prog).has_value());
    ASSERT_EQ(runChase(sp.syms, sp.db, sp.prog).instance.size(), 1u);

    auto v = decide(sp.syms, sp.db, sp.prog);
    EXPECT_EQ(v.answer, Answer::Terminates);
    EXPECT_EQ(v.cls, TgdClass::Linear);
    EXPECT_EQ(v.method, Method::Characterization);

    auto diag = parseProgram("R(X,X) -> exists Z: R(Z,X).\nR(a,a).\n");
    ASSERT_EQ(runChase(diag.syms, diag.db, diag.prog).instance.size(), 2u);
    EXPECT_EQ(decide(diag.syms, diag.db, diag.prog).answer, Answer::Terminates);
}

TEST(Decide, LinearEqualitySensitivePair) {
    // The S hop keeps the frontier nonempty, so each diagonal atom mints a
    // fresh null and the chase from a diagonal fact never stops.
    constexpr const char* rules = "R(X,X) -> exists Z: S(X,Z).\nS(X,Z) -> R(Z,Z).\n";

    auto off = parseProgram(std::string(rules) + "R(a,b).\n");
    EXPECT_EQ(decide(off.syms, off.db, off.prog).answer, Answer::Terminates);
    EXPECT_EQ(runChase(off.syms, off.db, off.prog).status, ChaseStatus::Finished);

    auto on = parseProgram(std::string(rules) + "R(a,a).\n");
    auto v = decide(on.syms, on.db, on.prog);
    EXPECT_EQ(v.answer, Answer::Diverges);
    ASSERT_TRUE(v.witness.has_value());
    ChaseOptions cap;
    cap.maxAtoms = 100;
    EXPECT_EQ(runChase(on.syms, on.db, on.prog, cap).status, ChaseStatus::CapExceeded);
}

TEST(Decide, EmptyFrontierReusesItsNull) {
    // With no frontier the invented value is shared by every trigger, so the
    // chase closes after one step and the decider must agree.
    auto sp = parseProgram("R(X,X) -> exists Z: R(Z,Z).\nR(a,a).\n");
    auto oc = runChase(sp.syms, sp.db, sp.prog);
    ASSERT_EQ(oc.status, ChaseStatus::Finished);
    EXPECT_EQ(oc.instance.size(), 2u);
    EXPECT_EQ(decide(sp.syms, sp.db, sp.prog).answer, Answer::Terminates);
}

TEST(Decide, GuardedMatchesTheChase) {
    auto fin = parseProgram(std::string(kGuardedPair) + "P(a,b,a,c,d).\nS(a,c).\nR(a,a,b,c).\n");
    ASSERT_EQ(runChase(fin.syms, fin.db, fin.prog).status, ChaseStatus::Finished);
    auto v = decide(fin.syms, fin.db, fin.prog);
    EXPECT_EQ(v.answer, Answer::Terminates);
    EXPECT_EQ(v.cls, TgdClass::Guarded);
    EXPECT_EQ(v.method, Method::Characterization);

    auto div = parseProgram(
        "P(X), Q(X) -> exists Z: T(X,Z).\n"
        "T(X,Z), Q(X) -> exists W: T(Z,W), Q(Z).\n"
        "P(a).\nQ(a).\n");
    auto w = decide(div.syms, div.db, div.prog);
    EXPECT_EQ(w.answer, Answer::Diverges);
    EXPECT_TRUE(w.witness.has_value());
}

TEST(Decide, GeneralRulesAreASemiDecision) {
    auto fin = parseProgram(
        "R(X,Y), S(Y,Z) -> T(X,Z).\n"
        "T(X,Z) -> exists W: S(Z,W).\n"
        "R(a,b).\nS(b,c).\n");
    ASSERT_EQ(classify(fin.prog), TgdClass::General);
    auto v = decide(fin.syms, fin.db, fin.prog);
    EXPECT_EQ(v.answer, Answer::Terminates);
    EXPECT_EQ(v.method, Method::CappedChase);
    ASSERT_TRUE(v.stats.has_value());
    EXPECT_EQ(v.stats->atoms, 4u);
    EXPECT_FALSE(v.bounds.has_value());

    auto div = parseProgram(
        "R(X,Y), R(Y,Z) -> exists W: R(Z,W).\n"
        "R(a,b).\nR(b,c).\n");
    ASSERT_EQ(classify(div.prog), TgdClass::General);
    DecideOptions opts;
    opts.chase.maxAtoms = 100;
    auto w = decide(div.syms, div.db, div.prog, opts);
    EXPECT_EQ(w.answer, Answer::Unknown);
    EXPECT_EQ(w.method, Method::CappedChase);
}

TEST(DecideByBound, FinishedChaseProvesTermination) {
    auto sp = parseProgram("R(X) -> exists Z: P(X,Z).\nR(a).\n");
    DecideOptions opts;
    opts.ceiling = BigInt(1) << 70;
    auto v = decideByBound(sp.syms, sp.db, sp.prog, opts);
    EXPECT_EQ(v.answer, Answer::Terminates);
    EXPECT_EQ(v.method, Method::Bound);
    ASSERT_TRUE(v.stats.has_value());
    EXPECT_EQ(v.stats->atoms, 2u);
    EXPECT_EQ(v.stats->steps, 1u);
    ASSERT_TRUE(v.sizeBound.has_value());
    EXPECT_EQ(*v.sizeBound, BigInt(5) << 60);  // |D| * 5 * 8^20
    EXPECT_LE(BigInt(v.stats->atoms), *v.sizeBound);
    EXPECT_LE(BigInt(v.stats->maxDepth), *v.bounds->d);
}

TEST(DecideByBound, DepthPastTheBoundProvesDivergence) {
    auto sp = parseProgram(kSlDivergent);
    auto v = decideByBound(sp.syms, sp.db, sp.prog);  // |D|*f fits the default ceiling
    EXPECT_EQ(v.answer, Answer::Diverges);
    EXPECT_EQ(v.method, Method::Bound);
    ASSERT_TRUE(v.stats.has_value());
    EXPECT_EQ(v.stats->cap, CapKind::Depth);
    EXPECT_LE(v.stats->atoms, 10u);
}

TEST(DecideByBound, TriggerlessChaseTerminatesInZeroSteps) {
    auto sp = parseProgram("R(X,X) -> exists Z: R(Z,X).\nR(a,b).\n");
    DecideOptions opts;
    opts.ceiling = BigInt(1) << 80;  // |D|*f = 9*2^72 needs a raised ceiling
    auto v = decideByBound(sp.syms, sp.db, sp.prog, opts);
    EXPECT_EQ(v.answer, Answer::Terminates);
    EXPECT_EQ(v.stats->steps, 0u);
    EXPECT_EQ(v.stats->atoms, 1u);
}

TEST(DecideByBound, CeilingRefusalAndClassPrecondition) {
    auto sp = parseProgram(kSlDivergent);
    DecideOptions opts;
    opts.ceiling = 100;
    EXPECT_THROW(decideByBound(sp.syms, sp.db, sp.prog, opts), BudgetError);

    auto gen = parseProgram("R(X,Y), R(Y,Z) -> exists W: R(Z,W).\nR(a,b).\n");
    EXPECT_THROW(decideByBound(gen.syms, gen.db, gen.prog), ProgramError);
}

TEST(Decide, GuardedDegradesToTheBoundWhenTypesRunOut) {
    // P(X) -> exists Z: P(Z) has an empty frontier, so the single shared null
    // closes the chase: every route must say Terminates.
    auto sp = parseProgram("P(X) -> exists Z: P(Z).\nP(a).\n");
    DecideOptions opts;
    opts.cls = TgdClass::Guarded;
    opts.linearize.typeBudget = 0;
    auto v = decide(sp.syms, sp.db, sp.prog, opts);
    EXPECT_EQ(v.answer, Answer::Terminates);
    EXPECT_EQ(v.method, Method::Bound);
    EXPECT_NE(v.warning.find("budget"), std::string::npos);

    // Untouched budget: the characterization path reaches the same answer.
    DecideOptions plain;
    plain.cls = TgdClass::Guarded;
    auto w = decide(sp.syms, sp.db, sp.prog, plain);
    EXPECT_EQ(w.answer, Answer::Terminates);
    EXPECT_EQ(w.method, Method::Characterization);
    EXPECT_EQ(decideByBound(sp.syms, sp.db, sp.prog, plain).answer, Answer::Terminates);
}

TEST(Decide, DegradedBoundStillDetectsDivergence) {
    // Forcing the guarded route with no type budget falls back to the bound,
    // whose depth exit catches the diverging chain.
    auto sp = parseProgram(kSlDivergent);
    DecideOptions opts;
    opts.cls = TgdClass::Guarded;
    opts.linearize.typeBudget = 0;
    opts.ceiling = BigInt(1) << 4200;
    auto v = decide(sp.syms, sp.db, sp.prog, opts);
    EXPECT_EQ(v.answer, Answer::Diverges);
    EXPECT_EQ(v.method, Method::Bound);
    EXPECT_FALSE(v.warning.empty());
    ASSERT_TRUE(v.stats.has_value());
    EXPECT_EQ(v.stats->cap, CapKind::Depth);
}

TEST(Decide, RequestedClassMustContainTheProgram) {
    auto sp = parseProgram(kSlDivergent);
    DecideOptions asLinear;
    asLinear.cls = TgdClass::Linear;
    auto v = decide(sp.syms, sp.db, sp.prog, asLinear);
    EXPECT_EQ(v.answer, Answer::Diverges);
    EXPECT_EQ(v.cls, TgdClass::Linear);

    DecideOptions asGeneral;
    asGeneral.cls = TgdClass::General;
    asGeneral.chase.maxAtoms = 200;
    auto w = decide(sp.syms, sp.db, sp.prog, asGeneral);
    EXPECT_EQ(w.answer, Answer::Unknown);

    auto lin = parseProgram("R(X,X) -> exists Z: R(Z,X).\nR(a,b).\n");
    DecideOptions asSl;
    asSl.cls = TgdClass::SimpleLinear;
    EXPECT_THROW(decide(lin.syms, lin.db, lin.prog, asSl), ProgramError);
}

TEST(CrossValidate, SimpleLinearThreeWayAgreement) {
    auto div = parseProgram(kSlDivergent);
    auto r = crossValidate(div.syms, div.db, div.prog);
    EXPECT_EQ(r.characterization.answer, Answer::Diverges);
    EXPECT_EQ(r.bound.answer, Answer::Diverges);
    EXPECT_TRUE(r.ucqSaysDiverges);
    EXPECT_TRUE(r.agree);

    auto fin = parseProgram("R(X,Y) -> S(Y,X).\nR(a,b).\n");
    DecideOptions opts;
    opts.ceiling = BigInt(1) << 70;
    auto s = crossValidate(fin.syms, fin.db, fin.prog, opts);
    EXPECT_EQ(s.characterization.answer, Answer::Terminates);
    EXPECT_EQ(s.bound.answer, Answer::Terminates);
    EXPECT_FALSE(s.ucqSaysDiverges);
    EXPECT_TRUE(s.agree);
}

TEST(CrossValidate, LinearAgreementPerDatabase) {
    constexpr const char* rules = "R(X,X) -> exists Z: S(X,Z).\nS(X,Z) -> R(Z,Z).\n";
    DecideOptions opts;
    opts.ceiling = BigInt(1) << 300;

    auto off = parseProgram(std::string(rules) + "R(a,b).\n");
    auto r = crossValidate(off.syms, off.db, off.prog, opts);
    EXPECT_EQ(r.characterization.answer, Answer::Terminates);
    EXPECT_TRUE(r.agree);

    auto on = parseProgram(std::string(rules) + "R(a,a).\n");
    auto s = crossValidate(on.syms, on.db, on.prog, opts);
    EXPECT_EQ(s.characterization.answer, Answer::Diverges);
    EXPECT_EQ(s.bound.answer, Answer::Diverges);
    EXPECT_TRUE(s.ucqSaysDiverges);
    EXPECT_TRUE(s.agree);

    auto gen = parseProgram("R(X,Y), R(Y,Z) -> exists W: R(Z,W).\nR(a,b).\n");
    EXPECT_THROW(crossValidate(gen.syms, gen.db, gen.prog, opts), ProgramError);
}

}  // namespace

#include <gtest/gtest.h>

#include "chasegate/core.hpp"
#include "test_util.hpp"

using namespace chasegate;
using testutil::fact;
using testutil::tgd;

// Terms

TEST(Terms, ConstantsAreInterned) {
    TermTable t;
    auto a = t.constant("a");
    auto b = t.constant("b");
    EXPECT_NE(a, b);
    EXPECT_EQ(a, t.constant("a"));
    EXPECT_EQ(t.constantName(a), "a");
    EXPECT_TRUE(isConstant(a));
    EXPECT_EQ(t.depth(a), 0u);
    EXPECT_EQ(t.findConstant("b"), b);
    EXPECT_EQ(t.findConstant("c"), std::nullopt);
}

TEST(Terms, NullsAreInternedByProvenance) {
    TermTable t;
    auto a = t.constant("a");
    auto b = t.constant("b");
    auto n1 = t.makeNull(NullKey{0, 2, {a, b}});
    auto n2 = t.makeNull(NullKey{0, 2, {a, b}});
    auto n3 = t.makeNull(NullKey{0, 2, {b, a}});
    auto n4 = t.makeNull(NullKey{0, 3, {a, b}});
    auto n5 = t.makeNull(NullKey{1, 2, {a, b}});
    EXPECT_EQ(n1, n2);
    EXPECT_NE(n1, n3);
    EXPECT_NE(n1, n4);
    EXPECT_NE(n1, n5);
    EXPECT_TRUE(isNull(n1));
    EXPECT_EQ(t.nullCount(), 4u);
}

TEST(Terms, DepthCountsNestedNulls) {
    TermTable t;
    auto a = t.constant("a");
    auto n1 = t.makeNull(NullKey{0, 0, {a}});
    auto n2 = t.makeNull(NullKey{0, 0, {n1}});
    auto n3 = t.makeNull(NullKey{0, 0, {n2, a}});
    auto n4 = t.makeNull(NullKey{0, 0, {}});
    EXPECT_EQ(t.depth(n1), 1u);
    EXPECT_EQ(t.depth(n2), 2u);
    EXPECT_EQ(t.depth(n3), 3u);
    EXPECT_EQ(t.depth(n4), 1u);
}

// Predicates

TEST(Preds, ArityIsFixedAtFirstUse) {
    PredTable p;
    auto r = p.intern("R", 2);
    EXPECT_EQ(p.intern("R", 2), r);
    EXPECT_THROW(p.intern("R", 3), ProgramError);
    EXPECT_EQ(p.name(r), "R");
    EXPECT_EQ(p.arity(r), 2u);
}

// Instances

TEST(Instances, InsertDeduplicatesAndIndexesByPredicate) {
    Symbols s;
    Instance inst;
    auto f1 = fact(s, "R", {"a", "b"});
    auto f2 = fact(s, "R", {"b", "a"});
    auto f3 = fact(s, "P", {"a"});
    auto [id1, fresh1] = inst.insert(f1);
    auto [id2, fresh2] = inst.insert(f2);
    auto [id3, fresh3] = inst.insert(f3);
    auto [id4, fresh4] = inst.insert(f1);
    EXPECT_TRUE(fresh1 && fresh2 && fresh3);
    EXPECT_FALSE(fresh4);
    EXPECT_EQ(id1, id4);
    EXPECT_EQ(inst.size(), 3u);
    EXPECT_TRUE(inst.contains(f2));
    EXPECT_EQ(inst.byPred(f1.pred).size(), 2u);
    EXPECT_EQ(inst.byPred(f3.pred), std::vector<std::uint32_t>{id3});
    EXPECT_EQ(inst.atom(id2), f2);
    (void)id1;
    (void)id3;
}

TEST(Instances, DatabaseDeduplicates) {
    Symbols s;
    Database db;
    EXPECT_TRUE(db.add(fact(s, "R", {"a", "b"})));
    EXPECT_FALSE(db.add(fact(s, "R", {"a", "b"})));
    EXPECT_TRUE(db.add(fact(s, "R", {"a", "a"})));
    EXPECT_EQ(db.size(), 2u);
}

// Rule construction

TEST(Rules, FrontierIsBodyVarsOccurringInHead) {
    Symbols s;
    auto t = tgd(s, "r", {{"P", {"X", "Y", "Z"}}}, {{"Q", {"Y", "W"}}}, {"W"});
    ASSERT_EQ(t.frontier.size(), 1u);
    EXPECT_EQ(t.varNames[t.frontier[0]], "Y");
    EXPECT_TRUE(t.isEx[3]);
    EXPECT_FALSE(t.inBody[3]);
}

TEST(Rules, ValidationRejectsMalformedRules) {
    Symbols s;
    // Existential that also occurs in the body.
    EXPECT_THROW(tgd(s, "r1", {{"P", {"X"}}}, {{"Q", {"X"}}}, {"X"}), ProgramError);
    // Head variable that is neither frontier nor declared existential.
    EXPECT_THROW(tgd(s, "r2", {{"P", {"X"}}}, {{"Q", {"Y"}}}), ProgramError);
    // Existential declared but unused.
    EXPECT_THROW(tgd(s, "r3", {{"P", {"X"}}}, {{"Q", {"X"}}}, {"Z"}), ProgramError);
    // Well-formed control.
    EXPECT_NO_THROW(tgd(s, "r4", {{"P", {"X"}}}, {{"Q2", {"X", "Z"}}}, {"Z"}));
}

// Classification

TEST(Classify, SingleAtomBodyWithDistinctVarsIsSimpleLinear) {
    Symbols s;
    auto t = tgd(s, "r", {{"R", {"X", "Y"}}}, {{"R", {"Y", "Z"}}}, {"Z"});
    EXPECT_EQ(classifyTgd(t), TgdClass::SimpleLinear);
}

TEST(Classify, RepeatedBodyVariableIsLinear) {
    Symbols s;
    auto t = tgd(s, "r", {{"R", {"X", "X"}}}, {{"R", {"Z", "X"}}}, {"Z"});
    EXPECT_EQ(classifyTgd(t), TgdClass::Linear);
}

TEST(Classify, BodyAtomCoveringAllVarsIsGuarded) {
    Symbols s;
    auto t = tgd(s, "r", {{"P", {"X", "Y", "X", "U", "W"}}, {"S", {"X", "U"}}},
                 {{"R", {"U", "Y", "X", "Z1"}}, {"T", {"Z1", "Z2", "X"}}}, {"Z1", "Z2"});
    EXPECT_EQ(classifyTgd(t), TgdClass::Guarded);
    EXPECT_EQ(guardIndex(t), std::optional<std::size_t>{0});
}

TEST(Classify, NoCoveringAtomIsGeneral) {
    Symbols s;
    auto t = tgd(s, "r", {{"R", {"X", "Y"}}, {"P", {"X", "Z", "V"}}}, {{"P", {"Y", "W", "Z"}}},
                 {"W"});
    EXPECT_EQ(classifyTgd(t), TgdClass::General);
    EXPECT_EQ(guardIndex(t), std::nullopt);
}

TEST(Classify, ProgramClassIsTheLeastCommonClass) {
    Symbols s;
    Program p;
    p.tgds.push_back(tgd(s, "a", {{"R", {"X", "Y"}}}, {{"R", {"Y", "Z"}}}, {"Z"}));
    EXPECT_EQ(classify(p), TgdClass::SimpleLinear);
    p.tgds.push_back(tgd(s, "b", {{"R", {"X", "X"}}}, {{"P", {"X"}}}));
    EXPECT_EQ(classify(p), TgdClass::Linear);
    p.tgds.push_back(tgd(s, "c", {{"P", {"X"}}, {"R", {"X", "Y"}}}, {{"P", {"Y"}}}));
    EXPECT_EQ(classify(p), TgdClass::Guarded);
    p.tgds.push_back(
        tgd(s, "d", {{"R", {"X", "Y"}}, {"R", {"Y", "Z"}}, {"R", {"Z", "W"}}}, {{"R", {"X", "W"}}}));
    EXPECT_EQ(classify(p), TgdClass::General);
    EXPECT_EQ(classify(Program{}), TgdClass::SimpleLinear);
}

// Size metrics

TEST(Norms, CountsAtomsSchemaAndArity) {
    Symbols s;
    Program p;
    p.tgds.push_back(tgd(s, "r", {{"R", {"X", "Y"}}}, {{"R", {"Y", "Z"}}}, {"Z"}));
    auto n = norms(p, s.preds);
    EXPECT_EQ(n.atomCount, 2u);
    EXPECT_EQ(n.schemaSize, 1u);
    EXPECT_EQ(n.maxArity, 2u);
    EXPECT_EQ(n.value, 4u);
}

TEST(Norms, DeduplicatesAtomsWithinARule) {
    Symbols s;
    Program p;
    // Body P(X), head P(X) twice over: 3 distinct atoms, 2 predicates, arity 2.
    p.tgds.push_back(tgd(s, "r", {{"P", {"X"}}}, {{"P", {"X"}}, {"Q", {"X", "Z"}}}, {"Z"}));
    p.tgds.push_back(tgd(s, "q", {{"Q", {"X", "Y"}}}, {{"P", {"Y"}}}));
    auto n = norms(p, s.preds);
    EXPECT_EQ(n.atomCount, 4u);
    EXPECT_EQ(n.schemaSize, 2u);
    EXPECT_EQ(n.maxArity, 2u);
    EXPECT_EQ(n.value, 16u);
}

TEST(Norms, IgnoresDatabaseOnlyPredicates) {
    Symbols s;
    Program p;
    p.tgds.push_back(tgd(s, "r", {{"R", {"X", "Y"}}}, {{"R", {"Y", "Z"}}}, {"Z"}));
    s.preds.intern("Unused", 7);
    auto n = norms(p, s.preds);
    EXPECT_EQ(n.schemaSize, 1u);
    EXPECT_EQ(n.maxArity, 2u);
}

// Tuple shapes

TEST(Shapes, IdPatternNumbersFirstOccurrences) {
    std::vector<std::string> args{"x", "y", "x", "z", "y"};
    EXPECT_EQ(idPattern(args), (std::vector<std::uint32_t>{1, 2, 1, 3, 2}));
    EXPECT_EQ(uniquePositions(args), (std::vector<std::size_t>{0, 1, 3}));
    EXPECT_EQ(uniqueTerms(args), (std::vector<std::string>{"x", "y", "z"}));
}

TEST(Shapes, AllDistinctAndAllEqualTuples) {
    std::vector<int> distinct{5, 7, 9};
    EXPECT_EQ(idPattern(distinct), (std::vector<std::uint32_t>{1, 2, 3}));
    std::vector<int> equal{4, 4, 4};
    EXPECT_EQ(idPattern(equal), (std::vector<std::uint32_t>{1, 1, 1}));
    EXPECT_EQ(uniqueTerms(equal), std::vector<int>{4});
    EXPECT_EQ(idPattern(std::vector<int>{}), std::vector<std::uint32_t>{});
}

TEST(Shapes, AtomDepthIsMaxArgumentDepth) {
    Symbols s;
    auto a = s.terms.constant("a");
    auto n1 = s.terms.makeNull(NullKey{0, 0, {a}});
    auto n2 = s.terms.makeNull(NullKey{0, 0, {n1}});
    auto r = s.preds.intern("R", 2);
    EXPECT_EQ(atomDepth(Atom{r, {a, a}}, s.terms), 0u);
    EXPECT_EQ(atomDepth(Atom{r, {a, n2}}, s.terms), 2u);
    EXPECT_EQ(atomDepth(Atom{r, {n1, n2}}, s.terms), 2u);
}

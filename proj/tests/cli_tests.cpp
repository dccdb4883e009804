// End-to-end tests of the command-line binary: exit codes, output shapes,
// stdin plumbing, and byte-identical JSON reruns. Each invocation runs the
// real executable with streams redirected to files under the test tempdir.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

using Json = nlohmann::ordered_json;

struct RunResult {
    int exit = -1;
    std::string out;
    std::string err;
};

std::string tempPath(const std::string& stem) {
    static int counter = 0;
    return ::testing::TempDir() + "cli_" + std::to_string(++counter) + "_" + stem;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args, const std::string& stdinText = "") {
    const std::string outFile = tempPath("out");
    const std::string errFile = tempPath("err");
    std::string cmd = std::string(CHASEGATE_BIN) + " " + args;
    if (!stdinText.empty()) {
        const std::string inFile = tempPath("in");
        std::ofstream(inFile, std::ios::binary) << stdinText;
        cmd += " < " + inFile;
    }
    cmd += " > " + outFile + " 2> " + errFile;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(outFile);
    r.err = slurp(errFile);
    return r;
}

std::string sample(const char* name) { return std::string(CHASEGATE_SAMPLES) + "/" + name; }

TEST(CliExitCodes, DecideReportsDivergence) {
    const auto r = run("decide " + sample("sl_diverge.tgd"));
    EXPECT_EQ(r.exit, 1);
    EXPECT_NE(r.out.find("Diverges"), std::string::npos);
    EXPECT_NE(r.out.find("supported special cycle"), std::string::npos);
}

TEST(CliExitCodes, ChaseEmitsStatsJson) {
    const auto r = run("chase " + sample("linear_notrigger.tgd") + " --json");
    EXPECT_EQ(r.exit, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["version"], "1.0.0");
    EXPECT_EQ(j["verdict"], "Finished");
    EXPECT_EQ(j["class"], "Linear");
    EXPECT_EQ(j["stats"]["atoms"], 1);
}

TEST(CliExitCodes, UsageErrorsExitSixtyFour) {
    EXPECT_EQ(run("").exit, 64);
    EXPECT_EQ(run("chase --bogus x").exit, 64);
    EXPECT_EQ(run("gen").exit, 64);
}

TEST(CliExitCodes, BadInputExitsSixtyFive) {
    const auto vars = run("chase -", "R(X).\n");
    EXPECT_EQ(vars.exit, 65);
    EXPECT_NE(vars.err.find("variable 'X' in fact"), std::string::npos);
    EXPECT_EQ(run("chase /no/such/file.tgd").exit, 65);
    EXPECT_EQ(run("decide " + sample("guarded_pair.tgd") + " --class sl").exit, 65);
}

TEST(CliExitCodes, RefusedBudgetExitsSixtySix) {
    const auto r = run("decide " + sample("linear_notrigger.tgd") + " --method bound");
    EXPECT_EQ(r.exit, 66);
    EXPECT_NE(r.err.find("exceeds the ceiling"), std::string::npos);
}

TEST(CliExitCodes, HelpAndVersionExitZero) {
    EXPECT_EQ(run("--help").exit, 0);
    const auto v = run("--version");
    EXPECT_EQ(v.exit, 0);
    EXPECT_EQ(v.out, "1.0.0\n");
}

TEST(CliPipes, GeneratedDepthFamilyChasesToDepthThree) {
    const auto gen = run("gen depth --n 4");
    ASSERT_EQ(gen.exit, 0);
    const auto chase = run("chase -", gen.out);
    EXPECT_EQ(chase.exit, 0);
    EXPECT_NE(chase.out.find("maxdepth 3"), std::string::npos);
}

TEST(CliPipes, ParseRoundTripsItsOwnOutput) {
    const auto first = run("parse " + sample("sl_diverge.tgd"));
    ASSERT_EQ(first.exit, 0);
    const auto second = run("parse -", first.out);
    EXPECT_EQ(second.exit, 0);
    EXPECT_EQ(second.out, first.out);
}

TEST(CliPipes, LinearizedOutputStaysParseable) {
    const auto lin = run("linearize " + sample("guarded_pair.tgd"));
    ASSERT_EQ(lin.exit, 0);
    EXPECT_NE(lin.out.find("[tau#"), std::string::npos);
    const auto back = run("parse -", lin.out);
    EXPECT_EQ(back.exit, 0);
}

TEST(CliJson, RerunsAreByteIdentical) {
    const std::string args = "decide " + sample("sl_diverge.tgd") + " --json";
    const auto a = run(args);
    const auto b = run(args);
    EXPECT_EQ(a.exit, 1);
    EXPECT_EQ(a.out, b.out);
    const Json j = Json::parse(a.out);
    EXPECT_EQ(j["verdict"], "Diverges");
    EXPECT_EQ(j["bounds"]["d"], "2");
    EXPECT_EQ(j["bounds"]["f"], "50331648");
    ASSERT_TRUE(j["witness"].is_array());
    EXPECT_EQ(j["witness"].front(), j["witness"].back());
}

TEST(CliJson, ForestListsParentEdges) {
    const auto r = run("chase " + sample("guarded_pair.tgd") + " --json --emit-forest");
    EXPECT_EQ(r.exit, 0);
    const Json j = Json::parse(r.out);
    ASSERT_EQ(j["forest"]["atoms"].size(), 2u);
    EXPECT_EQ(j["forest"]["atoms"][0], "R(a,a,b,c)");
    EXPECT_EQ(j["forest"]["atoms"][1], "Q(a,c)");
    EXPECT_EQ(j["forest"]["edges"], Json::parse("[[0,1]]"));
}

TEST(CliJson, TypeSidecarDecodesGeneratedPredicates) {
    const std::string sidecar = tempPath("types.json");
    const auto r = run("linearize " + sample("guarded_pair.tgd") + " --types " + sidecar);
    ASSERT_EQ(r.exit, 0);
    const Json j = Json::parse(slurp(sidecar));
    bool found = false;
    for (const auto& [key, entry] : j.items()) {
        if (key.rfind("[tau#", 0) != 0) continue;
        if (entry["guard"] != "R(1,1,2,3)") continue;
        EXPECT_EQ(entry["side"], Json::parse("[\"Q(1,3)\"]"));
        found = true;
    }
    EXPECT_TRUE(found);
}

TEST(CliValidate, AgreementOnTheDivergentExample) {
    const auto r = run("validate " + sample("sl_diverge.tgd"));
    EXPECT_EQ(r.exit, 1);
    EXPECT_NE(r.out.find("agree: yes"), std::string::npos);
}

TEST(CliGen, SameSeedSameBytes) {
    const auto a = run("gen random --seed 7 --class l");
    const auto b = run("gen random --seed 7 --class l");
    EXPECT_EQ(a.exit, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.rfind("% class l, seed 7", 0), 0u);
}

TEST(CliUcq, SatisfiedQueryExitsOne) {
    const auto divergent = run("ucq " + sample("sl_diverge.tgd"));
    EXPECT_EQ(divergent.exit, 1);
    EXPECT_NE(divergent.out.find("R(X1,X2)"), std::string::npos);
    const auto safe = run("ucq " + sample("linear_notrigger.tgd"));
    EXPECT_EQ(safe.exit, 0);
    EXPECT_NE(safe.out.find("% satisfied: no"), std::string::npos);
}

}  // namespace

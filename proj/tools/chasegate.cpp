// Command-line front end over the chase library: parsing, chase runs,
// termination decisions, program transformations, instance generators, and
// three-way cross-validation.
//
// Exit codes: 0 Terminates/Finished, 1 Diverges, 2 Unknown/CapExceeded,
// 64 usage, 65 bad input, 66 refused resource budget, 70 cross-validation
// disagreement.

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chasegate/chase.hpp"
#include "chasegate/core.hpp"
#include "chasegate/depgraph.hpp"
#include "chasegate/generators.hpp"
#include "chasegate/jsonio.hpp"
#include "chasegate/linearize.hpp"
#include "chasegate/simplify.hpp"
#include "chasegate/termination.hpp"
#include "chasegate/textio.hpp"

using namespace chasegate;

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitInput = 65;
constexpr int kExitBudget = 66;
constexpr int kExitDisagree = 70;

std::string readInput(const std::string& path) {
    std::ostringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ProgramError("cannot open " + path);
        ss << in.rdbuf();
    }
    return ss.str();
}

void writeOut(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ProgramError("cannot open " + path + " for writing");
    out << text;
}

void writeJson(const std::string& path, const Json& body) {
    writeOut(path, versioned(body).dump(2) + "\n");
}

struct IoArgs {
    std::string file;
    std::string out;
    bool json = false;
};

void addIo(CLI::App* sub, IoArgs& a) {
    sub->add_option("file", a.file, "input program, - for stdin")->required();
    sub->add_option("--out", a.out, "write to a file instead of stdout");
    sub->add_flag("--json", a.json, "machine-readable output");
}

std::optional<TgdClass> classFromName(const std::string& s) {
    if (s == "auto") return std::nullopt;
    if (s == "sl") return TgdClass::SimpleLinear;
    if (s == "l") return TgdClass::Linear;
    if (s == "g") return TgdClass::Guarded;
    return TgdClass::General;
}

Strategy strategyFromName(const std::string& s) {
    if (s == "lifo") return Strategy::Lifo;
    if (s == "random") return Strategy::Random;
    return Strategy::Fifo;
}

BigInt parseDecimal(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw ProgramError(std::string(what) + " must be a decimal integer, got '" + s + "'");
    return BigInt(s);
}

std::string renderResult(const Database& db, const Program& prog, const Symbols& syms) {
    std::string text;
    for (const auto& f : db.facts()) text += renderFact(f, syms) + "\n";
    for (const auto& t : prog.tgds) text += renderRule(t, syms.preds) + "\n";
    return text;
}

Json programJson(TgdClass cls, std::size_t facts, std::size_t rules, std::string text) {
    Json j;
    j["class"] = toString(cls);
    j["facts"] = facts;
    j["rules"] = rules;
    j["text"] = std::move(text);
    return j;
}

std::string statsLine(const ChaseStats& s) {
    return "atoms " + std::to_string(s.atoms) + ", maxdepth " + std::to_string(s.maxDepth) +
           ", steps " + std::to_string(s.steps) + "\n";
}

std::string boundText(const char* name, const std::optional<BigInt>& v, const BigInt& bits) {
    if (v) return std::string(name) + " = " + v->str();
    return std::string(name) + " over the bit budget (bit length >= " + bits.str() + ")";
}

// --- subcommand bodies ------------------------------------------------------

int runParseCmd(const IoArgs& io) {
    const SourceProgram sp = parseProgram(readInput(io.file));
    const std::string text = renderProgram(sp);
    if (io.json)
        writeJson(io.out, programJson(classify(sp.prog), sp.db.size(), sp.prog.tgds.size(), text));
    else
        writeOut(io.out, text);
    return 0;
}

struct ChaseArgs {
    IoArgs io;
    std::size_t maxAtoms = 100000;
    std::size_t maxSteps = 0;
    std::uint32_t depthCap = 0;
    std::string strategy = "fifo";
    std::uint64_t seed = 0;
    bool emitForest = false;
};

int runChaseCmd(const ChaseArgs& a) {
    const SourceProgram sp = parseProgram(readInput(a.io.file));
    ChaseOptions opts;
    opts.maxAtoms = a.maxAtoms;
    opts.maxSteps = a.maxSteps;
    opts.depthCap = a.depthCap;
    opts.strategy = strategyFromName(a.strategy);
    opts.seed = a.seed;
    const ChaseOutcome oc = runChase(sp.syms, sp.db, sp.prog, opts);

    if (a.io.json) {
        Json j = toJson(oc, classify(sp.prog));
        if (a.emitForest) j["forest"] = forestJson(oc);
        writeJson(a.io.out, j);
    } else {
        std::string text =
            std::string(toString(oc.status)) + " [cap " + toString(oc.cap) + "]\n";
        text += statsLine(statsOf(oc));
        if (a.emitForest) {
            const auto& atoms = oc.instance.atoms();
            for (std::size_t id = 0; id < atoms.size(); ++id)
                text += "atom " + std::to_string(id) + ": " + renderAtom(atoms[id], oc.syms) + "\n";
            for (std::size_t id = 0; id < oc.parent.size(); ++id)
                if (oc.parent[id] != kNoParent)
                    text += "edge " + std::to_string(oc.parent[id]) + " -> " + std::to_string(id) +
                            "\n";
        }
        writeOut(a.io.out, text);
    }
    return oc.status == ChaseStatus::Finished ? 0 : 2;
}

struct DecideArgs {
    IoArgs io;
    std::string cls = "auto";
    std::string method = "characterization";
    std::string ceiling;
    std::size_t bitBudget = std::size_t{1} << 20;
    bool noDepthExit = false;
    std::size_t maxAtoms = 100000;
    std::size_t maxSteps = 0;
};

int runDecideCmd(const DecideArgs& a) {
    const SourceProgram sp = parseProgram(readInput(a.io.file));
    DecideOptions opts;
    opts.cls = classFromName(a.cls);
    opts.chase.maxAtoms = a.maxAtoms;
    opts.chase.maxSteps = a.maxSteps;
    opts.boundBitBudget = a.bitBudget;
    opts.depthExit = !a.noDepthExit;
    if (!a.ceiling.empty()) opts.ceiling = parseDecimal(a.ceiling, "--ceiling");

    const Verdict v = a.method == "bound" ? decideByBound(sp.syms, sp.db, sp.prog, opts)
                                          : decide(sp.syms, sp.db, sp.prog, opts);
    if (a.io.json) {
        writeJson(a.io.out, toJson(v));
    } else {
        std::string text = std::string(toString(v.answer)) + " [" + toString(v.cls) + ", " +
                           toString(v.method) + "]\n";
        if (v.witness) text += v.witnessText + "\n";
        if (v.stats) text += statsLine(*v.stats);
        if (v.bounds)
            text += boundText("d", v.bounds->d, v.bounds->dBits) + ", " +
                    boundText("f", v.bounds->f, v.bounds->fBits) + "\n";
        if (v.sizeBound) text += "size bound " + v.sizeBound->str() + "\n";
        if (!v.warning.empty()) text += "warning: " + v.warning + "\n";
        writeOut(a.io.out, text);
    }
    return exitCode(v.answer);
}

int runSimplifyCmd(const IoArgs& io) {
    const SourceProgram sp = parseProgram(readInput(io.file));
    const SimplifyResult sr = simplifyProgram(sp.syms, sp.db, sp.prog);
    const std::string text = renderResult(sr.db, sr.prog, sr.syms);
    if (io.json)
        writeJson(io.out, programJson(classify(sr.prog), sr.db.size(), sr.prog.tgds.size(), text));
    else
        writeOut(io.out, text);
    return 0;
}

struct LinearizeArgs {
    IoArgs io;
    bool fullTypeEnum = false;
    std::string typesPath;
    std::size_t typeBudget = 1000000;
};

int runLinearizeCmd(const LinearizeArgs& a) {
    const SourceProgram sp = parseProgram(readInput(a.io.file));
    LinearizeOptions opts;
    opts.fullTypeEnum = a.fullTypeEnum;
    opts.typeBudget = a.typeBudget;
    const LinearizeResult lr = linearizeProgram(sp.syms, sp.db, sp.prog, opts);
    std::string text = renderResult(lr.db, lr.prog, lr.syms);
    const Json types = typesJson(lr.types, lr.syms.preds);
    if (!a.typesPath.empty()) writeJson(a.typesPath, types);

    if (a.io.json) {
        Json j = programJson(classify(lr.prog), lr.db.size(), lr.prog.tgds.size(), text);
        j["types"] = types;
        writeJson(a.io.out, j);
    } else {
        if (a.typesPath.empty() && !types.empty()) {
            text += "% types:\n";
            for (auto it = types.begin(); it != types.end(); ++it) {
                text += "%   " + it.key() + " = guard " + it.value()["guard"].get<std::string>();
                for (const auto& s : it.value()["side"])
                    text += ", side " + s.get<std::string>();
                text += "\n";
            }
        }
        writeOut(a.io.out, text);
    }
    return 0;
}

int runUcqCmd(const IoArgs& io) {
    const SourceProgram sp = parseProgram(readInput(io.file));
    const TgdClass cls = classify(sp.prog);
    UcqVariant variant;
    if (cls == TgdClass::SimpleLinear)
        variant = UcqVariant::SL;
    else if (cls == TgdClass::Linear)
        variant = UcqVariant::LinearSimplified;
    else
        throw ProgramError("the divergence query covers the two linear classes, got " +
                           std::string(toString(cls)));
    const Ucq q = buildUcq(sp.syms, sp.prog, variant);
    const bool satisfied = evalUcq(q, sp.db);

    if (io.json) {
        Json disjuncts = Json::array();
        std::istringstream lines(renderUcq(q, sp.syms.preds));
        for (std::string line; std::getline(lines, line);) disjuncts.push_back(line);
        Json j;
        j["variant"] = variant == UcqVariant::SL ? "SL" : "LinearSimplified";
        j["disjuncts"] = disjuncts;
        j["satisfied"] = satisfied;
        writeJson(io.out, j);
    } else {
        std::string text = renderUcq(q, sp.syms.preds);
        text += std::string("% satisfied: ") + (satisfied ? "yes" : "no") + "\n";
        writeOut(io.out, text);
    }
    return satisfied ? 1 : 0;
}

struct ValidateArgs {
    IoArgs io;
    std::string ceiling;
    std::size_t bitBudget = std::size_t{1} << 20;
};

int runValidateCmd(const ValidateArgs& a) {
    const SourceProgram sp = parseProgram(readInput(a.io.file));
    DecideOptions opts;
    opts.boundBitBudget = a.bitBudget;
    if (!a.ceiling.empty()) opts.ceiling = parseDecimal(a.ceiling, "--ceiling");
    const CrossReport r = crossValidate(sp.syms, sp.db, sp.prog, opts);

    if (a.io.json) {
        writeJson(a.io.out, toJson(r));
    } else {
        std::string text;
        text += "characterization: " + std::string(toString(r.characterization.answer)) + "\n";
        text += "bound: " + std::string(toString(r.bound.answer)) + "\n";
        text += std::string("divergence query satisfied: ") + (r.ucqSaysDiverges ? "yes" : "no") +
                "\n";
        text += std::string("agree: ") + (r.agree ? "yes" : "no") + "\n";
        writeOut(a.io.out, text);
    }
    return r.agree ? exitCode(r.characterization.answer) : kExitDisagree;
}

struct GenFamilyArgs {
    std::string out;
    std::uint32_t roots = 1;
    std::uint32_t n = 1;
    std::uint32_t m = 1;
    bool allowLarge = false;
};

struct GenRandomArgs {
    std::string out;
    std::string cls = "sl";
    std::uint64_t seed = 0;
    std::uint32_t preds = 3;
    std::uint32_t maxArity = 2;
    std::uint32_t tgds = 3;
    std::uint32_t facts = 4;
};

int runGenRandomCmd(const GenRandomArgs& a) {
    RandomParams p;
    p.cls = *classFromName(a.cls);
    p.preds = a.preds;
    p.maxArity = a.maxArity;
    p.tgds = a.tgds;
    p.facts = a.facts;
    const RandomInstance inst = genRandom(p, a.seed);
    writeOut(a.out, "% class " + a.cls + ", seed " + std::to_string(a.seed) + ", acyclic " +
                        (inst.acyclic ? "yes" : "no") + "\n" + inst.text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semi-oblivious chase runner and termination decider"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    int rc = 0;

    IoArgs parseArgs;
    auto* parseCmd = app.add_subcommand("parse", "parse a program and echo it back normalized");
    addIo(parseCmd, parseArgs);
    parseCmd->callback([&] { rc = runParseCmd(parseArgs); });

    ChaseArgs chaseArgs;
    auto* chaseCmd = app.add_subcommand("chase", "run the semi-oblivious chase");
    addIo(chaseCmd, chaseArgs.io);
    chaseCmd->add_option("--max-atoms", chaseArgs.maxAtoms, "atom cap")->capture_default_str();
    chaseCmd->add_option("--max-steps", chaseArgs.maxSteps, "step cap, 0 = 10 * atom cap")
        ->capture_default_str();
    chaseCmd->add_option("--depth-cap", chaseArgs.depthCap, "depth cap, 0 = unbounded")
        ->capture_default_str();
    chaseCmd->add_option("--strategy", chaseArgs.strategy, "trigger scheduling order")
        ->check(CLI::IsMember({"fifo", "lifo", "random"}))
        ->capture_default_str();
    chaseCmd->add_option("--seed", chaseArgs.seed, "seed for the random strategy")
        ->capture_default_str();
    chaseCmd->add_flag("--emit-forest", chaseArgs.emitForest, "dump the chase forest edge list");
    chaseCmd->callback([&] { rc = runChaseCmd(chaseArgs); });

    DecideArgs decideArgs;
    auto* decideCmd = app.add_subcommand("decide", "decide chase termination for the database");
    addIo(decideCmd, decideArgs.io);
    decideCmd->add_option("--class", decideArgs.cls, "treat the program as this class")
        ->check(CLI::IsMember({"auto", "sl", "l", "g", "general"}))
        ->capture_default_str();
    decideCmd->add_option("--method", decideArgs.method, "decision procedure")
        ->check(CLI::IsMember({"characterization", "bound"}))
        ->capture_default_str();
    decideCmd->add_option("--ceiling", decideArgs.ceiling,
                          "refuse the bound method above this size (decimal)");
    decideCmd->add_option("--bit-budget", decideArgs.bitBudget,
                          "bit budget for materializing bound values")
        ->capture_default_str();
    decideCmd->add_flag("--no-depth-exit", decideArgs.noDepthExit,
                        "bound method: keep chasing past the depth bound");
    decideCmd->add_option("--max-atoms", decideArgs.maxAtoms, "atom cap for general rules")
        ->capture_default_str();
    decideCmd->add_option("--max-steps", decideArgs.maxSteps, "step cap for general rules")
        ->capture_default_str();
    decideCmd->callback([&] { rc = runDecideCmd(decideArgs); });

    IoArgs simplifyArgs;
    auto* simplifyCmd =
        app.add_subcommand("simplify", "rewrite a linear program over simplified predicates");
    addIo(simplifyCmd, simplifyArgs);
    simplifyCmd->callback([&] { rc = runSimplifyCmd(simplifyArgs); });

    LinearizeArgs linearizeArgs;
    auto* linearizeCmd =
        app.add_subcommand("linearize", "rewrite a guarded program over type predicates");
    addIo(linearizeCmd, linearizeArgs.io);
    linearizeCmd->add_flag("--full-type-enum", linearizeArgs.fullTypeEnum,
                           "enumerate every type over the schema, not just reachable ones");
    linearizeCmd->add_option("--types", linearizeArgs.typesPath,
                             "write the type sidecar table to this file");
    linearizeCmd->add_option("--type-budget", linearizeArgs.typeBudget, "cap on generated types")
        ->capture_default_str();
    linearizeCmd->callback([&] { rc = runLinearizeCmd(linearizeArgs); });

    IoArgs ucqArgs;
    auto* ucqCmd = app.add_subcommand("ucq", "print and evaluate the divergence query");
    addIo(ucqCmd, ucqArgs);
    ucqCmd->callback([&] { rc = runUcqCmd(ucqArgs); });

    ValidateArgs validateArgs;
    auto* validateCmd = app.add_subcommand(
        "validate", "check characterization, bound, and query agreement on one input");
    addIo(validateCmd, validateArgs.io);
    validateCmd->add_option("--ceiling", validateArgs.ceiling,
                            "refuse the bound method above this size (decimal)");
    validateCmd->add_option("--bit-budget", validateArgs.bitBudget,
                            "bit budget for materializing bound values")
        ->capture_default_str();
    validateCmd->callback([&] { rc = runValidateCmd(validateArgs); });

    auto* genCmd = app.add_subcommand("gen", "generate instance families");
    genCmd->require_subcommand(1);

    auto addFamily = [&](const char* name, const char* desc, GenFamilyArgs& a, bool large) {
        auto* sub = genCmd->add_subcommand(name, desc);
        sub->add_option("--l", a.roots, "number of roots")->capture_default_str();
        sub->add_option("--n", a.n, "levels")->capture_default_str();
        sub->add_option("--m", a.m, "width parameter")->capture_default_str();
        sub->add_option("--out", a.out, "write to a file instead of stdout");
        if (large)
            sub->add_flag("--allow-large", a.allowLarge, "permit parameters past n,m = 2");
        return sub;
    };

    GenFamilyArgs slArgs, linArgs, gArgs;
    addFamily("sl-lb", "simple-linear family meeting its size bound", slArgs, false)
        ->callback([&] { writeOut(slArgs.out, genSlLower(slArgs.roots, slArgs.n, slArgs.m)); });
    addFamily("lin-lb", "linear family meeting its size bound", linArgs, false)->callback([&] {
        writeOut(linArgs.out, genLinearLower(linArgs.roots, linArgs.n, linArgs.m));
    });
    addFamily("g-lb", "guarded family meeting its size bound", gArgs, true)->callback([&] {
        writeOut(gArgs.out, genGuardedLower(gArgs.roots, gArgs.n, gArgs.m, gArgs.allowLarge));
    });

    GenFamilyArgs depthArgs;
    depthArgs.n = 2;
    auto* depthCmd = genCmd->add_subcommand("depth", "guarded family with chase depth n - 1");
    depthCmd->add_option("--n", depthArgs.n, "chain length, at least 2")->capture_default_str();
    depthCmd->add_option("--out", depthArgs.out, "write to a file instead of stdout");
    depthCmd->callback([&] { writeOut(depthArgs.out, genDepthFamily(depthArgs.n)); });

    GenFamilyArgs tmArgs;
    std::string tmFile;
    auto* tmCmd = genCmd->add_subcommand("tm", "rule encoding of a Turing machine run");
    tmCmd->add_option("specfile", tmFile, "machine description, - for stdin")->required();
    tmCmd->add_option("--out", tmArgs.out, "write to a file instead of stdout");
    tmCmd->callback([&] { writeOut(tmArgs.out, genTm(parseTmSpec(readInput(tmFile)))); });

    GenRandomArgs randomArgs;
    auto* randomCmd = genCmd->add_subcommand("random", "seeded random instance of a given class");
    randomCmd->add_option("--seed", randomArgs.seed, "generator seed")->required();
    randomCmd->add_option("--class", randomArgs.cls, "target class")
        ->check(CLI::IsMember({"sl", "l", "g"}))
        ->capture_default_str();
    randomCmd->add_option("--preds", randomArgs.preds, "schema size")->capture_default_str();
    randomCmd->add_option("--max-arity", randomArgs.maxArity, "arity bound")
        ->capture_default_str();
    randomCmd->add_option("--tgds", randomArgs.tgds, "rule count")->capture_default_str();
    randomCmd->add_option("--facts", randomArgs.facts, "database size")->capture_default_str();
    randomCmd->add_option("--out", randomArgs.out, "write to a file instead of stdout");
    randomCmd->callback([&] { rc = runGenRandomCmd(randomArgs); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ProgramError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return rc;
}

#pragma once

// JSON renderings of chase outcomes, verdicts, cross-validation reports, and
// the type sidecar. One schema for every result object: verdict, class,
// stats {atoms, maxdepth, steps}, witness (cycle positions or null), and
// bounds {d, f} with arbitrary-precision values as decimal strings. Keys keep
// insertion order and all values are integers, booleans, or strings, so equal
// inputs dump byte-identically.

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "chasegate/chase.hpp"
#include "chasegate/core.hpp"
#include "chasegate/linearize.hpp"
#include "chasegate/termination.hpp"
#include "chasegate/textio.hpp"

namespace chasegate {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

// Prepends the version field, keeping the body's key order.
inline Json versioned(const Json& body) {
    Json j;
    j["version"] = kVersion;
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    return j;
}

inline Json resultSkeleton() {
    Json j;
    j["verdict"] = nullptr;
    j["class"] = nullptr;
    j["stats"] = nullptr;
    j["witness"] = nullptr;
    j["bounds"] = nullptr;
    return j;
}

inline Json toJson(const ChaseStats& s) {
    Json j;
    j["atoms"] = s.atoms;
    j["maxdepth"] = s.maxDepth;
    j["steps"] = s.steps;
    return j;
}

inline Json toJson(const Bounds& b) {
    Json j;
    j["d"] = b.d ? Json(b.d->str()) : Json(nullptr);
    j["f"] = b.f ? Json(b.f->str()) : Json(nullptr);
    j["dBits"] = b.dBits.str();
    j["fBits"] = b.fBits.str();
    return j;
}

inline Json toJson(const Verdict& v) {
    Json j = resultSkeleton();
    j["verdict"] = toString(v.answer);
    j["class"] = toString(v.cls);
    if (v.stats) j["stats"] = toJson(*v.stats);
    if (v.witness) j["witness"] = Json(v.witnessCycle);
    if (v.bounds) j["bounds"] = toJson(*v.bounds);
    j["method"] = toString(v.method);
    j["sizeBound"] = v.sizeBound ? Json(v.sizeBound->str()) : Json(nullptr);
    j["warning"] = v.warning.empty() ? Json(nullptr) : Json(v.warning);
    return j;
}

inline Json toJson(const ChaseOutcome& oc, TgdClass cls,
                   const std::optional<Bounds>& bounds = std::nullopt) {
    Json j = resultSkeleton();
    j["verdict"] = toString(oc.status);
    j["class"] = toString(cls);
    j["stats"] = toJson(statsOf(oc));
    if (bounds) j["bounds"] = toJson(*bounds);
    j["cap"] = toString(oc.cap);
    return j;
}

inline Json toJson(const CrossReport& r) {
    Json j;
    j["characterization"] = toJson(r.characterization);
    j["bound"] = toJson(r.bound);
    j["ucqSaysDiverges"] = r.ucqSaysDiverges;
    j["agree"] = r.agree;
    return j;
}

// Edge list of the chase forest: atoms by insertion id, edges parent -> child.
inline Json forestJson(const ChaseOutcome& oc) {
    Json atoms = Json::array();
    for (const auto& a : oc.instance.atoms()) atoms.push_back(renderAtom(a, oc.syms));
    Json edges = Json::array();
    for (std::size_t id = 0; id < oc.parent.size(); ++id)
        if (oc.parent[id] != kNoParent) edges.push_back(Json::array({oc.parent[id], id}));
    Json j;
    j["atoms"] = atoms;
    j["edges"] = edges;
    return j;
}

// Sidecar decoding the generated [tau#...] predicates: name -> guard shape
// plus side atoms over the guard's integers.
inline Json typesJson(const TypeRegistry& types, const PredTable& preds) {
    auto atomStr = [&preds](const IntAtom& a) {
        std::string s = preds.name(a.pred) + "(";
        for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(a.args[i]);
        }
        return s + ")";
    };
    Json j = Json::object();
    for (PredId id : types.all()) {
        const SigmaType* t = types.find(id);
        Json side = Json::array();
        for (const auto& a : t->side) side.push_back(atomStr(a));
        Json entry;
        entry["guard"] = atomStr(t->guard);
        entry["side"] = side;
        j[preds.name(id)] = entry;
    }
    return j;
}

}  // namespace chasegate

//===- report.hpp - Text and JSON rendering ---------------------*- C++ -*-===//

#pragma once

#include "ecdiff/diff.hpp"
#include "ecdiff/oracle.hpp"

#include <json.hpp>

namespace ecdiff {

/// `(store,load)` in text, `["store","load"]` in JSON.
std::string edgeText(const RfEdge &E, const Program &P);
std::string tupleText(const RfTuple &T, const Program &P);
nlohmann::json tupleJson(const RfTuple &T, const Program &P);
nlohmann::json tupleSetJson(const std::set<RfTuple> &Set, const Program &P);

nlohmann::json analysisJson(const StaticAbstractTrace &T, const Program &P);
std::string analysisText(const StaticAbstractTrace &T, const Program &P);

nlohmann::json diffJson(const DiffReport &R, const Program &P1, const Program &P2);
std::string diffText(const DiffReport &R, const Program &P1, const Program &P2);

nlohmann::json groundJson(const GroundAbstractTrace &G, const Program &P, bool Full);
std::string groundText(const GroundAbstractTrace &G, const Program &P);

} // namespace ecdiff

//===- cli.cpp - Command-line driver --------------------------------------===//

#include "ecdiff/cli.hpp"
#include "ecdiff/check.hpp"
#include "ecdiff/report.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace ecdiff {

namespace {

struct Config {
  std::vector<std::string> files;
  int rank = 1;
  int maxRank = 3;
  int loopBound = 3;
  std::size_t budget = 2'000'000;
  std::string mapPath;
  std::string format = "text";
  std::string dump;
  bool facts = false;
  bool json = false;
  bool noAccessRestriction = false;
};

int doAnalyze(const Config &C, std::ostream &Out, std::ostream &Err) {
  Program P = parseFile(C.files[0]);
  if (C.facts) {
    Out << extractFacts(P).toJson(P).dump(2) << "\n";
    return ExitSame;
  }
  AnalysisOptions AO;
  AO.rank = C.rank;
  AO.accessRestriction = !C.noAccessRestriction;
  StaticAbstractTrace T = analyze(P, AO);
  for (const std::string &W : T.warnings)
    Err << "warning: " << W << "\n";
  if (!C.dump.empty()) {
    nlohmann::json J = nlohmann::json::array();
    for (const auto &Tuple : dumpRelation(T, C.dump))
      J.push_back(Tuple);
    Out << J.dump() << "\n";
  } else if (C.format == "json") {
    Out << analysisJson(T, P).dump(2) << "\n";
  } else {
    Out << analysisText(T, P);
  }
  return ExitSame;
}

DiffOptions diffOptions(const Config &C) {
  DiffOptions DO;
  DO.maxRank = C.maxRank;
  DO.accessRestriction = !C.noAccessRestriction;
  if (!C.mapPath.empty())
    DO.explicitMap = readLabelMap(C.mapPath);
  return DO;
}

int doDiff(const Config &C, std::ostream &Out) {
  Program P1 = parseFile(C.files[0]);
  Program P2 = parseFile(C.files[1]);
  DiffReport R = iterativeDiff(P1, P2, diffOptions(C));
  if (C.format == "json")
    Out << diffJson(R, P1, P2).dump(2) << "\n";
  else
    Out << diffText(R, P1, P2);
  return R.rankFound ? ExitDifferent : ExitSame;
}

int doOracle(const Config &C, std::ostream &Out, std::ostream &Err) {
  Program P = parseFile(C.files[0]);
  OracleOptions OO;
  OO.loopBound = C.loopBound;
  OO.rank = C.rank;
  OO.budget = C.budget;
  GroundAbstractTrace G = explore(P, OO);
  if (!G.complete)
    Err << "warning: state budget exhausted; results are partial\n";
  if (C.json)
    Out << groundJson(G, P, true).dump(2) << "\n";
  else
    Out << groundText(G, P);
  return ExitSame;
}

void soundnessText(std::ostream &OS, const std::string &File, const VersionCheck &V,
                   const Program &P) {
  OS << "  " << File << ": ";
  if (V.error) {
    OS << "not checked (" << *V.error << ")\n";
    return;
  }
  OS << V.soundness.missingRf.size() + V.soundness.missingTuples.size() << " violations ("
     << V.ground.rf.size() << " ground rf edges, " << V.analysis.mayRf.size()
     << " static)\n";
  for (const RfEdge &E : V.soundness.missingRf)
    OS << "    missing rf " << edgeText(E, P) << "\n";
  for (const RfTuple &T : V.soundness.missingTuples)
    OS << "    missing tuple " << tupleText(T, P) << "\n";
}

nlohmann::json soundnessJson(const VersionCheck &V, const Program &P) {
  nlohmann::json J;
  if (V.error)
    J["error"] = *V.error;
  std::set<RfTuple> Edges;
  for (const RfEdge &E : V.soundness.missingRf)
    Edges.insert({E});
  J["missing_rf"] = tupleSetJson(Edges, P);
  J["missing_tuples"] = tupleSetJson({V.soundness.missingTuples.begin(),
                                      V.soundness.missingTuples.end()},
                                     P);
  J["oracle"] = groundJson(V.ground, P, false);
  return J;
}

int doCheck(const Config &C, std::ostream &Out) {
  Program P1 = parseFile(C.files[0]);
  Program P2 = parseFile(C.files[1]);
  CheckOptions CO;
  CO.loopBound = C.loopBound;
  CO.maxRank = C.maxRank;
  CO.budget = C.budget;
  if (!C.mapPath.empty())
    CO.explicitMap = readLabelMap(C.mapPath);
  CheckReport R = runCheck(P1, P2, CO);

  if (C.format == "json") {
    nlohmann::json J;
    J["soundness"] = {{"p1", soundnessJson(R.first, P1)}, {"p2", soundnessJson(R.second, P2)}};
    J["diff"] = diffJson(R.diff, P1, P2);
    J["consistency"] = R.inconsistencies;
    Out << J.dump(2) << "\n";
  } else {
    Out << "soundness (loop bound " << C.loopBound << ", rank " << C.maxRank << "):\n";
    soundnessText(Out, C.files[0], R.first, P1);
    soundnessText(Out, C.files[1], R.second, P2);
    Out << "diff:\n" << diffText(R.diff, P1, P2);
    Out << "consistency: " << R.inconsistencies.size() << " unconfirmed delta tuples\n";
    for (const std::string &I : R.inconsistencies)
      Out << "  " << I << "\n";
  }
  if (R.first.error || R.second.error)
    return ExitUsage;
  if (!R.sound())
    return ExitInvariant;
  return R.diff.rankFound ? ExitDifferent : ExitSame;
}

} // namespace

int runCli(const std::vector<std::string> &Args, std::ostream &Out, std::ostream &Err) {
  CLI::App App{"Synchronization differences between two versions of a concurrent program",
               "ecdiff"};
  App.require_subcommand(1);
  Config C;
  auto Format = CLI::IsMember({"text", "json"});

  auto *Analyze = App.add_subcommand("analyze", "Run the static analysis on one program");
  Analyze->add_option("file", C.files, "Program (.cp)")->required()->expected(1)
      ->check(CLI::ExistingFile);
  Analyze->add_option("--rank", C.rank, "Rank 1-3")->check(CLI::Range(1, 3));
  Analyze->add_flag("--facts", C.facts, "Dump the base relations as JSON");
  Analyze->add_option("--dump", C.dump, "Dump one relation (mustHb, mayHb, mayRf, noRf, mayRfs)");
  Analyze->add_option("--format", C.format)->check(Format);
  Analyze->add_flag("--no-access-restriction", C.noAccessRestriction,
                    "Let MayHb range over every statement");

  auto *Diff = App.add_subcommand("diff", "Compare two versions");
  Diff->add_option("files", C.files, "Old and new program")->required()->expected(2)
      ->check(CLI::ExistingFile);
  Diff->add_option("--max-rank", C.maxRank)->check(CLI::Range(1, 3));
  Diff->add_option("--map", C.mapPath, "Statement correspondence file")
      ->check(CLI::ExistingFile);
  Diff->add_option("--format", C.format)->check(Format);
  Diff->add_flag("--no-access-restriction", C.noAccessRestriction);

  auto *Oracle = App.add_subcommand("oracle", "Enumerate interleavings of one program");
  Oracle->add_option("file", C.files)->required()->expected(1)->check(CLI::ExistingFile);
  Oracle->add_option("--loop-bound", C.loopBound)->check(CLI::PositiveNumber);
  Oracle->add_option("--rank", C.rank)->check(CLI::Range(1, 3));
  Oracle->add_option("--budget", C.budget, "Maximum number of explored states");
  Oracle->add_flag("--json", C.json, "Print full edge lists as JSON");

  auto *Check = App.add_subcommand("check", "Check the static results against the oracle");
  Check->add_option("files", C.files)->required()->expected(2)->check(CLI::ExistingFile);
  Check->add_option("--loop-bound", C.loopBound)->check(CLI::PositiveNumber);
  Check->add_option("--max-rank", C.maxRank)->check(CLI::Range(1, 3));
  Check->add_option("--map", C.mapPath)->check(CLI::ExistingFile);
  Check->add_option("--budget", C.budget);
  Check->add_option("--format", C.format)->check(Format);

  std::vector<std::string> Reversed(Args.rbegin(), Args.rend());
  try {
    App.parse(Reversed);
  } catch (const CLI::CallForHelp &) {
    Out << App.help();
    return ExitSame;
  } catch (const CLI::CallForAllHelp &) {
    Out << App.help("", CLI::AppFormatMode::All);
    return ExitSame;
  } catch (const CLI::ParseError &E) {
    Err << "error: " << E.what() << "\n";
    return ExitUsage;
  }

  try {
    if (Analyze->parsed())
      return doAnalyze(C, Out, Err);
    if (Diff->parsed())
      return doDiff(C, Out);
    if (Oracle->parsed())
      return doOracle(C, Out, Err);
    return doCheck(C, Out);
  } catch (const InvariantError &E) {
    Err << "internal error: " << E.what() << "\n";
    return ExitInvariant;
  } catch (const std::logic_error &E) {
    Err << "internal error: " << E.what() << "\n";
    return ExitInvariant;
  } catch (const std::exception &E) {
    Err << "error: " << E.what() << "\n";
    return ExitUsage;
  }
}

} // namespace ecdiff

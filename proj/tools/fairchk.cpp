// Copyright 2026 The fairchk Authors
// SPDX-License-Identifier: Apache-2.0

// fairchk command-line driver.
//
// Exit codes: 0 success / relation holds, 1 check failure / relation does
// not hold / run did not terminate, 2 usage, I/O or parse error.

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fairchk/fairchk.hpp"
#include "fairchk/json_io.hpp"

namespace {

using namespace fairchk;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kError = 2;

bool use_color() { return std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO); }

std::string paint(const std::string& s, bool good) {
  if (!use_color()) return s;
  return (good ? "\033[32m" : "\033[31m") + s + "\033[0m";
}

struct Loaded {
  std::string path;
  SourceProgram prog;
};

// Reads and parses a program; prints the error and returns false on failure.
bool load(const std::string& path, Loaded& out, ParseError* error = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << path << ": cannot open file\n";
    return false;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  out.path = path;
  try {
    out.prog = parse(buf.str());
  } catch (const ParseError& e) {
    std::cerr << path << ":" << e.span().line << ":" << e.span().column << ": " << e.code() << ": "
              << e.what() << "\n";
    if (error) *error = e;
    return false;
  }
  return true;
}

// A type argument is a typedef name or a type expression over the file's typedefs.
bool type_arg(ProgramModel& m, const std::string& text, TypeId& out) {
  try {
    out = intern(m.table, *parse_type(text, *m.prog), *m.prog);
    return true;
  } catch (const ParseError& e) {
    std::cerr << "type argument '" << text << "': " << e.code() << ": " << e.what() << "\n";
    return false;
  }
}

void print_diagnostic(const std::string& path, const Diagnostic& d) {
  std::cerr << path << ":" << d.span.line << ":" << d.span.column << ": " << d.code;
  if (!d.rule.empty()) std::cerr << " [" << d.rule << "]";
  if (!d.definition.empty()) std::cerr << " in " << d.definition;
  std::cerr << ": " << d.message << "\n";
  for (const auto& [k, v] : d.details) std::cerr << "    " << k << ": " << v << "\n";
}

int cmd_check(const std::string& file, bool json, const CheckOptions& opts) {
  Loaded l;
  ParseError err("", {}, "");
  if (!load(file, l, &err)) {
    if (json && !err.code().empty()) {
      CheckReport r;
      r.accepted = false;
      r.diagnostics.push_back({err.code(), "parse", "", err.span(), err.what(), {}});
      std::cout << to_json(r).dump(2) << "\n";
    }
    return kError;
  }
  ProgramModel m = make_model(l.prog);
  CheckReport r = check_program(m, opts);
  if (json) {
    std::cout << to_json(r).dump(2) << "\n";
  } else {
    std::size_t width = 10;
    for (const auto& d : r.definitions) width = std::max(width, d.name.size() + 2);
    std::cout << std::left;
    for (const auto& d : r.definitions) {
      std::cout << d.name << std::string(width - d.name.size(), ' ') << "rank "
                << d.rank.str() << std::string(d.rank.str().size() < 6 ? 6 - d.rank.str().size() : 1, ' ')
                << paint(d.ok ? "ok" : "rejected", d.ok) << "\n";
    }
    for (const auto& [choice, k] : r.inferred)
      std::cout << "inferred +[" << k << "] at " << choice->span.line << ":" << choice->span.column
                << "\n";
    for (const auto& [phase, ms] : r.timings) std::cout << "time " << phase << " " << ms << " ms\n";
    std::cout << paint(r.accepted ? "accepted" : "rejected", r.accepted) << "\n";
  }
  for (const auto& d : r.definitions)
    for (const auto& x : d.diagnostics) print_diagnostic(l.path, x);
  return r.accepted ? kOk : kFail;
}

enum class Relation { Subtype, Compatible, Rank, Graph };

int cmd_relation(Relation rel, const std::string& file, const std::string& a, const std::string& b,
                 bool json, const std::string& emit_graph) {
  Loaded l;
  if (!load(file, l)) return kError;
  ProgramModel m = make_model(l.prog);
  TypeId s, t;
  if (!type_arg(m, a, s) || !type_arg(m, b, t)) return kError;
  if (!emit_graph.empty() || rel == Relation::Graph) {
    if (!emit_graph.empty() && emit_graph != "dot") {
      std::cerr << "unsupported graph format '" << emit_graph << "'\n";
      return kError;
    }
    ConfigGraph g = build_config_graph(m.table, s, t);
    std::cout << to_dot(m.table, g);
    if (rel == Relation::Graph) return kOk;
  }
  switch (rel) {
    case Relation::Subtype: {
      SubtypeVerdict v = fair_subtype(m.table, s, t);
      if (json)
        std::cout << to_json(m.table, v).dump(2) << "\n";
      else
        std::cout << paint(describe(m.table, v), v.holds) << "\n";
      return v.holds ? kOk : kFail;
    }
    case Relation::Compatible: {
      ConfigGraph g = build_config_graph(m.table, s, t);
      bool ok = compatible(g);
      if (json)
        std::cout << Json{{"compatible", ok}, {"rank", weight_json(session_rank(g))},
                          {"configurations", g.nodes.size()}}
                         .dump(2)
                  << "\n";
      else
        std::cout << paint(ok ? "compatible" : "not compatible", ok) << "\n";
      return ok ? kOk : kFail;
    }
    case Relation::Rank: {
      Weight w = session_rank(m.table, s, t);
      if (json)
        std::cout << Json{{"rank", weight_json(w)}}.dump(2) << "\n";
      else
        std::cout << w.str() << "\n";
      return w.finite() ? kOk : kFail;
    }
    case Relation::Graph: break;
  }
  return kOk;
}

struct RunFlags {
  std::uint64_t seed = 1;
  std::uint64_t max_steps = 100000;
  bool trace = false;
  bool trace_json = false;
  bool unsafe = false;
  bool json = false;
  std::string entry;
};

int cmd_run(const std::string& file, const RunFlags& f) {
  Loaded l;
  if (!load(file, l)) return kError;
  if (!f.unsafe) {
    ProgramModel m = make_model(l.prog);
    CheckReport r = check_program(m);
    if (!r.accepted) {
      for (const auto& d : r.definitions)
        for (const auto& x : d.diagnostics) print_diagnostic(l.path, x);
      std::cerr << l.path << ": program rejected; use --unsafe to run it anyway\n";
      return kFail;
    }
  }
  const ProcDef* entry = f.entry.empty() ? entry_point(l.prog) : l.prog.find_proc(f.entry);
  if (!entry || !entry->params.empty()) {
    std::cerr << l.path << ": no parameterless entry definition\n";
    return kError;
  }
  RunOptions opts;
  opts.seed = f.seed;
  opts.max_steps = f.max_steps;
  if (f.trace_json)
    opts.trace = [](const TraceEvent& e) { std::cout << to_json(e).dump() << "\n"; };
  else if (f.trace)
    opts.trace = [](const TraceEvent& e) {
      std::cout << e.step << "  " << e.rule << "  " << e.session;
      if (!e.detail.empty()) std::cout << "  " << e.detail;
      std::cout << "\n";
    };
  RunOutcome o;
  try {
    o = run(l.prog, *entry, opts);
  } catch (const std::out_of_range&) {
    std::cerr << l.path << ": run aborted: process used a channel it does not hold\n";
    return kFail;
  }
  if (f.json) {
    std::cout << to_json(o).dump() << "\n";
  } else {
    bool ok = o.kind == RunOutcome::Kind::Terminated;
    std::cout << paint(RunOutcome::kind_name(o.kind), ok) << " after " << o.steps << " steps\n";
    if (o.kind == RunOutcome::Kind::Stuck) std::cout << o.dump;
  }
  return o.kind == RunOutcome::Kind::Terminated ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fairchk: checker, subtyping engine and interpreter for fairly terminating sessions"};
  app.require_subcommand(1);

  std::string file, ta, tb, emit_graph;
  bool json = false;
  CheckOptions copts;

  auto* check = app.add_subcommand("check", "Type check a program and report definition ranks");
  check->add_option("file", file, "Program file")->required();
  check->add_flag("--json", json, "Machine-readable report");
  check->add_flag("--infer-branch", copts.infer_branch, "Infer terminating branches of unmarked choices");
  check->add_flag("--timings", copts.timings, "Report per-phase timings");

  struct RelCmd {
    const char* name;
    const char* help;
    Relation rel;
  };
  const RelCmd rels[] = {
      {"subtype", "Decide fair subtyping A <= B and its weight", Relation::Subtype},
      {"compatible", "Decide compatibility of A and B", Relation::Compatible},
      {"rank", "Session rank of A # B", Relation::Rank},
      {"graph", "Print the configuration graph of A # B in dot format", Relation::Graph},
  };
  std::vector<std::pair<CLI::App*, Relation>> rel_cmds;
  for (const auto& r : rels) {
    auto* sub = app.add_subcommand(r.name, r.help);
    sub->add_option("file", file, "Program file")->required();
    sub->add_option("A", ta, "Type name or expression")->required();
    sub->add_option("B", tb, "Type name or expression")->required();
    if (r.rel != Relation::Graph) sub->add_flag("--json", json, "Machine-readable output");
    sub->add_option("--emit-graph", emit_graph, "Also print the configuration graph (format: dot)")
        ->check(CLI::IsMember({"dot"}));
    rel_cmds.emplace_back(sub, r.rel);
  }

  RunFlags rf;
  auto* runc = app.add_subcommand("run", "Execute a program with a seeded random scheduler");
  runc->add_option("file", file, "Program file")->required();
  runc->add_option("--seed", rf.seed, "Scheduler seed");
  runc->add_option("--max-steps", rf.max_steps, "Step limit")->capture_default_str();
  runc->add_option("--entry", rf.entry, "Entry definition (default: Main)");
  runc->add_flag("--trace", rf.trace, "Print one line per reduction step");
  runc->add_flag("--trace-json", rf.trace_json, "Print reduction steps as JSON lines");
  runc->add_flag("--unsafe", rf.unsafe, "Run without type checking first");
  runc->add_flag("--json", rf.json, "Machine-readable outcome");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  if (*check) return cmd_check(file, json, copts);
  if (*runc) return cmd_run(file, rf);
  for (const auto& [sub, rel] : rel_cmds)
    if (*sub) return cmd_relation(rel, file, ta, tb, json, emit_graph);
  return kError;
}

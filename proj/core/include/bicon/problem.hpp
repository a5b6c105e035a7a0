#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bicon/projector.hpp"

namespace bicon {

/// Parses one expression in the surface syntax: infix + - * / ^, calls
/// sin/cos/exp/log/abs/sign/sqrt, formal derivatives D(f, x, ...), numbers as
/// exact rationals. Identifiers must be chart coordinates or declared opaque
/// functions; anything else raises UndeclaredSymbol.
Expr parse_expression(const std::string& text,
                      const std::vector<std::string>& coords,
                      const std::map<std::string, std::vector<std::string>>& opaques,
                      int line_offset = 1, int col_offset = 1);

struct ProblemSettings {
  std::uint64_t seed = 42;
  int samples = 32;
  double tol = 1e-9;
};

/// Parsed, validated problem file: chart + metric + projector + opaque
/// function declarations + zero-test settings.
struct ProblemFile {
  std::vector<std::string> coords;
  std::vector<std::pair<double, double>> boxes; // one per coordinate
  // Upper-triangle metric entries, keyed by (i, j) with i <= j; the original
  // expression text is kept for serialization.
  std::map<std::pair<int, int>, std::string> metric_text;
  std::map<std::pair<int, int>, Expr> metric_expr;
  // Projector: either a coordinate block or explicit components.
  std::vector<std::string> projector_block;
  std::map<std::pair<int, int>, std::string> projector_text;
  std::map<std::pair<int, int>, Expr> projector_expr;
  // Opaque declarations, in file order.
  std::vector<std::pair<std::string, std::vector<std::string>>> functions;
  ProblemSettings settings;

  bool uses_block_projector() const { return !projector_block.empty(); }
  std::map<std::string, std::vector<std::string>> opaque_map() const;
};

bool operator==(const ProblemFile& a, const ProblemFile& b);

ProblemFile parse_problem(const std::string& text);
std::string serialize_problem(const ProblemFile& pf);

/// Optional command-line overrides for the file's [settings].
struct SettingsOverride {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol;
};

struct BuiltProblem {
  ChartPtr chart;
  MetricPtr metric;
  ProjectorPair projector;
  EvalContext ctx;
  ZeroTester tester;

  BuiltProblem(ChartPtr c, MetricPtr m, ProjectorPair p, EvalContext e,
               ZeroTester t)
      : chart(std::move(c)), metric(std::move(m)), projector(std::move(p)),
        ctx(std::move(e)), tester(std::move(t)) {}
};

/// Builds the validated metric chart and projector pair from a parsed file.
BuiltProblem build_problem(const ProblemFile& pf,
                           const SettingsOverride& over = {});

/// Transport input: an initial state plus a line curve, read from a file with
/// [state] and [curve] sections. Omitted state entries default to zero.
struct TransportInput {
  std::vector<double> xi, Psi, phistar, phibar, chistar, chibar;
  double phi = 0.0, chi = 0.0;
  std::vector<double> from, to;
  double h = 1e-3;
};

TransportInput parse_transport_input(const std::string& text, int n);

} // namespace bicon

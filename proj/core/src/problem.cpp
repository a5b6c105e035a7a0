#include "bicon/problem.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "bicon/errors.hpp"

namespace bicon {

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

namespace {

struct ExprToken {
  enum Kind { Number, Ident, Op, LParen, RParen, Comma, End } kind;
  std::string text;
  Rational value;
  int line, col;
};

class ExprLexer {
public:
  ExprLexer(const std::string& s, int line0, int col0)
      : s_(s), line_(line0), col_(col0) {}

  ExprToken next() {
    skip_ws();
    ExprToken t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= s_.size()) {
      t.kind = ExprToken::End;
      return t;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      t.kind = ExprToken::Number;
      t.value = lex_number();
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = ExprToken::Ident;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
        t.text += s_[pos_];
        advance();
      }
      return t;
    }
    switch (c) {
    case '(': t.kind = ExprToken::LParen; break;
    case ')': t.kind = ExprToken::RParen; break;
    case ',': t.kind = ExprToken::Comma; break;
    case '+': case '-': case '*': case '/': case '^':
      t.kind = ExprToken::Op;
      t.text = c;
      break;
    default:
      throw ParseError(std::string("unexpected character '") + c +
                           "' in expression",
                       line_, col_);
    }
    advance();
    return t;
  }

private:
  void advance() {
    ++pos_;
    ++col_;
  }
  void skip_ws() {
    while (pos_ < s_.size() &&
           std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      if (s_[pos_] == '\n') {
        ++line_;
        col_ = 0;
      }
      advance();
    }
  }

  Rational lex_number() {
    long long mantissa = 0;
    long long frac_digits = 0;
    bool any = false;
    auto digit = [&](char d) { return static_cast<long long>(d - '0'); };
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      mantissa = mantissa * 10 + digit(s_[pos_]);
      any = true;
      advance();
    }
    if (pos_ < s_.size() && s_[pos_] == '.') {
      advance();
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        mantissa = mantissa * 10 + digit(s_[pos_]);
        ++frac_digits;
        any = true;
        advance();
      }
    }
    if (!any) throw ParseError("malformed number", line_, col_);
    long long exp10 = -frac_digits;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      advance();
      long long sign = 1;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
        if (s_[pos_] == '-') sign = -1;
        advance();
      }
      long long e = 0;
      bool got = false;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        e = e * 10 + digit(s_[pos_]);
        got = true;
        advance();
      }
      if (!got) throw ParseError("malformed exponent", line_, col_);
      exp10 += sign * e;
    }
    Rational r(mantissa);
    if (exp10 > 0) r = r * Rational(10).pow_int(exp10);
    if (exp10 < 0) r = r / Rational(10).pow_int(-exp10);
    return r;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_, col_;
};

class ExprParser {
public:
  ExprParser(const std::string& s, const std::vector<std::string>& coords,
             const std::map<std::string, std::vector<std::string>>& opaques,
             int line0, int col0)
      : lexer_(s, line0, col0), coords_(coords), opaques_(opaques) {
    cur_ = lexer_.next();
  }

  Expr parse() {
    Expr e = parse_add();
    expect(ExprToken::End, "end of expression");
    return e;
  }

private:
  void bump() { cur_ = lexer_.next(); }
  void expect(ExprToken::Kind k, const char* what) {
    if (cur_.kind != k)
      throw ParseError(std::string("expected ") + what, cur_.line, cur_.col);
  }

  Expr parse_add() {
    Expr e = parse_mul();
    while (cur_.kind == ExprToken::Op && (cur_.text == "+" || cur_.text == "-")) {
      const bool minus = cur_.text == "-";
      bump();
      Expr r = parse_mul();
      e = minus ? e - r : e + r;
    }
    return e;
  }

  Expr parse_mul() {
    Expr e = parse_unary();
    while (cur_.kind == ExprToken::Op && (cur_.text == "*" || cur_.text == "/")) {
      const bool div = cur_.text == "/";
      bump();
      Expr r = parse_unary();
      e = div ? e / r : e * r;
    }
    return e;
  }

  Expr parse_unary() {
    if (cur_.kind == ExprToken::Op && cur_.text == "-") {
      bump();
      return -parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (cur_.kind == ExprToken::Op && cur_.text == "^") {
      bump();
      // Exponent: a rational literal, possibly parenthesized or negated.
      Rational e = parse_exponent();
      return Expr::pow(base, e);
    }
    return base;
  }

  Rational parse_exponent() {
    bool neg = false;
    bool paren = false;
    if (cur_.kind == ExprToken::LParen) {
      paren = true;
      bump();
    }
    if (cur_.kind == ExprToken::Op && cur_.text == "-") {
      neg = true;
      bump();
    }
    expect(ExprToken::Number, "a rational exponent");
    Rational v = cur_.value;
    bump();
    if (paren && cur_.kind == ExprToken::Op && cur_.text == "/") {
      bump();
      expect(ExprToken::Number, "a rational exponent denominator");
      v = v / cur_.value;
      bump();
    }
    if (paren) {
      expect(ExprToken::RParen, "')'");
      bump();
    }
    return neg ? -v : v;
  }

  Expr parse_primary() {
    if (cur_.kind == ExprToken::Number) {
      Expr e = Expr::number(cur_.value);
      bump();
      return e;
    }
    if (cur_.kind == ExprToken::LParen) {
      bump();
      Expr e = parse_add();
      expect(ExprToken::RParen, "')'");
      bump();
      return e;
    }
    if (cur_.kind != ExprToken::Ident)
      throw ParseError("expected a value", cur_.line, cur_.col);
    const std::string name = cur_.text;
    const int line = cur_.line, col = cur_.col;
    bump();
    if (cur_.kind == ExprToken::LParen) return parse_call(name, line, col);
    return resolve_symbol(name, line, col);
  }

  Expr resolve_symbol(const std::string& name, int line, int col) {
    for (const auto& c : coords_)
      if (c == name) return Expr::symbol(name);
    auto it = opaques_.find(name);
    if (it != opaques_.end()) return Expr::opaque(name, it->second);
    throw UndeclaredSymbol("undeclared symbol '" + name + "'", line, col);
  }

  Expr parse_call(const std::string& name, int line, int col) {
    expect(ExprToken::LParen, "'('");
    bump();
    if (name == "D") {
      // D(f, x, y, ...) — formal derivative of a declared opaque function.
      expect(ExprToken::Ident, "an opaque function name");
      const std::string fname = cur_.text;
      auto it = opaques_.find(fname);
      if (it == opaques_.end())
        throw UndeclaredSymbol("undeclared opaque function '" + fname + "'",
                               cur_.line, cur_.col);
      bump();
      std::vector<int> deriv(it->second.size(), 0);
      while (cur_.kind == ExprToken::Comma) {
        bump();
        expect(ExprToken::Ident, "a coordinate name");
        auto pos = std::find(it->second.begin(), it->second.end(), cur_.text);
        if (pos == it->second.end())
          throw ParseError("'" + cur_.text + "' is not an argument of " + fname,
                           cur_.line, cur_.col);
        deriv[static_cast<std::size_t>(pos - it->second.begin())] += 1;
        bump();
      }
      expect(ExprToken::RParen, "')'");
      bump();
      return Expr::opaque(fname, it->second, deriv);
    }

    std::vector<Expr> args;
    std::vector<std::string> arg_names;
    if (cur_.kind != ExprToken::RParen) {
      while (true) {
        if (cur_.kind == ExprToken::Ident) arg_names.push_back(cur_.text);
        else arg_names.emplace_back();
        args.push_back(parse_add());
        if (cur_.kind != ExprToken::Comma) break;
        bump();
      }
    }
    expect(ExprToken::RParen, "')'");
    bump();

    static const std::map<std::string, CallKind> builtins = {
        {"sin", CallKind::Sin}, {"cos", CallKind::Cos}, {"exp", CallKind::Exp},
        {"log", CallKind::Log}, {"abs", CallKind::Abs}, {"sign", CallKind::Sign}};
    if (auto b = builtins.find(name); b != builtins.end()) {
      if (args.size() != 1)
        throw ParseError(name + " takes exactly one argument", line, col);
      return Expr::call(b->second, args[0]);
    }
    if (name == "sqrt") {
      if (args.size() != 1)
        throw ParseError("sqrt takes exactly one argument", line, col);
      return Expr::pow(args[0], Rational(1, 2));
    }
    auto it = opaques_.find(name);
    if (it == opaques_.end())
      throw UndeclaredSymbol("undeclared function '" + name + "'", line, col);
    // Explicit opaque call: arguments must repeat the declared coordinates.
    if (arg_names != it->second)
      throw ParseError("arguments of " + name +
                           " must match its declaration exactly",
                       line, col);
    return Expr::opaque(name, it->second);
  }

  ExprLexer lexer_;
  ExprToken cur_;
  const std::vector<std::string>& coords_;
  const std::map<std::string, std::vector<std::string>>& opaques_;
};

} // namespace

Expr parse_expression(const std::string& text,
                      const std::vector<std::string>& coords,
                      const std::map<std::string, std::vector<std::string>>& opaques,
                      int line_offset, int col_offset) {
  ExprParser p(text, coords, opaques, line_offset, col_offset);
  return p.parse();
}

// ---------------------------------------------------------------------------
// Sectioned key/value file parser
// ---------------------------------------------------------------------------

namespace {

struct FileValue {
  enum Kind { String, Number, Array } kind;
  std::string str;                  // String: contents (unquoted)
  double num = 0.0;                 // Number
  bool num_is_int = false;
  long long num_int = 0;
  std::vector<FileValue> items;     // Array
  int line = 0, col = 0;
};

struct FileEntry {
  std::vector<std::string> key; // dotted path
  FileValue value;
  int line = 0, col = 0;
};

using Sections = std::vector<std::pair<std::string, std::vector<FileEntry>>>;

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

FileValue parse_scalar(const std::string& text, int line, int col) {
  FileValue v;
  v.line = line;
  v.col = col;
  std::string t = trim(text);
  if (t.empty()) throw ParseError("empty value", line, col);
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"')
      throw ParseError("unterminated string", line, col);
    v.kind = FileValue::String;
    v.str = t.substr(1, t.size() - 2);
    return v;
  }
  if (std::isalpha(static_cast<unsigned char>(t.front())) || t.front() == '_') {
    // Bare identifier (coordinate names in arrays).
    for (char c : t)
      if (!ident_char(c))
        throw ParseError("malformed identifier '" + t + "'", line, col);
    v.kind = FileValue::String;
    v.str = t;
    return v;
  }
  try {
    std::size_t used = 0;
    double d = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    v.kind = FileValue::Number;
    v.num = d;
    char* end = nullptr;
    long long asint = std::strtoll(t.c_str(), &end, 10);
    if (end && *end == '\0') {
      v.num_is_int = true;
      v.num_int = asint;
    }
    return v;
  } catch (const std::exception&) {
    throw ParseError("malformed value '" + t + "'", line, col);
  }
}

FileValue parse_value(const std::string& text, int line, int col) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[') {
    if (t.back() != ']') throw ParseError("unterminated array", line, col);
    FileValue v;
    v.kind = FileValue::Array;
    v.line = line;
    v.col = col;
    std::string inner = t.substr(1, t.size() - 2);
    std::string item;
    int depth = 0;
    bool in_str = false;
    for (char c : inner) {
      if (c == '"') in_str = !in_str;
      if (!in_str && c == '[') ++depth;
      if (!in_str && c == ']') --depth;
      if (!in_str && depth == 0 && c == ',') {
        if (!trim(item).empty()) v.items.push_back(parse_scalar(item, line, col));
        item.clear();
      } else {
        item += c;
      }
    }
    if (!trim(item).empty()) v.items.push_back(parse_scalar(item, line, col));
    return v;
  }
  return parse_scalar(t, line, col);
}

Sections parse_sections(const std::string& text) {
  Sections out;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  std::string current;
  while (std::getline(is, raw)) {
    ++lineno;
    // Strip comments outside quotes.
    std::string line;
    bool in_str = false;
    for (char c : raw) {
      if (c == '"') in_str = !in_str;
      if (c == '#' && !in_str) break;
      line += c;
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError("malformed section header", lineno, 1);
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty())
        throw ParseError("empty section name", lineno, 1);
      out.emplace_back(current, std::vector<FileEntry>{});
      continue;
    }
    if (current.empty())
      throw ParseError("entry outside of any section", lineno, 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value'", lineno, 1);
    std::string keytext = trim(line.substr(0, eq));
    if (keytext.empty()) throw ParseError("empty key", lineno, 1);
    FileEntry entry;
    entry.line = lineno;
    entry.col = 1;
    std::string part;
    for (char c : keytext) {
      if (c == '.') {
        if (part.empty()) throw ParseError("malformed dotted key", lineno, 1);
        entry.key.push_back(part);
        part.clear();
      } else if (ident_char(c)) {
        part += c;
      } else {
        throw ParseError("malformed key '" + keytext + "'", lineno, 1);
      }
    }
    if (part.empty()) throw ParseError("malformed dotted key", lineno, 1);
    entry.key.push_back(part);
    entry.value = parse_value(line.substr(eq + 1),
                              lineno, static_cast<int>(eq) + 2);
    out.back().second.push_back(std::move(entry));
  }
  return out;
}

const std::vector<FileEntry>* find_section(const Sections& s,
                                           const std::string& name) {
  for (const auto& [k, v] : s)
    if (k == name) return &v;
  return nullptr;
}

} // namespace

std::map<std::string, std::vector<std::string>> ProblemFile::opaque_map() const {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [name, args] : functions) out.emplace(name, args);
  return out;
}

ProblemFile parse_problem(const std::string& text) {
  Sections sections = parse_sections(text);
  ProblemFile pf;

  const auto* chart = find_section(sections, "chart");
  if (!chart) throw MissingComponent("missing [chart] section");
  std::map<std::string, std::pair<double, double>> boxes;
  for (const auto& e : *chart) {
    if (e.key.size() == 1 && e.key[0] == "coords") {
      if (e.value.kind != FileValue::Array)
        throw ParseError("coords must be an array of names", e.line, e.col);
      for (const auto& item : e.value.items) {
        if (item.kind != FileValue::String)
          throw ParseError("coords must be an array of names", e.line, e.col);
        pf.coords.push_back(item.str);
      }
    } else if (e.key.size() == 2 && e.key[0] == "box") {
      if (e.value.kind != FileValue::Array || e.value.items.size() != 2 ||
          e.value.items[0].kind != FileValue::Number ||
          e.value.items[1].kind != FileValue::Number)
        throw ParseError("box entries look like box.x = [lo, hi]", e.line, e.col);
      boxes[e.key[1]] = {e.value.items[0].num, e.value.items[1].num};
    } else {
      throw ParseError("unknown chart entry", e.line, e.col);
    }
  }
  if (pf.coords.size() < 2)
    throw ParseError("chart needs at least two coordinates", 1, 1);
  for (const auto& c : pf.coords) {
    auto it = boxes.find(c);
    pf.boxes.push_back(it != boxes.end() ? it->second
                                         : std::make_pair(0.25, 1.25));
  }
  for (const auto& [name, box] : boxes)
    if (std::find(pf.coords.begin(), pf.coords.end(), name) == pf.coords.end())
      throw UndeclaredSymbol("box for undeclared coordinate '" + name + "'", 1, 1);

  // Functions come before metric parsing so expressions can reference them.
  if (const auto* fns = find_section(sections, "functions")) {
    for (const auto& e : *fns) {
      if (e.key.size() != 1 || e.value.kind != FileValue::Array)
        throw ParseError("function declarations look like Name = [x, y]",
                         e.line, e.col);
      std::vector<std::string> args;
      for (const auto& item : e.value.items) {
        if (item.kind != FileValue::String)
          throw ParseError("function arguments must be coordinate names",
                           e.line, e.col);
        if (std::find(pf.coords.begin(), pf.coords.end(), item.str) ==
            pf.coords.end())
          throw UndeclaredSymbol(
              "function argument '" + item.str + "' is not a coordinate",
              e.line, e.col);
        args.push_back(item.str);
      }
      pf.functions.emplace_back(e.key[0], std::move(args));
    }
  }
  auto opaques = pf.opaque_map();

  auto coord_index = [&](const std::string& name, int line, int col) {
    for (std::size_t i = 0; i < pf.coords.size(); ++i)
      if (pf.coords[i] == name) return static_cast<int>(i);
    throw UndeclaredSymbol("unknown coordinate '" + name + "'", line, col);
  };

  auto read_component_table =
      [&](const std::vector<FileEntry>& entries, const std::string& prefix,
          std::map<std::pair<int, int>, std::string>& text_out,
          std::map<std::pair<int, int>, Expr>& expr_out) {
        for (const auto& e : entries) {
          if (e.key.size() != 3 || e.key[0] != prefix) continue;
          const int i = coord_index(e.key[1], e.line, e.col);
          const int j = coord_index(e.key[2], e.line, e.col);
          auto key = std::minmax(i, j);
          if (e.value.kind != FileValue::String)
            throw ParseError("components must be quoted expressions", e.line,
                             e.col);
          Expr parsed =
              parse_expression(e.value.str, pf.coords, opaques, e.line, e.col);
          auto found = text_out.find({key.first, key.second});
          if (found != text_out.end()) {
            if (found->second != e.value.str)
              throw ParseError("conflicting duplicate component", e.line, e.col);
            continue;
          }
          text_out[{key.first, key.second}] = e.value.str;
          expr_out[{key.first, key.second}] = parsed;
        }
      };

  const auto* metric = find_section(sections, "metric");
  if (!metric) throw MissingComponent("missing [metric] section");
  for (const auto& e : *metric)
    if (e.key.size() != 3 || e.key[0] != "g")
      throw ParseError("metric entries look like g.a.b = \"...\"", e.line, e.col);
  read_component_table(*metric, "g", pf.metric_text, pf.metric_expr);
  {
    std::string missing;
    for (std::size_t i = 0; i < pf.coords.size(); ++i)
      for (std::size_t j = i; j < pf.coords.size(); ++j)
        if (!pf.metric_text.count({static_cast<int>(i), static_cast<int>(j)}))
          missing += " g." + pf.coords[i] + "." + pf.coords[j];
    if (!missing.empty())
      throw MissingComponent("metric components missing:" + missing);
  }

  const auto* proj = find_section(sections, "projector");
  if (!proj) throw MissingComponent("missing [projector] section");
  for (const auto& e : *proj) {
    if (e.key.size() == 1 && e.key[0] == "block") {
      if (e.value.kind != FileValue::Array)
        throw ParseError("block must be an array of coordinate names", e.line,
                         e.col);
      for (const auto& item : e.value.items) {
        if (item.kind != FileValue::String)
          throw ParseError("block must be an array of coordinate names",
                           e.line, e.col);
        coord_index(item.str, e.line, e.col);
        pf.projector_block.push_back(item.str);
      }
    } else if (e.key.size() == 3 && e.key[0] == "P") {
      // handled below
    } else {
      throw ParseError("projector entries are 'block = [...]' or P.a.b = \"...\"",
                       e.line, e.col);
    }
  }
  read_component_table(*proj, "P", pf.projector_text, pf.projector_expr);
  if (pf.projector_block.empty() && pf.projector_text.empty())
    throw MissingComponent("projector section declares neither a block nor components");
  if (!pf.projector_block.empty() && !pf.projector_text.empty())
    throw ParseError("projector declares both a block and components", 1, 1);
  if (!pf.projector_text.empty()) {
    std::string missing;
    for (std::size_t i = 0; i < pf.coords.size(); ++i)
      for (std::size_t j = i; j < pf.coords.size(); ++j)
        if (!pf.projector_text.count({static_cast<int>(i), static_cast<int>(j)}))
          missing += " P." + pf.coords[i] + "." + pf.coords[j];
    if (!missing.empty())
      throw MissingComponent("projector components missing:" + missing);
  }

  if (const auto* settings = find_section(sections, "settings")) {
    for (const auto& e : *settings) {
      if (e.key.size() != 1)
        throw ParseError("unknown settings entry", e.line, e.col);
      if (e.key[0] == "seed") {
        if (e.value.kind != FileValue::Number || !e.value.num_is_int ||
            e.value.num_int < 0)
          throw ParseError("seed must be a non-negative integer", e.line, e.col);
        pf.settings.seed = static_cast<std::uint64_t>(e.value.num_int);
      } else if (e.key[0] == "samples") {
        if (e.value.kind != FileValue::Number || !e.value.num_is_int ||
            e.value.num_int < 1)
          throw ParseError("samples must be a positive integer", e.line, e.col);
        pf.settings.samples = static_cast<int>(e.value.num_int);
      } else if (e.key[0] == "tol") {
        if (e.value.kind != FileValue::Number || !(e.value.num > 0))
          throw ParseError("tol must be positive", e.line, e.col);
        pf.settings.tol = e.value.num;
      } else {
        throw ParseError("unknown settings entry '" + e.key[0] + "'", e.line,
                         e.col);
      }
    }
  }
  return pf;
}

bool operator==(const ProblemFile& a, const ProblemFile& b) {
  auto expr_maps_equal = [](const std::map<std::pair<int, int>, Expr>& x,
                            const std::map<std::pair<int, int>, Expr>& y) {
    if (x.size() != y.size()) return false;
    for (const auto& [k, v] : x) {
      auto it = y.find(k);
      if (it == y.end() || !(v == it->second)) return false;
    }
    return true;
  };
  return a.coords == b.coords && a.boxes == b.boxes &&
         expr_maps_equal(a.metric_expr, b.metric_expr) &&
         a.projector_block == b.projector_block &&
         expr_maps_equal(a.projector_expr, b.projector_expr) &&
         a.functions == b.functions && a.settings.seed == b.settings.seed &&
         a.settings.samples == b.settings.samples &&
         a.settings.tol == b.settings.tol;
}

std::string serialize_problem(const ProblemFile& pf) {
  std::ostringstream os;
  os << "[chart]\n";
  os << "coords = [";
  for (std::size_t i = 0; i < pf.coords.size(); ++i)
    os << (i ? ", " : "") << pf.coords[i];
  os << "]\n";
  os.precision(17);
  for (std::size_t i = 0; i < pf.coords.size(); ++i)
    os << "box." << pf.coords[i] << " = [" << pf.boxes[i].first << ", "
       << pf.boxes[i].second << "]\n";
  if (!pf.functions.empty()) {
    os << "\n[functions]\n";
    for (const auto& [name, args] : pf.functions) {
      os << name << " = [";
      for (std::size_t i = 0; i < args.size(); ++i)
        os << (i ? ", " : "") << args[i];
      os << "]\n";
    }
  }
  os << "\n[metric]\n";
  for (const auto& [key, text] : pf.metric_text)
    os << "g." << pf.coords[static_cast<std::size_t>(key.first)] << "."
       << pf.coords[static_cast<std::size_t>(key.second)] << " = \"" << text
       << "\"\n";
  os << "\n[projector]\n";
  if (!pf.projector_block.empty()) {
    os << "block = [";
    for (std::size_t i = 0; i < pf.projector_block.size(); ++i)
      os << (i ? ", " : "") << pf.projector_block[i];
    os << "]\n";
  } else {
    for (const auto& [key, text] : pf.projector_text)
      os << "P." << pf.coords[static_cast<std::size_t>(key.first)] << "."
         << pf.coords[static_cast<std::size_t>(key.second)] << " = \"" << text
         << "\"\n";
  }
  os << "\n[settings]\n";
  os << "seed = " << pf.settings.seed << "\n";
  os << "samples = " << pf.settings.samples << "\n";
  os << "tol = " << pf.settings.tol << "\n";
  return os.str();
}

BuiltProblem build_problem(const ProblemFile& pf, const SettingsOverride& over) {
  ChartPtr chart = make_chart(pf.coords, pf.boxes);
  EvalContext ctx;
  ctx.chart = chart;
  ctx.seed = over.seed.value_or(pf.settings.seed);
  ctx.samples = over.samples.value_or(pf.settings.samples);
  ctx.tol = over.tol.value_or(pf.settings.tol);
  ZeroTester tester(ctx, /*jets_for_unbound=*/true);

  const int n = chart->dim();
  TensorField g(chart, {Slot::Down, Slot::Down});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto key = std::minmax(i, j);
      g.at({i, j}) = pf.metric_expr.at({key.first, key.second});
    }
  MetricPtr metric = MetricChart::create(chart, g, tester);

  if (pf.uses_block_projector()) {
    ProjectorPair pp =
        ProjectorPair::from_coordinate_block(metric, pf.projector_block, tester);
    return BuiltProblem(chart, metric, std::move(pp), std::move(ctx),
                        std::move(tester));
  }
  TensorField P(chart, {Slot::Down, Slot::Down});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto key = std::minmax(i, j);
      P.at({i, j}) = pf.projector_expr.at({key.first, key.second});
    }
  ProjectorPair pp = ProjectorPair::from_components(metric, P, tester);
  return BuiltProblem(chart, metric, std::move(pp), std::move(ctx),
                      std::move(tester));
}

TransportInput parse_transport_input(const std::string& text, int n) {
  Sections sections = parse_sections(text);
  TransportInput in;
  auto read_vec = [&](const FileEntry& e, std::size_t expect) {
    if (e.value.kind != FileValue::Array || e.value.items.size() != expect)
      throw ParseError("expected an array of " + std::to_string(expect) +
                           " numbers",
                       e.line, e.col);
    std::vector<double> v;
    v.reserve(expect);
    for (const auto& item : e.value.items) {
      if (item.kind != FileValue::Number)
        throw ParseError("expected numbers", e.line, e.col);
      v.push_back(item.num);
    }
    return v;
  };
  const std::size_t un = static_cast<std::size_t>(n);
  in.xi.assign(un, 0.0);
  in.Psi.assign(un * un, 0.0);
  in.phistar.assign(un, 0.0);
  in.phibar.assign(un, 0.0);
  in.chistar.assign(un, 0.0);
  in.chibar.assign(un, 0.0);
  if (const auto* st = find_section(sections, "state")) {
    for (const auto& e : *st) {
      if (e.key.size() != 1) throw ParseError("unknown state entry", e.line, e.col);
      const std::string& k = e.key[0];
      if (k == "xi") in.xi = read_vec(e, un);
      else if (k == "Psi") in.Psi = read_vec(e, un * un);
      else if (k == "phistar") in.phistar = read_vec(e, un);
      else if (k == "phibar") in.phibar = read_vec(e, un);
      else if (k == "chistar") in.chistar = read_vec(e, un);
      else if (k == "chibar") in.chibar = read_vec(e, un);
      else if (k == "phi" || k == "chi") {
        if (e.value.kind != FileValue::Number)
          throw ParseError("expected a number", e.line, e.col);
        (k == "phi" ? in.phi : in.chi) = e.value.num;
      } else {
        throw ParseError("unknown state entry '" + k + "'", e.line, e.col);
      }
    }
  }
  const auto* cv = find_section(sections, "curve");
  if (!cv) throw MissingComponent("missing [curve] section");
  bool have_from = false, have_to = false;
  for (const auto& e : *cv) {
    if (e.key.size() != 1) throw ParseError("unknown curve entry", e.line, e.col);
    const std::string& k = e.key[0];
    if (k == "from") {
      in.from = read_vec(e, un);
      have_from = true;
    } else if (k == "to") {
      in.to = read_vec(e, un);
      have_to = true;
    } else if (k == "h") {
      if (e.value.kind != FileValue::Number || !(e.value.num > 0))
        throw ParseError("h must be positive", e.line, e.col);
      in.h = e.value.num;
    } else {
      throw ParseError("unknown curve entry '" + k + "'", e.line, e.col);
    }
  }
  if (!have_from || !have_to)
    throw MissingComponent("curve needs 'from' and 'to' points");
  return in;
}

} // namespace bicon

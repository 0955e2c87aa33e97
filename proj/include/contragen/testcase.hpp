#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "contragen/ast.hpp"

namespace contragen {

/// Argument of a test statement: a reference to an earlier variable or an
/// immediate literal.
struct TestArg {
  enum class Kind : uint8_t { Var, IntLit, BoolLit, NullLit };
  Kind kind = Kind::NullLit;
  std::string var;
  int64_t int_val = 0;
  bool bool_val = false;

  static TestArg of_var(std::string name) {
    TestArg a;
    a.kind = Kind::Var;
    a.var = std::move(name);
    return a;
  }
  static TestArg of_int(int64_t v) {
    TestArg a;
    a.kind = Kind::IntLit;
    a.int_val = v;
    return a;
  }
  static TestArg of_bool(bool v) {
    TestArg a;
    a.kind = Kind::BoolLit;
    a.bool_val = v;
    return a;
  }
  static TestArg null() { return {}; }

  auto tie() const { return std::tie(kind, var, int_val, bool_val); }
  bool operator==(const TestArg& o) const { return tie() == o.tie(); }
  bool operator<(const TestArg& o) const { return tie() < o.tie(); }
};

/// One statement of a generated test: a construction, a method call on an
/// earlier variable, or a literal assignment.
struct TestStmt {
  enum class Kind : uint8_t { Construct, Call, Literal };
  Kind kind = Kind::Literal;
  std::string var;        // defined variable; empty for void calls
  Type var_type;          // static type of var (Void when var is empty)
  std::string unit;       // Construct: unit name ("" + list_type => new list())
  std::string receiver;   // Call: receiver variable
  std::string method;     // Call: method name
  std::vector<TestArg> args;
  TestArg literal;        // Literal: the assigned value

  auto tie() const {
    return std::tie(kind, var, var_type.kind, var_type.unit, unit, receiver,
                    method, args, literal);
  }
  bool operator==(const TestStmt& o) const { return tie() == o.tie(); }
  bool operator<(const TestStmt& o) const { return tie() < o.tie(); }
};

/// Chromosome of the search: an ordered statement list. The focal contract
/// is assigned at selection/emission time.
struct TestCase {
  std::vector<TestStmt> statements;
  std::string focal_contract;  // empty until assigned

  bool operator==(const TestCase& o) const { return statements == o.statements; }
  /// Canonical ordering used for deterministic tie-breaking.
  bool operator<(const TestCase& o) const { return statements < o.statements; }
};

inline std::string to_string(const TestArg& a) {
  switch (a.kind) {
    case TestArg::Kind::Var: return a.var;
    case TestArg::Kind::IntLit: return std::to_string(a.int_val);
    case TestArg::Kind::BoolLit: return a.bool_val ? "true" : "false";
    case TestArg::Kind::NullLit: return "null";
  }
  return "?";
}

inline std::string to_string(const TestStmt& s) {
  std::string out;
  auto args = [&] {
    std::string t = "(";
    for (size_t i = 0; i < s.args.size(); ++i) {
      if (i) t += ", ";
      t += to_string(s.args[i]);
    }
    return t + ")";
  };
  switch (s.kind) {
    case TestStmt::Kind::Construct:
      out = to_string(s.var_type) + " " + s.var + " = new " +
            (s.unit.empty() ? "list" : s.unit) + args();
      break;
    case TestStmt::Kind::Call:
      if (!s.var.empty()) out = to_string(s.var_type) + " " + s.var + " = ";
      out += s.receiver + "." + s.method + args();
      break;
    case TestStmt::Kind::Literal:
      out = to_string(s.var_type) + " " + s.var + " = " + to_string(s.literal);
      break;
  }
  return out + ";";
}

inline std::string to_string(const TestCase& t) {
  std::string out;
  for (const auto& s : t.statements) {
    out += to_string(s);
    out += '\n';
  }
  return out;
}

}  // namespace contragen

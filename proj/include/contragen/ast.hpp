#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "contragen/diagnostics.hpp"

namespace contragen {

// ---------------------------------------------------------------------------
// Types of the subject language: int, bool, the builtin list, declared units,
// and void as a return type.
// ---------------------------------------------------------------------------

enum class TypeKind { Int, Bool, List, Unit, Void };

struct Type {
  TypeKind kind = TypeKind::Void;
  std::string unit;  // set when kind == Unit

  bool is_reference() const {
    return kind == TypeKind::Unit || kind == TypeKind::List;
  }
  bool operator==(const Type& o) const {
    return kind == o.kind && unit == o.unit;
  }
};

inline Type int_type() { return {TypeKind::Int, {}}; }
inline Type bool_type() { return {TypeKind::Bool, {}}; }
inline Type list_type() { return {TypeKind::List, {}}; }
inline Type unit_type(std::string name) { return {TypeKind::Unit, std::move(name)}; }
inline Type void_type() { return {TypeKind::Void, {}}; }

inline std::string to_string(const Type& t) {
  switch (t.kind) {
    case TypeKind::Int: return "int";
    case TypeKind::Bool: return "bool";
    case TypeKind::List: return "list";
    case TypeKind::Unit: return t.unit;
    case TypeKind::Void: return "void";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Expressions and statements
// ---------------------------------------------------------------------------

enum class BinOp { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnOp { Neg, Not };

inline bool is_comparison(BinOp op) {
  return op == BinOp::Lt || op == BinOp::Le || op == BinOp::Gt ||
         op == BinOp::Ge || op == BinOp::Eq || op == BinOp::Ne;
}

struct SubExpr;
using SubExprPtr = std::unique_ptr<SubExpr>;

struct SubExpr {
  enum class Kind {
    IntLit, BoolLit, NullLit, VarRef, ThisRef,
    FieldGet,    // object.name
    MethodCall,  // object.name(args)
    NewObject,   // new Unit(args)
    NewList,     // new list()
    Unary, Binary
  };

  Kind kind;
  SourcePos pos;
  int64_t int_val = 0;
  bool bool_val = false;
  std::string name;  // var / field / method / unit name
  SubExprPtr object; // receiver of FieldGet/MethodCall, operand of Unary, lhs of Binary
  SubExprPtr rhs;    // rhs of Binary
  std::vector<SubExprPtr> args;
  BinOp bin_op = BinOp::Add;
  UnOp un_op = UnOp::Neg;

  Type type;  // filled in by the static checker
};

struct SubStmt;

struct Block {
  std::vector<SubStmt> stmts;
};

struct SubStmt {
  enum class Kind {
    If,          // if (expr) block [else block]
    Return,      // return [expr];
    Throw,       // throw ExceptionName;
    LocalDecl,   // type name = expr;
    Assign,      // name = expr;
    FieldAssign, // this.name = expr;
    ExprStmt     // expr; (method call)
  };

  Kind kind;
  SourcePos pos;
  SubExprPtr expr;   // condition / return value / initializer / rhs / call
  std::string name;  // local var, field, or exception name
  Type decl_type;
  std::unique_ptr<Block> then_block;
  std::unique_ptr<Block> else_block;  // null when no else
  int branch_id = -1;                 // If only; assigned by the checker
};

// ---------------------------------------------------------------------------
// Declarations
// ---------------------------------------------------------------------------

/// Raw doc comment attached to a method: the text between /** and */ with
/// leading '*' decoration stripped, one entry per line.
struct DocComment {
  SourcePos pos;
  std::vector<std::string> lines;
};

struct Param {
  std::string name;
  Type type;
};

struct MethodDecl {
  std::string name;
  std::string unit_name;
  bool is_ctor = false;
  std::vector<Param> params;
  Type return_type;  // void for ctors
  Block body;
  std::optional<DocComment> doc;
  std::vector<std::string> declared_throws;
  SourcePos pos;

  std::string method_id() const { return unit_name + "." + name; }
};

struct FieldDecl {
  std::string name;
  Type type;
  SourcePos pos;
};

struct UnitDecl {
  std::string name;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;  // ctor included, if declared
  SourcePos pos;

  const FieldDecl* find_field(const std::string& n) const {
    for (const auto& f : fields)
      if (f.name == n) return &f;
    return nullptr;
  }
  const MethodDecl* find_method(const std::string& n) const {
    for (const auto& m : methods)
      if (m.name == n) return &m;
    return nullptr;
  }
  const MethodDecl* find_ctor() const {
    for (const auto& m : methods)
      if (m.is_ctor) return &m;
    return nullptr;
  }
  int field_index(const std::string& n) const {
    for (size_t i = 0; i < fields.size(); ++i)
      if (fields[i].name == n) return static_cast<int>(i);
    return -1;
  }
};

inline const std::set<std::string>& builtin_exceptions() {
  static const std::set<std::string> names = {"NullPointerException",
                                              "ArithmeticException"};
  return names;
}

struct SubjectProgram {
  std::vector<UnitDecl> units;
  std::set<std::string> declared_exceptions;  // user `exception X;` decls
  int branch_count = 0;

  const UnitDecl* find_unit(const std::string& name) const {
    for (const auto& u : units)
      if (u.name == name) return &u;
    return nullptr;
  }
  int unit_index(const std::string& name) const {
    for (size_t i = 0; i < units.size(); ++i)
      if (units[i].name == name) return static_cast<int>(i);
    return -1;
  }
  /// Looks up "Unit.method"; also resolves ctor ids like "Unit.Unit".
  const MethodDecl* find_method(const std::string& method_id) const {
    auto dot = method_id.find('.');
    if (dot == std::string::npos) return nullptr;
    const UnitDecl* u = find_unit(method_id.substr(0, dot));
    return u ? u->find_method(method_id.substr(dot + 1)) : nullptr;
  }
  bool is_exception(const std::string& name) const {
    return declared_exceptions.count(name) > 0 ||
           builtin_exceptions().count(name) > 0;
  }
};

}  // namespace contragen

#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "contragen/ast.hpp"
#include "contragen/lexer.hpp"

namespace contragen {

namespace detail {

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SubjectProgram parse() {
    SubjectProgram prog;
    while (!at(Tok::End)) {
      if (at_kw("exception")) {
        get();
        Token name = expect(Tok::Ident, "exception name");
        expect(Tok::Semi, "';'");
        if (!prog.declared_exceptions.insert(name.text).second ||
            builtin_exceptions().count(name.text))
          throw ParseError(name.pos, "duplicate exception name: " + name.text);
        continue;
      }
      if (at_kw("class")) {
        prog.units.push_back(parse_unit());
        continue;
      }
      throw ParseError(cur().pos, "expected 'class' or 'exception' declaration");
    }
    return prog;
  }

 private:
  UnitDecl parse_unit() {
    UnitDecl unit;
    unit.pos = cur().pos;
    get();  // class
    unit.name = expect(Tok::Ident, "class name").text;
    expect(Tok::LBrace, "'{'");
    while (!at(Tok::RBrace)) {
      std::optional<DocComment> doc;
      if (at(Tok::DocComment)) {
        Token d = get();
        doc = DocComment{d.pos, split_doc_lines(d.text)};
      }
      parse_member(unit, std::move(doc));
    }
    get();  // }
    return unit;
  }

  void parse_member(UnitDecl& unit, std::optional<DocComment> doc) {
    SourcePos start = cur().pos;
    // Constructor: <UnitName> ( ... )
    if (at(Tok::Ident) && cur().text == unit.name && peek(1).kind == Tok::LParen) {
      MethodDecl ctor = parse_method(unit.name, void_type(), get().text, start);
      ctor.is_ctor = true;
      ctor.doc = std::move(doc);
      unit.methods.push_back(std::move(ctor));
      return;
    }
    Type type = parse_type(true);
    Token name = expect(Tok::Ident, "member name");
    if (at(Tok::LParen)) {
      MethodDecl m = parse_method(unit.name, type, name.text, start);
      m.doc = std::move(doc);
      unit.methods.push_back(std::move(m));
      return;
    }
    expect(Tok::Semi, "';' after field");
    if (type.kind == TypeKind::Void)
      throw ParseError(start, "field cannot have type void");
    if (doc)
      throw ParseError(doc->pos, "doc comments attach to methods, not fields");
    unit.fields.push_back(FieldDecl{name.text, type, start});
  }

  MethodDecl parse_method(const std::string& unit_name, Type ret,
                          std::string name, SourcePos pos) {
    MethodDecl m;
    m.unit_name = unit_name;
    m.name = std::move(name);
    m.return_type = ret;
    m.pos = pos;
    expect(Tok::LParen, "'('");
    if (!at(Tok::RParen)) {
      for (;;) {
        Type pt = parse_type(false);
        Token pn = expect(Tok::Ident, "parameter name");
        m.params.push_back(Param{pn.text, pt});
        if (!at(Tok::Comma)) break;
        get();
      }
    }
    expect(Tok::RParen, "')'");
    if (at_kw("throws")) {
      get();
      for (;;) {
        m.declared_throws.push_back(expect(Tok::Ident, "exception name").text);
        if (!at(Tok::Comma)) break;
        get();
      }
    }
    m.body = parse_block();
    return m;
  }

  Type parse_type(bool allow_void) {
    Token t = expect(Tok::Ident, "type");
    if (t.text == "int") return int_type();
    if (t.text == "bool") return bool_type();
    if (t.text == "list") return list_type();
    if (t.text == "void") {
      if (!allow_void) throw ParseError(t.pos, "void not allowed here");
      return void_type();
    }
    return unit_type(t.text);
  }

  Block parse_block() {
    expect(Tok::LBrace, "'{'");
    Block b;
    while (!at(Tok::RBrace)) b.stmts.push_back(parse_stmt());
    get();
    return b;
  }

  SubStmt parse_stmt() {
    SubStmt s;
    s.pos = cur().pos;
    if (at_kw("if")) {
      get();
      expect(Tok::LParen, "'('");
      s.kind = SubStmt::Kind::If;
      s.expr = parse_expr();
      expect(Tok::RParen, "')'");
      s.then_block = std::make_unique<Block>(parse_block());
      if (at_kw("else")) {
        get();
        s.else_block = std::make_unique<Block>(parse_block());
      }
      return s;
    }
    if (at_kw("return")) {
      get();
      s.kind = SubStmt::Kind::Return;
      if (!at(Tok::Semi)) s.expr = parse_expr();
      expect(Tok::Semi, "';'");
      return s;
    }
    if (at_kw("throw")) {
      get();
      s.kind = SubStmt::Kind::Throw;
      s.name = expect(Tok::Ident, "exception name").text;
      expect(Tok::Semi, "';'");
      return s;
    }
    if (at_kw("this") && peek(1).kind == Tok::Dot && peek(2).kind == Tok::Ident &&
        peek(3).kind == Tok::Assign) {
      get(); get();
      s.kind = SubStmt::Kind::FieldAssign;
      s.name = get().text;
      get();  // =
      s.expr = parse_expr();
      expect(Tok::Semi, "';'");
      return s;
    }
    if (at(Tok::Ident) && peek(1).kind == Tok::Ident && peek(2).kind == Tok::Assign) {
      s.kind = SubStmt::Kind::LocalDecl;
      s.decl_type = parse_type(false);
      s.name = get().text;
      get();  // =
      s.expr = parse_expr();
      expect(Tok::Semi, "';'");
      return s;
    }
    if (at(Tok::Ident) && peek(1).kind == Tok::Assign) {
      s.kind = SubStmt::Kind::Assign;
      s.name = get().text;
      get();  // =
      s.expr = parse_expr();
      expect(Tok::Semi, "';'");
      return s;
    }
    s.kind = SubStmt::Kind::ExprStmt;
    s.expr = parse_expr();
    expect(Tok::Semi, "';'");
    return s;
  }

 public:
  SubExprPtr parse_expr() { return parse_or(); }

 private:
  SubExprPtr parse_or() {
    SubExprPtr e = parse_and();
    while (at(Tok::OrOr)) {
      SourcePos p = get().pos;
      e = binary(BinOp::Or, std::move(e), parse_and(), p);
    }
    return e;
  }
  SubExprPtr parse_and() {
    SubExprPtr e = parse_cmp();
    while (at(Tok::AndAnd)) {
      SourcePos p = get().pos;
      e = binary(BinOp::And, std::move(e), parse_cmp(), p);
    }
    return e;
  }
  SubExprPtr parse_cmp() {
    SubExprPtr e = parse_add();
    BinOp op;
    switch (cur().kind) {
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      case Tok::EqEq: op = BinOp::Eq; break;
      case Tok::Ne: op = BinOp::Ne; break;
      default: return e;
    }
    SourcePos p = get().pos;
    return binary(op, std::move(e), parse_add(), p);
  }
  SubExprPtr parse_add() {
    SubExprPtr e = parse_mul();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      BinOp op = at(Tok::Plus) ? BinOp::Add : BinOp::Sub;
      SourcePos p = get().pos;
      e = binary(op, std::move(e), parse_mul(), p);
    }
    return e;
  }
  SubExprPtr parse_mul() {
    SubExprPtr e = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash)) {
      BinOp op = at(Tok::Star) ? BinOp::Mul : BinOp::Div;
      SourcePos p = get().pos;
      e = binary(op, std::move(e), parse_unary(), p);
    }
    return e;
  }
  SubExprPtr parse_unary() {
    if (at(Tok::Minus) || at(Tok::Not)) {
      auto e = std::make_unique<SubExpr>();
      e->kind = SubExpr::Kind::Unary;
      e->un_op = at(Tok::Minus) ? UnOp::Neg : UnOp::Not;
      e->pos = get().pos;
      e->object = parse_unary();
      return e;
    }
    return parse_postfix();
  }
  SubExprPtr parse_postfix() {
    SubExprPtr e = parse_primary();
    while (at(Tok::Dot)) {
      get();
      Token name = expect(Tok::Ident, "member name");
      auto n = std::make_unique<SubExpr>();
      n->pos = name.pos;
      n->name = name.text;
      n->object = std::move(e);
      if (at(Tok::LParen)) {
        get();
        n->kind = SubExpr::Kind::MethodCall;
        if (!at(Tok::RParen)) {
          for (;;) {
            n->args.push_back(parse_expr());
            if (!at(Tok::Comma)) break;
            get();
          }
        }
        expect(Tok::RParen, "')'");
      } else {
        n->kind = SubExpr::Kind::FieldGet;
      }
      e = std::move(n);
    }
    return e;
  }
  SubExprPtr parse_primary() {
    auto e = std::make_unique<SubExpr>();
    e->pos = cur().pos;
    if (at(Tok::Int)) {
      e->kind = SubExpr::Kind::IntLit;
      e->int_val = get().int_val;
      return e;
    }
    if (at(Tok::LParen)) {
      get();
      SubExprPtr inner = parse_expr();
      expect(Tok::RParen, "')'");
      return inner;
    }
    if (at_kw("true") || at_kw("false")) {
      e->kind = SubExpr::Kind::BoolLit;
      e->bool_val = get().text == "true";
      return e;
    }
    if (at_kw("null")) {
      get();
      e->kind = SubExpr::Kind::NullLit;
      return e;
    }
    if (at_kw("this")) {
      get();
      e->kind = SubExpr::Kind::ThisRef;
      return e;
    }
    if (at_kw("new")) {
      get();
      Token name = expect(Tok::Ident, "type after 'new'");
      expect(Tok::LParen, "'('");
      if (name.text == "list") {
        expect(Tok::RParen, "')'");
        e->kind = SubExpr::Kind::NewList;
        return e;
      }
      e->kind = SubExpr::Kind::NewObject;
      e->name = name.text;
      if (!at(Tok::RParen)) {
        for (;;) {
          e->args.push_back(parse_expr());
          if (!at(Tok::Comma)) break;
          get();
        }
      }
      expect(Tok::RParen, "')'");
      return e;
    }
    if (at(Tok::Ident)) {
      e->kind = SubExpr::Kind::VarRef;
      e->name = get().text;
      return e;
    }
    throw ParseError(cur().pos, "expected expression");
  }

  static SubExprPtr binary(BinOp op, SubExprPtr lhs, SubExprPtr rhs, SourcePos pos) {
    auto e = std::make_unique<SubExpr>();
    e->kind = SubExpr::Kind::Binary;
    e->bin_op = op;
    e->pos = pos;
    e->object = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  static std::vector<std::string> split_doc_lines(const std::string& body) {
    std::vector<std::string> lines;
    std::string line;
    auto flush = [&] {
      size_t b = line.find_first_not_of(" \t");
      if (b == std::string::npos) {
        lines.push_back("");
        line.clear();
        return;
      }
      if (line[b] == '*') ++b;  // strip decoration
      if (b < line.size() && line[b] == ' ') ++b;
      lines.push_back(line.substr(b));
      line.clear();
    };
    for (char c : body) {
      if (c == '\n') flush();
      else line += c;
    }
    flush();
    return lines;
  }

  const Token& cur() const { return toks_[i_]; }
  const Token& peek(size_t n) const {
    return toks_[std::min(i_ + n, toks_.size() - 1)];
  }
  Token get() { return toks_[i_++]; }
  bool at(Tok k) const { return cur().kind == k; }
  bool at_kw(const char* kw) const {
    return cur().kind == Tok::Ident && cur().text == kw;
  }
  Token expect(Tok k, const char* what) {
    if (!at(k)) throw ParseError(cur().pos, std::string("expected ") + what);
    return get();
  }

  std::vector<Token> toks_;
  size_t i_ = 0;
};

// ---------------------------------------------------------------------------
// Static checker: name resolution, typing, branch-id assignment.
// ---------------------------------------------------------------------------

class Checker {
 public:
  explicit Checker(SubjectProgram& prog) : prog_(prog) {}

  void run() {
    std::set<std::string> unit_names;
    for (const auto& u : prog_.units) {
      if (!unit_names.insert(u.name).second)
        throw ParseError(u.pos, "duplicate unit name: " + u.name);
      if (prog_.is_exception(u.name))
        throw ParseError(u.pos, "unit name collides with exception: " + u.name);
    }
    for (auto& u : prog_.units) check_unit(u);
  }

 private:
  void check_unit(UnitDecl& unit) {
    std::set<std::string> members;
    for (const auto& f : unit.fields) {
      if (!members.insert(f.name).second)
        throw ParseError(f.pos, "duplicate member name: " + f.name);
      resolve_type(f.type, f.pos);
    }
    for (auto& m : unit.methods) {
      if (!members.insert(m.name).second)
        throw ParseError(m.pos, "duplicate member name: " + m.name);
      check_method(unit, m);
    }
  }

  void check_method(const UnitDecl& unit, MethodDecl& m) {
    resolve_type(m.return_type, m.pos);
    std::set<std::string> param_names;
    Scope scope;
    for (const auto& p : m.params) {
      if (!param_names.insert(p.name).second)
        throw ParseError(m.pos, "duplicate parameter name: " + p.name);
      resolve_type(p.type, m.pos);
      scope.push_back({p.name, p.type});
    }
    for (const std::string& ex : m.declared_throws)
      if (!prog_.is_exception(ex))
        throw ParseError(m.pos, "undeclared exception in throws: " + ex);
    bool returns = check_block(unit, m, m.body, scope);
    if (m.return_type.kind != TypeKind::Void && !returns)
      throw ParseError(m.pos, "method " + m.method_id() +
                                  " may complete without returning a value");
  }

  using Scope = std::vector<std::pair<std::string, Type>>;

  const Type* lookup(const Scope& scope, const std::string& name) const {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  // Returns true when the block is guaranteed to return or throw.
  bool check_block(const UnitDecl& unit, const MethodDecl& m, Block& b,
                   Scope scope) {
    bool terminated = false;
    for (auto& s : b.stmts) terminated = check_stmt(unit, m, s, scope) || terminated;
    return terminated;
  }

  bool check_stmt(const UnitDecl& unit, const MethodDecl& m, SubStmt& s,
                  Scope& scope) {
    switch (s.kind) {
      case SubStmt::Kind::If: {
        Type t = check_expr(unit, *s.expr, scope);
        require(t == bool_type(), s.pos, "if condition must be bool");
        s.branch_id = prog_.branch_count++;
        bool then_term = check_block(unit, m, *s.then_block, scope);
        bool else_term =
            s.else_block ? check_block(unit, m, *s.else_block, scope) : false;
        return then_term && else_term;
      }
      case SubStmt::Kind::Return: {
        if (m.return_type.kind == TypeKind::Void) {
          require(!s.expr, s.pos, "void method cannot return a value");
        } else {
          require(static_cast<bool>(s.expr), s.pos, "missing return value");
          Type t = check_expr(unit, *s.expr, scope);
          require(assignable(m.return_type, t), s.pos,
                  "return type mismatch: expected " + to_string(m.return_type) +
                      ", got " + to_string(t));
        }
        return true;
      }
      case SubStmt::Kind::Throw:
        require(prog_.is_exception(s.name), s.pos,
                "unresolved exception type: " + s.name);
        return true;
      case SubStmt::Kind::LocalDecl: {
        require(lookup(scope, s.name) == nullptr, s.pos,
                "duplicate variable name: " + s.name);
        resolve_type(s.decl_type, s.pos);
        Type t = check_expr(unit, *s.expr, scope);
        require(assignable(s.decl_type, t), s.pos,
                "cannot initialize " + to_string(s.decl_type) + " from " +
                    to_string(t));
        scope.push_back({s.name, s.decl_type});
        return false;
      }
      case SubStmt::Kind::Assign: {
        const Type* t = lookup(scope, s.name);
        require(t != nullptr, s.pos, "unknown variable: " + s.name);
        Type v = check_expr(unit, *s.expr, scope);
        require(assignable(*t, v), s.pos,
                "cannot assign " + to_string(v) + " to " + to_string(*t));
        return false;
      }
      case SubStmt::Kind::FieldAssign: {
        const FieldDecl* f = unit.find_field(s.name);
        require(f != nullptr, s.pos, "unknown field: " + s.name);
        Type v = check_expr(unit, *s.expr, scope);
        require(assignable(f->type, v), s.pos,
                "cannot assign " + to_string(v) + " to field " + s.name);
        return false;
      }
      case SubStmt::Kind::ExprStmt: {
        require(s.expr->kind == SubExpr::Kind::MethodCall ||
                    s.expr->kind == SubExpr::Kind::NewObject,
                s.pos, "only calls may be used as statements");
        check_expr(unit, *s.expr, scope);
        return false;
      }
    }
    return false;
  }

  Type check_expr(const UnitDecl& unit, SubExpr& e, const Scope& scope) {
    switch (e.kind) {
      case SubExpr::Kind::IntLit: return e.type = int_type();
      case SubExpr::Kind::BoolLit: return e.type = bool_type();
      case SubExpr::Kind::NullLit: return e.type = null_type();
      case SubExpr::Kind::ThisRef: return e.type = unit_type(unit.name);
      case SubExpr::Kind::NewList: return e.type = list_type();
      case SubExpr::Kind::VarRef: {
        const Type* t = lookup(scope, e.name);
        require(t != nullptr, e.pos, "unknown variable: " + e.name);
        return e.type = *t;
      }
      case SubExpr::Kind::FieldGet: {
        Type obj = check_expr(unit, *e.object, scope);
        require(obj.kind == TypeKind::Unit && !obj.unit.empty(), e.pos,
                "field access on non-object type " + to_string(obj));
        const UnitDecl* u = prog_.find_unit(obj.unit);
        const FieldDecl* f = u->find_field(e.name);
        require(f != nullptr, e.pos,
                "unknown field " + e.name + " on " + obj.unit);
        return e.type = f->type;
      }
      case SubExpr::Kind::MethodCall: {
        Type obj = check_expr(unit, *e.object, scope);
        std::vector<Type> args;
        for (auto& a : e.args) args.push_back(check_expr(unit, *a, scope));
        if (obj.kind == TypeKind::List) return e.type = check_list_call(e, args);
        require(obj.kind == TypeKind::Unit && !obj.unit.empty(), e.pos,
                "method call on non-object type " + to_string(obj));
        const UnitDecl* u = prog_.find_unit(obj.unit);
        const MethodDecl* callee = u->find_method(e.name);
        require(callee != nullptr && !callee->is_ctor, e.pos,
                "unknown method " + e.name + " on " + obj.unit);
        check_args(e, callee->params, args);
        return e.type = callee->return_type;
      }
      case SubExpr::Kind::NewObject: {
        const UnitDecl* u = prog_.find_unit(e.name);
        require(u != nullptr, e.pos, "unresolved type: " + e.name);
        std::vector<Type> args;
        for (auto& a : e.args) args.push_back(check_expr(unit, *a, scope));
        if (const MethodDecl* ctor = u->find_ctor()) {
          check_args(e, ctor->params, args);
        } else {
          require(args.empty(), e.pos, e.name + " has no constructor arguments");
        }
        return e.type = unit_type(e.name);
      }
      case SubExpr::Kind::Unary: {
        Type t = check_expr(unit, *e.object, scope);
        if (e.un_op == UnOp::Neg) {
          require(t == int_type(), e.pos, "unary '-' needs int");
          return e.type = int_type();
        }
        require(t == bool_type(), e.pos, "'!' needs bool");
        return e.type = bool_type();
      }
      case SubExpr::Kind::Binary: {
        Type l = check_expr(unit, *e.object, scope);
        Type r = check_expr(unit, *e.rhs, scope);
        switch (e.bin_op) {
          case BinOp::Add: case BinOp::Sub: case BinOp::Mul: case BinOp::Div:
            require(l == int_type() && r == int_type(), e.pos,
                    "arithmetic needs int operands");
            return e.type = int_type();
          case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
            require(l == int_type() && r == int_type(), e.pos,
                    "ordering comparison needs int operands");
            return e.type = bool_type();
          case BinOp::Eq: case BinOp::Ne:
            require(comparable(l, r), e.pos,
                    "cannot compare " + to_string(l) + " and " + to_string(r));
            return e.type = bool_type();
          case BinOp::And: case BinOp::Or:
            require(l == bool_type() && r == bool_type(), e.pos,
                    "logical operator needs bool operands");
            return e.type = bool_type();
        }
        return e.type = bool_type();
      }
    }
    throw ParseError(e.pos, "unreachable expression kind");
  }

  Type check_list_call(SubExpr& e, const std::vector<Type>& args) {
    if (e.name == "size") {
      require(args.empty(), e.pos, "size() takes no arguments");
      return int_type();
    }
    if (e.name == "add" || e.name == "contains") {
      require(args.size() == 1 && args[0].kind != TypeKind::Void, e.pos,
              e.name + "() takes one value argument");
      return bool_type();
    }
    throw ParseError(e.pos, "unknown list method: " + e.name);
  }

  void check_args(const SubExpr& e, const std::vector<Param>& params,
                  const std::vector<Type>& args) {
    require(args.size() == params.size(), e.pos,
            "expected " + std::to_string(params.size()) + " arguments, got " +
                std::to_string(args.size()));
    for (size_t i = 0; i < args.size(); ++i)
      require(assignable(params[i].type, args[i]), e.pos,
              "argument " + std::to_string(i + 1) + ": cannot pass " +
                  to_string(args[i]) + " as " + to_string(params[i].type));
  }

  // The null literal types as a unit reference with an empty unit name.
  static Type null_type() { return Type{TypeKind::Unit, ""}; }
  static bool is_null(const Type& t) {
    return t.kind == TypeKind::Unit && t.unit.empty();
  }
  static bool assignable(const Type& target, const Type& value) {
    if (target == value) return true;
    return target.is_reference() && is_null(value);
  }
  static bool comparable(const Type& a, const Type& b) {
    if (a == b && a.kind != TypeKind::Void) return true;
    if (a.is_reference() && (b.is_reference() || is_null(b))) return true;
    if (b.is_reference() && is_null(a)) return true;
    return is_null(a) && is_null(b);
  }

  void resolve_type(const Type& t, SourcePos pos) const {
    if (t.kind == TypeKind::Unit && prog_.find_unit(t.unit) == nullptr)
      throw ParseError(pos, "unresolved type: " + t.unit);
  }

  static void require(bool cond, SourcePos pos, const std::string& msg) {
    if (!cond) throw ParseError(pos, msg);
  }

  SubjectProgram& prog_;
};

}  // namespace detail

/// Parses and statically checks a subject-language source.
/// Throws ParseError on syntax errors, duplicate names and unresolved types.
inline SubjectProgram parse_program(const std::string& source) {
  detail::Parser parser(Lexer(source).run());
  SubjectProgram prog = parser.parse();
  detail::Checker(prog).run();
  return prog;
}

}  // namespace contragen

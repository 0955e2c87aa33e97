#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "contragen/ast.hpp"
#include "contragen/testcase.hpp"
#include "contragen/value.hpp"

namespace contragen {

constexpr int64_t kDefaultStepBudget = 100000;
constexpr int64_t kGuardStepBudget = 10000;

/// Pre-call state of one method invocation plus its outcome.
struct CallRecord {
  std::string method_id;
  int depth = 0;  // 0 = invoked directly by a test statement
  int snapshot_id = -1;

  // Pre-call deep snapshot of receiver + arguments (instrumented methods).
  bool has_snapshot = false;
  Heap snapshot;
  Value receiver;            // snapshot coordinates when has_snapshot
  std::vector<Value> args;   // snapshot coordinates when has_snapshot

  enum class Outcome : uint8_t { Returned, Threw } outcome = Outcome::Returned;
  std::string exception;  // when Threw
  bool has_ret = false;   // false for void returns and for Threw
  Value ret;
};

struct BranchRecord {
  int branch_id = -1;
  bool taken_true = false;
  double dist_true = 0;   // raw distance to making the condition true
  double dist_false = 0;  // raw distance to making it false
};

struct ExecutionTrace {
  enum class Halt : uint8_t { Normal, StepBudget, Fault };
  std::vector<CallRecord> calls;
  std::vector<BranchRecord> branches;
  Halt halt = Halt::Normal;
  std::string fault_message;
  int64_t steps_used = 0;
};

/// Outcome of a direct method invocation (used for guard predicates and
/// by enumeration oracles).
struct CallOutcome {
  enum class Status : uint8_t { Returned, Threw, Halted };
  Status status = Status::Returned;
  std::string exception;
  bool has_ret = false;
  Value ret;
};

struct Snapshot {
  Heap heap;
  Value receiver;
  std::vector<Value> args;
};

/// Deep-copies receiver and arguments into a private heap, preserving
/// sharing, so guards and preconditions can be evaluated on pre-call state.
inline Snapshot snapshot_state(const Heap& heap, Value receiver,
                               const std::vector<Value>& args) {
  Snapshot snap;
  std::vector<Value> roots;
  roots.push_back(receiver);
  for (const Value& a : args) roots.push_back(a);
  std::vector<Value> mapped = copy_closure(heap, roots, snap.heap);
  snap.receiver = mapped[0];
  snap.args.assign(mapped.begin() + 1, mapped.end());
  return snap;
}

/// Tree-walking interpreter. One instance per execution; instances share
/// no mutable state, so executions may run concurrently as long as each
/// owns its trace and heap.
class Interpreter {
 public:
  Interpreter(const SubjectProgram& prog, int64_t step_budget)
      : prog_(prog), budget_(step_budget) {}

  Heap& heap() { return heap_; }

  /// Runs a test case. A statement whose call throws poisons its variable;
  /// later statements that depend on it are skipped, independent ones run.
  ExecutionTrace execute(const TestCase& test,
                         const std::set<std::string>& instrument) {
    instrument_ = &instrument;
    trace_ = ExecutionTrace{};
    try {
      for (const TestStmt& stmt : test.statements) exec_test_stmt(stmt);
    } catch (const BudgetExceeded&) {
      trace_.halt = ExecutionTrace::Halt::StepBudget;
    } catch (const SubjectThrow&) {
      // Unreachable: statement-level throws are handled per statement.
      trace_.halt = ExecutionTrace::Halt::Fault;
      trace_.fault_message = "unhandled subject exception";
    } catch (const std::exception& e) {
      trace_.halt = ExecutionTrace::Halt::Fault;
      trace_.fault_message = e.what();
    }
    trace_.steps_used = steps_;
    return std::move(trace_);
  }

  /// Directly invokes a method on this interpreter's heap. Used for guard
  /// predicates on snapshots and for enumeration over small input spaces.
  CallOutcome invoke(const MethodDecl& method, Value receiver,
                     const std::vector<Value>& args) {
    CallOutcome out;
    try {
      Value ret;
      bool has_ret = call_method(method, receiver, args, &ret);
      out.status = CallOutcome::Status::Returned;
      out.has_ret = has_ret;
      if (has_ret) out.ret = ret;
    } catch (const SubjectThrow& t) {
      out.status = CallOutcome::Status::Threw;
      out.exception = t.name;
    } catch (const BudgetExceeded&) {
      out.status = CallOutcome::Status::Halted;
    }
    return out;
  }

 private:
  struct SubjectThrow {
    std::string name;
  };
  struct BudgetExceeded {};

  struct Frame {
    const UnitDecl* unit = nullptr;
    Value self;
    std::vector<std::pair<std::string, Value>> locals;

    Value* find(const std::string& name) {
      for (auto it = locals.rbegin(); it != locals.rend(); ++it)
        if (it->first == name) return &it->second;
      return nullptr;
    }
  };

  void step() {
    if (++steps_ > budget_) throw BudgetExceeded{};
  }

  // ---- test statements ------------------------------------------------

  void exec_test_stmt(const TestStmt& stmt) {
    // Dependency check: any poisoned operand skips the statement.
    auto poisoned = [&](const TestArg& a) {
      return a.kind == TestArg::Kind::Var && poisoned_.count(a.var) > 0;
    };
    bool skip = false;
    for (const TestArg& a : stmt.args) skip = skip || poisoned(a);
    if (stmt.kind == TestStmt::Kind::Call && poisoned_.count(stmt.receiver))
      skip = true;
    if (skip) {
      if (!stmt.var.empty()) poisoned_.insert(stmt.var);
      return;
    }

    switch (stmt.kind) {
      case TestStmt::Kind::Literal:
        define_var(stmt, arg_value(stmt.literal));
        return;
      case TestStmt::Kind::Construct: {
        if (stmt.unit.empty()) {  // new list()
          define_var(stmt, Value::ref(heap_.alloc_list()));
          return;
        }
        const UnitDecl* unit = prog_.find_unit(stmt.unit);
        CG_CHECK(unit != nullptr, "construct of unknown unit " + stmt.unit);
        Value obj = Value::ref(heap_.alloc_unit(*unit));
        const MethodDecl* ctor = unit->find_ctor();
        if (ctor != nullptr) {
          std::vector<Value> args;
          for (const TestArg& a : stmt.args) args.push_back(arg_value(a));
          try {
            traced_call(*ctor, obj, args);
          } catch (const SubjectThrow&) {
            poisoned_.insert(stmt.var);
            return;
          }
        }
        define_var(stmt, obj);
        return;
      }
      case TestStmt::Kind::Call: {
        auto it = vars_.find(stmt.receiver);
        CG_CHECK(it != vars_.end(), "call on undefined var " + stmt.receiver);
        Value recv = it->second;
        std::vector<Value> args;
        for (const TestArg& a : stmt.args) args.push_back(arg_value(a));
        const MethodDecl* method = resolve_method(recv, stmt.receiver, stmt.method);
        try {
          Value ret;
          bool has_ret = traced_call(*method, recv, args, &ret);
          if (!stmt.var.empty())
            define_var(stmt, has_ret ? ret : Value::null());
        } catch (const SubjectThrow&) {
          if (!stmt.var.empty()) poisoned_.insert(stmt.var);
        }
        return;
      }
    }
  }

  Value arg_value(const TestArg& a) {
    switch (a.kind) {
      case TestArg::Kind::Var: {
        auto it = vars_.find(a.var);
        CG_CHECK(it != vars_.end(), "undefined var " + a.var);
        return it->second;
      }
      case TestArg::Kind::IntLit: return Value::of_int(a.int_val);
      case TestArg::Kind::BoolLit: return Value::of_bool(a.bool_val);
      case TestArg::Kind::NullLit: return Value::null();
    }
    return Value::null();
  }

  void define_var(const TestStmt& stmt, Value v) {
    vars_[stmt.var] = v;
    var_types_[stmt.var] = stmt.var_type;
  }

  const MethodDecl* resolve_method(Value receiver, const std::string& recv_var,
                                   const std::string& method) {
    // Dynamic type when available; for null receivers fall back to the
    // variable's declared type so the call record carries the right id.
    if (receiver.kind == Value::Kind::Ref) {
      const HeapObject& obj = heap_.at(receiver.payload);
      if (!obj.is_list()) {
        const UnitDecl* u = prog_.find_unit(obj.unit);
        const MethodDecl* m = u ? u->find_method(method) : nullptr;
        CG_CHECK(m != nullptr, "unknown method " + method + " on " + obj.unit);
        return m;
      }
    }
    auto ty = var_types_.find(recv_var);
    if (ty != var_types_.end() && ty->second.kind == TypeKind::Unit) {
      const UnitDecl* u = prog_.find_unit(ty->second.unit);
      if (const MethodDecl* m = u ? u->find_method(method) : nullptr) return m;
    }
    for (const auto& u : prog_.units)
      if (const MethodDecl* m = u.find_method(method)) return m;
    throw AssertionError("cannot resolve method " + method + " on " + recv_var);
  }

  // ---- method invocation ----------------------------------------------

  /// Invokes a declared method, appending a call record. Null receivers
  /// yield a NullPointerException outcome without entering the body.
  bool traced_call(const MethodDecl& method, Value receiver,
                   const std::vector<Value>& args, Value* ret = nullptr) {
    size_t rec_index = trace_.calls.size();
    {
      CallRecord rec;
      rec.method_id = method.method_id();
      rec.depth = call_depth_;
      rec.snapshot_id = static_cast<int>(rec_index);
      if (instrument_ && instrument_->count(rec.method_id)) {
        Snapshot snap = snapshot_state(heap_, receiver, args);
        rec.has_snapshot = true;
        rec.snapshot = std::move(snap.heap);
        rec.receiver = snap.receiver;
        rec.args = std::move(snap.args);
      } else {
        rec.receiver = receiver;
        rec.args = args;
      }
      trace_.calls.push_back(std::move(rec));
    }
    ++call_depth_;
    try {
      if (receiver.is_null() && !method.is_ctor)
        throw SubjectThrow{"NullPointerException"};
      Value r;
      bool has = call_method(method, receiver, args, &r);
      --call_depth_;
      CallRecord& rec = trace_.calls[rec_index];
      rec.outcome = CallRecord::Outcome::Returned;
      rec.has_ret = has;
      if (has) rec.ret = r;
      if (ret != nullptr && has) *ret = r;
      return has;
    } catch (const SubjectThrow& t) {
      --call_depth_;
      CallRecord& rec = trace_.calls[rec_index];
      rec.outcome = CallRecord::Outcome::Threw;
      rec.exception = t.name;
      throw;
    } catch (...) {
      --call_depth_;
      throw;
    }
  }

  /// Runs a method body. Returns true when a value was returned.
  bool call_method(const MethodDecl& method, Value receiver,
                   const std::vector<Value>& args, Value* ret) {
    step();
    CG_CHECK(args.size() == method.params.size(),
             "arity mismatch calling " + method.method_id());
    Frame frame;
    frame.unit = prog_.find_unit(method.unit_name);
    frame.self = receiver;
    for (size_t i = 0; i < args.size(); ++i)
      frame.locals.emplace_back(method.params[i].name, args[i]);
    Value r;
    Flow flow = exec_block(method.body, frame, &r);
    if (flow == Flow::Returned && method.return_type.kind != TypeKind::Void) {
      if (ret != nullptr) *ret = r;
      return true;
    }
    return false;
  }

  enum class Flow { Normal, Returned };

  Flow exec_block(const Block& block, Frame& frame, Value* ret) {
    size_t scope_mark = frame.locals.size();
    for (const SubStmt& s : block.stmts) {
      if (exec_stmt(s, frame, ret) == Flow::Returned) {
        frame.locals.resize(scope_mark);
        return Flow::Returned;
      }
    }
    frame.locals.resize(scope_mark);
    return Flow::Normal;
  }

  Flow exec_stmt(const SubStmt& s, Frame& frame, Value* ret) {
    step();
    switch (s.kind) {
      case SubStmt::Kind::If: {
        bool cond = eval_branch(s, frame);
        if (cond) return exec_block(*s.then_block, frame, ret);
        if (s.else_block) return exec_block(*s.else_block, frame, ret);
        return Flow::Normal;
      }
      case SubStmt::Kind::Return:
        if (s.expr) *ret = eval(*s.expr, frame);
        return Flow::Returned;
      case SubStmt::Kind::Throw:
        throw SubjectThrow{s.name};
      case SubStmt::Kind::LocalDecl:
        frame.locals.emplace_back(s.name, eval(*s.expr, frame));
        return Flow::Normal;
      case SubStmt::Kind::Assign: {
        Value v = eval(*s.expr, frame);
        Value* slot = frame.find(s.name);
        CG_CHECK(slot != nullptr, "unbound local " + s.name);
        *slot = v;
        return Flow::Normal;
      }
      case SubStmt::Kind::FieldAssign: {
        Value v = eval(*s.expr, frame);
        CG_CHECK(!frame.self.is_null(), "field assign on null this");
        HeapObject& obj = heap_.at(frame.self.payload);
        int idx = frame.unit->field_index(s.name);
        CG_CHECK(idx >= 0, "unknown field " + s.name);
        obj.fields[static_cast<size_t>(idx)] = v;
        return Flow::Normal;
      }
      case SubStmt::Kind::ExprStmt:
        eval(*s.expr, frame);
        return Flow::Normal;
    }
    return Flow::Normal;
  }

  /// Evaluates an if condition, recording the branch outcome with raw
  /// distances for both directions.
  bool eval_branch(const SubStmt& s, Frame& frame) {
    const SubExpr& cond = *s.expr;
    BranchRecord rec;
    rec.branch_id = s.branch_id;
    bool value;
    if (cond.kind == SubExpr::Kind::Binary && is_comparison(cond.bin_op) &&
        cond.object->type == int_type()) {
      Value a = eval(*cond.object, frame);
      Value b = eval(*cond.rhs, frame);
      double da = static_cast<double>(a.as_int());
      double db = static_cast<double>(b.as_int());
      value = compare_ints(cond.bin_op, a.as_int(), b.as_int());
      rec.dist_true = value ? 0 : comparison_distance(cond.bin_op, da, db);
      rec.dist_false = value ? comparison_distance(negate_op(cond.bin_op), da, db) : 0;
    } else {
      value = eval(cond, frame).as_bool();
      rec.dist_true = value ? 0 : 1;
      rec.dist_false = value ? 1 : 0;
    }
    rec.taken_true = value;
    trace_.branches.push_back(rec);
    return value;
  }

  static bool compare_ints(BinOp op, int64_t a, int64_t b) {
    switch (op) {
      case BinOp::Lt: return a < b;
      case BinOp::Le: return a <= b;
      case BinOp::Gt: return a > b;
      case BinOp::Ge: return a >= b;
      case BinOp::Eq: return a == b;
      case BinOp::Ne: return a != b;
      default: return false;
    }
  }

  /// Raw distance until `a op b` turns true (standard branch distance,
  /// with the +1 offset for strict comparisons and disequality).
  static double comparison_distance(BinOp op, double a, double b) {
    switch (op) {
      case BinOp::Lt: return a < b ? 0 : a - b + 1;
      case BinOp::Le: return a <= b ? 0 : a - b;
      case BinOp::Gt: return a > b ? 0 : b - a + 1;
      case BinOp::Ge: return a >= b ? 0 : b - a;
      case BinOp::Eq: return std::fabs(a - b);
      case BinOp::Ne: return a != b ? 0 : 1;
      default: return 1;
    }
  }

  static BinOp negate_op(BinOp op) {
    switch (op) {
      case BinOp::Lt: return BinOp::Ge;
      case BinOp::Le: return BinOp::Gt;
      case BinOp::Gt: return BinOp::Le;
      case BinOp::Ge: return BinOp::Lt;
      case BinOp::Eq: return BinOp::Ne;
      case BinOp::Ne: return BinOp::Eq;
      default: return op;
    }
  }

  Value eval(const SubExpr& e, Frame& frame) {
    step();
    switch (e.kind) {
      case SubExpr::Kind::IntLit: return Value::of_int(e.int_val);
      case SubExpr::Kind::BoolLit: return Value::of_bool(e.bool_val);
      case SubExpr::Kind::NullLit: return Value::null();
      case SubExpr::Kind::ThisRef: return frame.self;
      case SubExpr::Kind::NewList: return Value::ref(heap_.alloc_list());
      case SubExpr::Kind::VarRef: {
        Value* slot = frame.find(e.name);
        CG_CHECK(slot != nullptr, "unbound variable " + e.name);
        return *slot;
      }
      case SubExpr::Kind::FieldGet: {
        Value obj = eval(*e.object, frame);
        if (obj.is_null()) throw SubjectThrow{"NullPointerException"};
        const HeapObject& ho = heap_.at(obj.payload);
        const UnitDecl* u = prog_.find_unit(ho.unit);
        int idx = u->field_index(e.name);
        CG_CHECK(idx >= 0, "unknown field " + e.name);
        return ho.fields[static_cast<size_t>(idx)];
      }
      case SubExpr::Kind::MethodCall: {
        Value obj = eval(*e.object, frame);
        std::vector<Value> args;
        args.reserve(e.args.size());
        for (const auto& a : e.args) args.push_back(eval(*a, frame));
        if (obj.is_null()) throw SubjectThrow{"NullPointerException"};
        HeapObject& ho = heap_.at(obj.payload);
        if (ho.is_list()) return list_call(ho, e.name, args);
        const UnitDecl* u = prog_.find_unit(ho.unit);
        const MethodDecl* m = u->find_method(e.name);
        CG_CHECK(m != nullptr, "unknown method " + e.name);
        Value ret = Value::null();
        traced_call(*m, obj, args, &ret);
        return ret;
      }
      case SubExpr::Kind::NewObject: {
        const UnitDecl* u = prog_.find_unit(e.name);
        CG_CHECK(u != nullptr, "unknown unit " + e.name);
        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(eval(*a, frame));
        Value obj = Value::ref(heap_.alloc_unit(*u));
        if (const MethodDecl* ctor = u->find_ctor())
          traced_call(*ctor, obj, args, depth_hint_ + 1);
        return obj;
      }
      case SubExpr::Kind::Unary: {
        Value v = eval(*e.object, frame);
        if (e.un_op == UnOp::Neg)
          return Value::of_int(-static_cast<uint64_t>(v.as_int()));
        return Value::of_bool(!v.as_bool());
      }
      case SubExpr::Kind::Binary: {
        if (e.bin_op == BinOp::And) {
          Value l = eval(*e.object, frame);
          if (!l.as_bool()) return Value::of_bool(false);
          return Value::of_bool(eval(*e.rhs, frame).as_bool());
        }
        if (e.bin_op == BinOp::Or) {
          Value l = eval(*e.object, frame);
          if (l.as_bool()) return Value::of_bool(true);
          return Value::of_bool(eval(*e.rhs, frame).as_bool());
        }
        Value l = eval(*e.object, frame);
        Value r = eval(*e.rhs, frame);
        switch (e.bin_op) {
          case BinOp::Add:
            return Value::of_int(static_cast<int64_t>(
                static_cast<uint64_t>(l.as_int()) + static_cast<uint64_t>(r.as_int())));
          case BinOp::Sub:
            return Value::of_int(static_cast<int64_t>(
                static_cast<uint64_t>(l.as_int()) - static_cast<uint64_t>(r.as_int())));
          case BinOp::Mul:
            return Value::of_int(static_cast<int64_t>(
                static_cast<uint64_t>(l.as_int()) * static_cast<uint64_t>(r.as_int())));
          case BinOp::Div:
            if (r.as_int() == 0) throw SubjectThrow{"ArithmeticException"};
            if (l.as_int() == INT64_MIN && r.as_int() == -1)
              return Value::of_int(INT64_MIN);
            return Value::of_int(l.as_int() / r.as_int());
          case BinOp::Eq: return Value::of_bool(l == r);
          case BinOp::Ne: return Value::of_bool(!(l == r));
          default:
            return Value::of_bool(compare_ints(e.bin_op, l.as_int(), r.as_int()));
        }
      }
    }
    throw AssertionError("unreachable expression kind");
  }

  Value list_call(HeapObject& list, const std::string& method,
                  const std::vector<Value>& args) {
    if (method == "size") return Value::of_int(static_cast<int64_t>(list.items.size()));
    if (method == "add") {
      list.items.push_back(args.at(0));
      return Value::of_bool(true);
    }
    if (method == "contains") {
      for (const Value& v : list.items)
        if (v == args.at(0)) return Value::of_bool(true);
      return Value::of_bool(false);
    }
    throw AssertionError("unknown list method " + method);
  }

  const SubjectProgram& prog_;
  int64_t budget_;
  int64_t steps_ = 0;
  Heap heap_;
  ExecutionTrace trace_;
  const std::set<std::string>* instrument_ = nullptr;
  std::map<std::string, Value> vars_;
  std::set<std::string> poisoned_;
  int depth_hint_ = 0;
};

/// Executes a test against a program with the given step budget; methods
/// in `instrument` get pre-call snapshots in their call records.
inline ExecutionTrace execute_test(const SubjectProgram& prog,
                                   const TestCase& test,
                                   int64_t step_budget = kDefaultStepBudget,
                                   const std::set<std::string>& instrument = {}) {
  Interpreter interp(prog, step_budget);
  return interp.execute(test, instrument);
}

}  // namespace contragen

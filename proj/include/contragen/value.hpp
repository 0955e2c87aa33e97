#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "contragen/ast.hpp"

namespace contragen {

/// Runtime value: 64-bit int, bool, or a reference (heap index or null).
/// Reference equality is identity; null compares equal only to null.
struct Value {
  enum class Kind : uint8_t { Null, Int, Bool, Ref };
  Kind kind = Kind::Null;
  int64_t payload = 0;  // int value, bool 0/1, or heap index

  static Value null() { return {}; }
  static Value of_int(int64_t v) { return {Kind::Int, v}; }
  static Value of_bool(bool v) { return {Kind::Bool, v ? 1 : 0}; }
  static Value ref(int64_t heap_index) { return {Kind::Ref, heap_index}; }

  bool is_null() const { return kind == Kind::Null; }
  bool as_bool() const { return payload != 0; }
  int64_t as_int() const { return payload; }

  bool operator==(const Value& o) const {
    return kind == o.kind && payload == o.payload;
  }
};

/// Heap object: a unit instance (field slots) or a builtin list.
struct HeapObject {
  std::string unit;          // empty for builtin lists
  std::vector<Value> fields; // unit instances: one slot per declared field
  std::vector<Value> items;  // lists only
  bool is_list() const { return unit.empty(); }
};

struct Heap {
  std::vector<HeapObject> objects;

  int64_t alloc_unit(const UnitDecl& decl) {
    HeapObject obj;
    obj.unit = decl.name;
    obj.fields.assign(decl.fields.size(), Value::null());
    for (size_t i = 0; i < decl.fields.size(); ++i) {
      if (decl.fields[i].type.kind == TypeKind::Int)
        obj.fields[i] = Value::of_int(0);
      else if (decl.fields[i].type.kind == TypeKind::Bool)
        obj.fields[i] = Value::of_bool(false);
    }
    objects.push_back(std::move(obj));
    return static_cast<int64_t>(objects.size()) - 1;
  }
  int64_t alloc_list() {
    objects.emplace_back();
    return static_cast<int64_t>(objects.size()) - 1;
  }
  HeapObject& at(int64_t i) { return objects[static_cast<size_t>(i)]; }
  const HeapObject& at(int64_t i) const { return objects[static_cast<size_t>(i)]; }
};

/// Deep copy of the closure reachable from `roots` into `dst`, preserving
/// sharing and cycles. Returns the remapped root values.
inline std::vector<Value> copy_closure(const Heap& src,
                                       const std::vector<Value>& roots,
                                       Heap& dst) {
  std::map<int64_t, int64_t> remap;
  // Two passes: allocate shells first so cycles resolve, then fill.
  std::vector<int64_t> worklist;
  auto discover = [&](Value v) {
    if (v.kind == Value::Kind::Ref && !remap.count(v.payload)) {
      dst.objects.emplace_back();
      remap[v.payload] = static_cast<int64_t>(dst.objects.size()) - 1;
      worklist.push_back(v.payload);
    }
  };
  for (const Value& r : roots) discover(r);
  for (size_t w = 0; w < worklist.size(); ++w) {
    const HeapObject& obj = src.at(worklist[w]);
    for (const Value& v : obj.fields) discover(v);
    for (const Value& v : obj.items) discover(v);
  }
  auto translate = [&](Value v) {
    return v.kind == Value::Kind::Ref ? Value::ref(remap.at(v.payload)) : v;
  };
  for (int64_t src_idx : worklist) {
    const HeapObject& from = src.at(src_idx);
    HeapObject& to = dst.at(remap.at(src_idx));
    to.unit = from.unit;
    to.fields.reserve(from.fields.size());
    for (const Value& v : from.fields) to.fields.push_back(translate(v));
    to.items.reserve(from.items.size());
    for (const Value& v : from.items) to.items.push_back(translate(v));
  }
  std::vector<Value> out;
  out.reserve(roots.size());
  for (const Value& r : roots) out.push_back(translate(r));
  return out;
}

}  // namespace contragen

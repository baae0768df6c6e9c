// SPDX-License-Identifier: Apache-2.0
#include "aggregate_oracle.hpp"

#include <limits>
#include <map>
#include <sstream>

#include "bcv/corpus.hpp"
#include "bcv/error.hpp"
#include "bcv/lift.hpp"
#include "bcv/spec.hpp"

namespace bcv::testing {

namespace {

using O = Opcode;

// Slots 0-3 are parameters a, b, p, q; 4-5 hold ints, 6-7 booleans.
constexpr int kIntParams[] = {0, 1};
constexpr int kBoolParams[] = {2, 3};

class Gen {
 public:
  Gen(Rng& rng, int max_depth) : r_(rng), max_depth_(max_depth) {}

  CodePlan run(bool returns_bool) {
    int stores = r_.uniform(0, 4);
    for (int k = 0; k < stores; ++k) {
      bool as_bool = r_.chance(0.5);
      int slot = as_bool ? 6 + r_.uniform(0, 1) : 4 + r_.uniform(0, 1);
      if (as_bool)
        bool_expr(depth());
      else
        int_expr(depth());
      cb_.istore(slot);
      assigned_[slot] = true;
    }
    if (returns_bool)
      bool_expr(depth());
    else
      int_expr(depth());
    cb_.op(O::IRETURN);
    return cb_.build();
  }

 private:
  int depth() { return r_.uniform(1, max_depth_); }

  int pick_slot(const int (&params)[2], int first_local) {
    std::vector<int> slots(std::begin(params), std::end(params));
    for (int s : {first_local, first_local + 1})
      if (assigned_[s]) slots.push_back(s);
    return r_.pick(slots);
  }

  void call(const char* owner, const char* name, const char* desc) { cb_.invokestatic(ns_.owner(owner), name, desc); }

  void int_expr(int d) {
    if (d <= 1 || r_.chance(0.25)) {
      switch (r_.uniform(0, 3)) {
        case 0: cb_.iconst(r_.uniform(-3, 5)); break;
        case 1: cb_.iconst(r_.pick(std::vector<int>{std::numeric_limits<int>::max(), std::numeric_limits<int>::min(), 65536})); break;
        default: cb_.iload(pick_slot(kIntParams, 4));
      }
      return;
    }
    switch (r_.uniform(0, 4)) {
      case 0:
        int_expr(d - 1);
        cb_.op(O::INEG);
        return;
      case 1:
        bool_expr(d - 1);
        int_expr(d - 1);
        int_expr(d - 1);
        call("Special", "conditional", "(ZII)I");
        return;
      default:
        int_expr(d - 1);
        int_expr(d - 1);
        cb_.op(r_.pick(std::vector<O>{O::IADD, O::ISUB, O::IMUL}));
    }
  }

  void bool_expr(int d) {
    if (d <= 1 || r_.chance(0.25)) {
      if (r_.chance(0.2))
        cb_.iconst(r_.uniform(0, 1));
      else
        cb_.iload(pick_slot(kBoolParams, 6));
      return;
    }
    switch (r_.uniform(0, 6)) {
      case 0:
      case 1:
        int_expr(d - 1);
        int_expr(d - 1);
        call("Operator", r_.pick(std::vector<const char*>{"eq", "neq", "lt", "lte", "gt", "gte"}), "(II)Z");
        return;
      case 2:
        bool_expr(d - 1);
        bool_expr(d - 1);
        call("Operator", r_.pick(std::vector<const char*>{"eq", "neq", "implies"}), "(ZZ)Z");
        return;
      case 3:
        bool_expr(d - 1);
        call("Operator", "not", "(Z)Z");
        return;
      case 4:
        bool_expr(d - 1);
        bool_expr(d - 1);
        bool_expr(d - 1);
        call("Special", "conditional", "(ZZZ)Z");
        return;
      default:
        bool_expr(d - 1);
        bool_expr(d - 1);
        cb_.op(r_.pick(std::vector<O>{O::IAND, O::IOR, O::IXOR}));
    }
  }

  Rng& r_;
  int max_depth_;
  spec::Namespace ns_;
  CodeBuilder cb_;
  std::map<int, bool> assigned_;
};

// Lifted bodies of the contract library, keyed by owner.name+descriptor.
class Library {
 public:
  Library() {
    for (const ClassPlan& plan : corpus::spec_library()) {
      ClassFile cf = parse_class(build_class(plan));
      for (const MethodInfo& m : cf.methods)
        bodies_.emplace(key(cf.this_class, m.name, m.descriptor.text()), infer_expected_types(simulate_stack(m, cf.this_class)));
    }
  }

  const grimp::Body* find(const MemberRef& m) const {
    auto it = bodies_.find(key(m.owner, m.name, m.descriptor));
    return it == bodies_.end() ? nullptr : &it->second;
  }

 private:
  static std::string key(const std::string& o, const std::string& n, const std::string& d) { return o + "." + n + d; }
  std::map<std::string, grimp::Body> bodies_;
};

const Library& library() {
  static const Library lib;
  return lib;
}

std::int32_t random_int(Rng& rng) {
  switch (rng.uniform(0, 3)) {
    case 0: return rng.uniform(-4, 4);
    case 1: return rng.pick(std::vector<std::int32_t>{std::numeric_limits<std::int32_t>::max(), std::numeric_limits<std::int32_t>::min()});
    default: return rng.uniform(std::numeric_limits<std::int32_t>::min(), std::numeric_limits<std::int32_t>::max());
  }
}

int count_nodes(const grimp::Expr& e) {
  int n = 1;
  for (const auto& c : e.args) n += count_nodes(c);
  return n;
}

}  // namespace

ClassPlan random_aggregable_class(Rng& rng, int index, int max_depth) {
  bool returns_bool = rng.chance(0.7);
  ClassPlan p;
  p.name = "oracle/Aggregable" + std::to_string(index);
  MethodPlan m;
  m.name = "f";
  m.descriptor = returns_bool ? kAggregableBool : kAggregableInt;
  Gen g(rng, max_depth);
  m.code = g.run(returns_bool);
  p.methods.push_back(std::move(m));
  return p;
}

std::optional<std::string> check_random_aggregate(Rng& rng, int index, int inputs, AggregateOracleStats& stats) {
  ClassPlan plan = random_aggregable_class(rng, index);
  ClassFile cf = parse_class(build_class(plan));
  grimp::Body body;
  spec::Aggregate agg;
  spec::Context ctx;
  ctx.is_pure = [](const MemberRef&) { return false; };
  try {
    body = infer_expected_types(simulate_stack(cf.methods.at(0), cf.this_class));
    agg = spec::aggregate(body, ctx);
  } catch (const Error& e) {
    return "body " + std::to_string(index) + ": " + e.what() + "\n" + grimp::to_string(body);
  }
  ++stats.bodies;
  stats.max_nodes = std::max(stats.max_nodes, count_nodes(agg.expr));
  for (int k = 0; k < inputs; ++k) {
    std::vector<interp::Value> args = {interp::Value::of_int(random_int(rng)), interp::Value::of_int(random_int(rng)),
                                       interp::Value::of_int(rng.uniform(0, 1)), interp::Value::of_int(rng.uniform(0, 1))};
    interp::TestHeap heap;
    heap.resolve = [](const MemberRef& m, const std::string&) { return library().find(m); };
    interp::TestHeap scratch = heap;
    interp::Value want = interp::eval_grimp(body, args, heap);
    interp::Value got = spec::evaluate(agg, args, scratch);
    ++stats.runs;
    if (!(want == got)) {
      std::ostringstream os;
      os << "body " << index << " input " << k << ": eval_grimp " << interp::to_string(want) << ", aggregate "
         << interp::to_string(got) << "\n"
         << grimp::to_string(body);
      return os.str();
    }
  }
  return std::nullopt;
}

}  // namespace bcv::testing

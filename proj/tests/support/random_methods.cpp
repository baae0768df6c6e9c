// SPDX-License-Identifier: Apache-2.0
#include "random_methods.hpp"

#include <limits>

namespace bcv::testing {

namespace {

using O = Opcode;
using Label = CodeBuilder::Label;

// Local slots.
constexpr int kA = 0, kB = 1, kC = 2, kArr = 3, kW = 4, kX = 6, kY = 7, kZ = 8, kFlag = 9, kI = 10, kJ = 11, kV = 12;

class Gen {
 public:
  explicit Gen(Rng& rng) : r_(rng) {}

  CodePlan run() {
    for (int s : {kX, kY, kZ, kFlag, kI, kJ}) cb_.iconst(0).istore(s);
    cb_.lconst(0).lstore(kV);
    block(3, 0);
    int_expr(3);
    cb_.op(O::IRETURN);
    if (r_.chance(0.5)) cb_.local_name(kX, "x", "I");
    if (r_.chance(0.5)) cb_.local_name(kFlag, "flag", "Z");
    if (r_.chance(0.3)) cb_.local_name(kV, "v", "J");
    return cb_.build();
  }

 private:
  static O flip(O op) {
    switch (op) {
      case O::IFEQ: return O::IFNE;
      case O::IFNE: return O::IFEQ;
      case O::IFLT: return O::IFGE;
      case O::IFGE: return O::IFLT;
      case O::IFGT: return O::IFLE;
      case O::IFLE: return O::IFGT;
      case O::IF_ICMPEQ: return O::IF_ICMPNE;
      case O::IF_ICMPNE: return O::IF_ICMPEQ;
      case O::IF_ICMPLT: return O::IF_ICMPGE;
      case O::IF_ICMPGE: return O::IF_ICMPLT;
      case O::IF_ICMPGT: return O::IF_ICMPLE;
      case O::IF_ICMPLE: return O::IF_ICMPGT;
      case O::IFNULL: return O::IFNONNULL;
      default: return O::IFNULL;
    }
  }

  O pick_if() { return static_cast<O>(static_cast<int>(O::IFEQ) + r_.uniform(0, 5)); }
  O pick_icmp() { return static_cast<O>(static_cast<int>(O::IF_ICMPEQ) + r_.uniform(0, 5)); }
  int pick_int_local() { return r_.pick(std::vector<int>{kA, kB, kX, kY, kZ, kI, kJ}); }
  int pick_target() { return r_.pick(std::vector<int>{kX, kY, kZ}); }

  void int_leaf() {
    switch (r_.uniform(0, 6)) {
      case 0: cb_.iconst(r_.uniform(-1, 5)); break;
      case 1: cb_.iconst(r_.uniform(-300, 300)); break;
      case 2: cb_.iconst(static_cast<std::int32_t>(r_.engine()())); break;
      case 3: cb_.iload(r_.chance(0.5) ? kC : kFlag); break;
      case 4: cb_.aload(kArr).op(O::ARRAYLENGTH); break;
      default: cb_.iload(pick_int_local()); break;
    }
  }

  void int_expr(int d) {
    if (d <= 0 || r_.chance(0.3)) {
      int_leaf();
      return;
    }
    switch (r_.uniform(0, 11)) {
      case 0: case 1: case 2: {
        static const std::vector<O> ops = {O::IADD, O::IADD, O::ISUB, O::IMUL, O::IAND, O::IOR,
                                           O::IXOR, O::ISHL, O::ISHR, O::IUSHR, O::IDIV, O::IREM};
        int_expr(d - 1);
        int_expr(d - 1);
        cb_.op(r_.pick(ops));
        break;
      }
      case 3:
        int_expr(d - 1);
        cb_.op(r_.pick(std::vector<O>{O::INEG, O::I2B, O::I2C, O::I2S}));
        break;
      case 4:
        cb_.aload(kArr);
        int_expr(d - 1);
        cb_.iconst(3).op(O::IAND).op(O::IALOAD);
        break;
      case 5: {
        Label yes = cb_.new_label();
        Label done = cb_.new_label();
        cond(yes, true, d - 1);
        int_expr(d - 1);
        cb_.go(done).bind(yes);
        int_expr(d - 1);
        cb_.bind(done);
        break;
      }
      case 6:
        long_expr(d - 1);
        cb_.op(O::L2I);
        break;
      case 7:
        long_expr(d - 1);
        long_expr(d - 1);
        cb_.op(O::LCMP);
        break;
      case 8:
        int_expr(d - 1);
        int_expr(d - 1);
        cb_.op(O::SWAP).op(O::ISUB);
        break;
      case 9:
        int_expr(d - 1);
        cb_.op(O::DUP).istore(pick_target());
        break;
      case 10:
      {
        // x + (cond ? e1 : e2): an operand stays on the stack across the branch
        Label yes = cb_.new_label();
        Label done = cb_.new_label();
        int_expr(d - 1);
        cond(yes, true, d - 1);
        int_expr(d - 1);
        cb_.go(done).bind(yes);
        int_expr(d - 1);
        cb_.bind(done).op(O::IADD);
        break;
      }
      default:
        int_expr(d - 1);
        long_expr(d - 1);
        cb_.op(O::L2I).op(O::IADD);
        break;
    }
  }

  void long_expr(int d) {
    if (d <= 0 || r_.chance(0.35)) {
      switch (r_.uniform(0, 4)) {
        case 0: cb_.lconst(r_.uniform(0, 1)); break;
        case 1: cb_.lconst(static_cast<std::int64_t>(r_.engine()()) >> r_.uniform(0, 60)); break;
        case 2: cb_.lload(kW); break;
        case 3: cb_.lload(kV); break;
        default: cb_.iload(pick_int_local()).op(O::I2L); break;
      }
      return;
    }
    switch (r_.uniform(0, 4)) {
      case 0: case 1: {
        static const std::vector<O> ops = {O::LADD, O::LSUB, O::LMUL, O::LAND, O::LOR, O::LXOR, O::LDIV, O::LREM};
        long_expr(d - 1);
        long_expr(d - 1);
        cb_.op(r_.pick(ops));
        break;
      }
      case 2:
        long_expr(d - 1);
        int_expr(d - 1);
        cb_.op(r_.pick(std::vector<O>{O::LSHL, O::LSHR, O::LUSHR}));
        break;
      case 3:
        long_expr(d - 1);
        cb_.op(O::LNEG);
        break;
      default:
        long_expr(d - 1);
        cb_.op(O::DUP2).lstore(kV);
        break;
    }
  }

  // Jumps to `target` when the generated condition equals `when`.
  void cond(Label target, bool when, int d) {
    auto br = [&](O op) { cb_.branch(when ? op : flip(op), target); };
    switch (d <= 0 ? r_.uniform(0, 2) : r_.uniform(0, 7)) {
      case 0:
        cb_.iload(r_.chance(0.5) ? kC : kFlag);
        br(r_.chance(0.5) ? O::IFNE : O::IFEQ);
        break;
      case 1:
        cb_.iload(pick_int_local()).iconst(r_.uniform(-2, 4));
        br(pick_icmp());
        break;
      case 2:
        cb_.aload(kArr);
        br(r_.chance(0.5) ? O::IFNULL : O::IFNONNULL);
        break;
      case 3: case 4:
        int_expr(d - 1);
        int_expr(d - 1);
        br(pick_icmp());
        break;
      case 5:
        int_expr(d - 1);
        br(pick_if());
        break;
      case 6:
        long_expr(d - 1);
        long_expr(d - 1);
        cb_.op(O::LCMP);
        br(pick_if());
        break;
      default: {
        // Short-circuit: && when jumping on true goes through a skip label.
        bool conj = r_.chance(0.5);
        if (conj == when) {
          Label skip = cb_.new_label();
          cond(skip, !when, d - 1);
          cond(target, when, d - 1);
          cb_.bind(skip);
        } else {
          cond(target, when, d - 1);
          cond(target, when, d - 1);
        }
        break;
      }
    }
  }

  void bool_value(int d) {
    switch (d <= 0 ? r_.uniform(0, 1) : r_.uniform(0, 4)) {
      case 0: cb_.iload(r_.chance(0.5) ? kC : kFlag); break;
      case 1: cb_.iconst(r_.uniform(0, 1)); break;
      case 2: case 3: {
        Label yes = cb_.new_label();
        Label done = cb_.new_label();
        cond(yes, true, d - 1);
        cb_.iconst(0).go(done).bind(yes).iconst(1).bind(done);
        break;
      }
      default:
        bool_value(d - 1);
        bool_value(d - 1);
        cb_.op(r_.pick(std::vector<O>{O::IAND, O::IOR, O::IXOR}));
        break;
    }
  }

  void block(int d, int loops) {
    int n = r_.uniform(1, d > 0 ? 4 : 2);
    for (int k = 0; k < n; ++k) stmt(d, loops);
  }

  void stmt(int d, int loops) {
    int kind = d <= 0 ? r_.uniform(0, 8) : r_.uniform(0, 14);
    switch (kind) {
      case 0: case 1:
        int_expr(2);
        cb_.istore(pick_target());
        break;
      case 2:
        int_expr(2);
        cb_.op(O::DUP).istore(pick_target()).istore(pick_target());
        break;
      case 3:
        bool_value(2);
        cb_.istore(kFlag);
        break;
      case 4:
        cb_.iinc(pick_target(), r_.uniform(-3, 3));
        break;
      case 5:
        long_expr(2);
        if (r_.chance(0.5)) {
          cb_.lstore(kV);
        } else {
          cb_.op(O::DUP2).lstore(kV).op(O::L2I).istore(pick_target());
        }
        break;
      case 6:
        cb_.aload(kArr);
        int_expr(1);
        cb_.iconst(3).op(O::IAND);
        int_expr(2);
        cb_.op(O::IASTORE);
        break;
      case 7:
        cb_.aload(kArr).iconst(r_.uniform(0, 3)).op(O::DUP2).op(O::IALOAD);
        int_expr(1);
        cb_.op(O::IADD).op(O::IASTORE);
        break;
      case 8:
        cb_.aload(kArr).iconst(r_.uniform(0, 3));
        int_expr(2);
        cb_.op(O::DUP_X2).op(O::IASTORE).istore(pick_target());
        break;
      case 9: {
        Label skip = cb_.new_label();
        cond(skip, false, 2);
        block(d - 1, loops);
        cb_.bind(skip);
        break;
      }
      case 10: {
        Label other = cb_.new_label();
        Label done = cb_.new_label();
        cond(other, true, 2);
        block(d - 1, loops);
        cb_.go(done).bind(other);
        block(d - 1, loops);
        cb_.bind(done);
        break;
      }
      case 11: {
        if (loops >= 2) {
          cb_.iinc(pick_target(), 1);
          break;
        }
        int counter = loops == 0 ? kI : kJ;
        int bound = r_.uniform(0, 4);
        Label head = cb_.new_label();
        Label exit = cb_.new_label();
        cb_.iconst(0).istore(counter);
        if (r_.chance(0.5)) {
          cb_.bind(head).iload(counter).iconst(bound).branch(O::IF_ICMPGE, exit);
          block(d - 1, loops + 1);
          cb_.iinc(counter, 1).go(head).bind(exit);
        } else {
          cb_.bind(head);
          block(d - 1, loops + 1);
          cb_.iinc(counter, 1).iload(counter).iconst(bound).branch(O::IF_ICMPLT, head);
        }
        break;
      }
      case 12: {
        Label done = cb_.new_label();
        Label dflt = cb_.new_label();
        int cases = r_.uniform(1, 4);
        std::vector<Label> labels;
        for (int k = 0; k < cases; ++k) labels.push_back(cb_.new_label());
        int_expr(1);
        if (r_.chance(0.5)) {
          cb_.tableswitch(dflt, r_.uniform(-1, 2), labels);
        } else {
          std::vector<std::pair<std::int32_t, Label>> pairs;
          int key = r_.uniform(-5, 0);
          for (auto l : labels) {
            key += r_.uniform(1, 4);
            pairs.push_back({key, l});
          }
          cb_.lookupswitch(dflt, pairs);
        }
        for (auto l : labels) {
          cb_.bind(l);
          block(d - 1, loops);
          if (r_.chance(0.8)) cb_.go(done);
        }
        cb_.bind(dflt);
        block(d - 1, loops);
        cb_.bind(done);
        break;
      }
      case 13: {
        Label skip = cb_.new_label();
        cond(skip, false, 1);
        int_expr(2);
        cb_.op(O::IRETURN).bind(skip);
        break;
      }
      default:
        int_expr(2);
        cb_.op(O::POP);
        break;
    }
  }

  Rng& r_;
  CodeBuilder cb_;
};

}  // namespace

ClassPlan random_method_class(Rng& rng, int index) {
  ClassPlan plan;
  plan.name = "gen/R" + std::to_string(index);
  MethodPlan m;
  m.name = "m";
  m.descriptor = kRandomMethodDescriptor;
  m.code = Gen(rng).run();
  plan.methods.push_back(std::move(m));
  return plan;
}

std::vector<interp::Value> random_arguments(Rng& rng, interp::TestHeap& heap) {
  auto small_int = [&] {
    if (rng.chance(0.1)) return static_cast<std::int32_t>(rng.engine()());
    return static_cast<std::int32_t>(rng.uniform(-6, 6));
  };
  std::vector<interp::Value> args;
  args.push_back(interp::Value::of_int(small_int()));
  args.push_back(interp::Value::of_int(small_int()));
  args.push_back(interp::Value::of_int(rng.uniform(0, 1)));
  if (rng.chance(0.05)) {
    args.push_back(interp::Value::null());
  } else {
    int n = rng.chance(0.1) ? rng.uniform(0, 3) : rng.uniform(4, 6);
    interp::Value arr = heap.allocate_array(JType::of(JType::Kind::Int), n);
    for (auto& e : heap.deref(arr).elements) e = interp::Value::of_int(small_int());
    args.push_back(arr);
  }
  args.push_back(interp::Value::of_long(rng.chance(0.2) ? static_cast<std::int64_t>(rng.engine()()) : rng.uniform(-9, 9)));
  return args;
}

}  // namespace bcv::testing

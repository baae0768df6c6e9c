// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <deque>
#include <set>

#include "bcv/encode.hpp"
#include "bcv/error.hpp"
#include "bcv/lift.hpp"
#include "bcv/pipeline.hpp"
#include "bcv/prelude.hpp"

namespace bcv {

namespace b = boogie;

namespace {

struct MethodUnit {
  const MethodInfo* info = nullptr;
  MemberRef ref;
  spec::MethodContracts contracts;
  std::string display;
  std::optional<grimp::Body> body;  // typed
  Cfg cfg;
  std::vector<LoopInfo> loops;
};

struct ClassUnit {
  const ClassFile* cf = nullptr;
  std::vector<MethodUnit> methods;
};

// Prefixes the location unless the error already names the method.
Error locate(const Error& e, const std::string& display) {
  return e.where().starts_with(display) ? e : e.located(display);
}

std::string key(const MemberRef& m) { return m.owner + "." + m.name + m.descriptor; }

std::string to_internal(const std::string& name) {
  return name.find('/') == std::string::npos ? internal_name(name) : name;
}

bool is_object_init(const MemberRef& m) {
  return m.owner == "java/lang/Object" && m.name == "<init>" && m.descriptor == "()V";
}

void collect_refs(const grimp::Body& body, std::set<std::string>& out) {
  auto expr = [&](const grimp::Expr& e) {
    if (e.member && !e.member->owner.empty()) out.insert(e.member->owner);
  };
  for (const auto& s : body.stmts) {
    grimp::for_each_expr(s, expr);
    if (s.lhs && s.lhs->member) out.insert(s.lhs->member->owner);
    if (s.kind == grimp::Stmt::Kind::New) out.insert(s.label);
  }
}

class Pipeline {
 public:
  Pipeline(ClassPath& cp, const Options& opts) : cp_(cp), opts_(opts) {
    spec_package_ = internal_name(opts.ns.prefix) + "/";
    sym_.ns = opts.ns;
    sym_.is_function = [this](const MemberRef& m) { return pure_.count(key(sym_.canonical(m))) != 0; };
    sym_.resolve = [this](const MemberRef& m) { return resolve(m); };
    ctx_.ns = opts.ns;
    ctx_.is_pure = sym_.is_function;
  }

  Translation run(const std::vector<std::string>& entries) {
    b::Program prelude = emit_prelude(opts_.prelude.empty() ? default_prelude_text() : std::string_view(opts_.prelude));
    load_closure(entries);
    for (const auto& [name, unit] : units_) encode::declare_class(*unit.cf, sym_);
    for (auto& [name, unit] : units_) {
      for (auto& m : unit.methods) {
        if (m.contracts.is_specification()) pure_.insert(key(m.ref));
      }
    }

    // Bodies first: frames need every implemented procedure, including
    // the procedure form of specification methods.
    std::map<std::string, b::Decl> procedures;
    std::map<std::string, b::Decl> shadows;
    std::vector<frames::SpecMethod> spec_methods;
    for (auto& [name, unit] : units_) {
      for (auto& m : unit.methods) {
        try {
          encode::ProcedureInput in = input_of(m, !m.contracts.is_specification());
          b::Decl d = encode::translate_procedure(in, sym_);
          if (m.contracts.is_specification()) {
            spec_methods.push_back({d.name, m.display});
            shadows.emplace(d.name, std::move(d));
          } else {
            procedures.emplace(d.name, std::move(d));
          }
        } catch (const Error& e) {
          throw locate(e, m.display);
        }
      }
    }
    add_stubs(procedures);

    b::Program all = prelude;
    for (const auto& [n, d] : procedures) all.decls.push_back(d);
    for (const auto& [n, d] : shadows) all.decls.push_back(d);
    Translation out;
    out.frames = frames::infer_frames(all);
    frames::enforce_purity(spec_methods, out.frames);

    // Specification methods become functions; contracts are inlined.
    std::map<std::string, b::Decl> functions;
    for (auto& [name, unit] : units_) {
      for (auto& m : unit.methods) {
        if (!m.contracts.is_specification() || !m.body) continue;
        const spec::Aggregate& agg = aggregate_of(m.ref);
        if (has_old(agg.expr)) continue;
        try {
          b::Decl f = encode::translate_pure(m.ref, m.contracts.is_static, agg, sym_);
          out.functions.push_back(f.name);
          functions.emplace(f.name, std::move(f));
        } catch (const Error& e) {
          throw locate(e, m.display);
        }
      }
    }
    for (auto& [name, unit] : units_) {
      for (auto& m : unit.methods) {
        if (m.contracts.is_specification()) continue;
        if (m.contracts.preconditions.empty() && m.contracts.postconditions.empty()) continue;
        try {
          encode::ProcedureInput in;
          in.method = m.ref;
          in.is_static = m.contracts.is_static;
          in.params = parameter_names(m);
          for (const auto& p : m.contracts.preconditions) in.preconditions.push_back(aggregate_of(p));
          for (const auto& p : m.contracts.postconditions) in.postconditions.push_back(aggregate_of(p));
          b::Decl c = encode::translate_procedure(in, sym_);
          procedures.at(c.name).specs = std::move(c.specs);
        } catch (const Error& e) {
          throw locate(e, m.display);
        }
      }
    }
    add_stubs(procedures);

    out.program = std::move(prelude);
    for (const auto& t : sym_.types) {
      b::Decl d;
      d.kind = b::Decl::Kind::Const;
      d.name = sym_.mangler.type_const(t);
      d.type = b::Type::named("Type");
      d.unique = true;
      out.program.decls.push_back(std::move(d));
    }
    std::sort(out.program.decls.end() - static_cast<std::ptrdiff_t>(sym_.types.size()), out.program.decls.end(),
              [](const b::Decl& x, const b::Decl& y) { return x.name < y.name; });
    for (const auto& [n, f] : sym_.fields) {
      b::Decl d;
      d.kind = b::Decl::Kind::Const;
      d.name = n;
      d.type = b::Type::named("Field", {encode::translate_type(JType::parse(f.descriptor))});
      out.program.decls.push_back(std::move(d));
    }
    for (auto& [n, f] : functions) out.program.decls.push_back(std::move(f));
    for (auto& [n, p] : procedures) out.program.decls.push_back(std::move(p));
    frames::FrameResult final_frames = frames::infer_frames(out.program);
    for (const auto& [n, f] : final_frames) out.frames[n] = f;
    frames::apply_frames(out.program, out.frames);
    for (auto& d : out.program.decls) {
      if (d.kind == b::Decl::Kind::Procedure && !d.body && !prelude_procs_.count(d.name)) {
        d.specs.push_back({b::Spec::Kind::Modifies, std::nullopt, {std::string(b::kHeap)}});
      }
    }
    for (const auto& [n, u] : units_) out.classes.push_back(n);
    return out;
  }

 private:
  bool in_spec_package(const std::string& internal) const { return internal.starts_with(spec_package_); }

  MemberRef resolve(const MemberRef& m) {
    bool field = m.descriptor.empty() || m.descriptor[0] != '(';
    std::string owner = m.owner;
    for (int depth = 0; depth < 64 && !owner.empty(); ++depth) {
      const ClassFile* cf = cp_.load(owner);
      if (!cf) break;
      bool found = field ? cf->find_field(m.name) != nullptr : cf->find_method(m.name, m.descriptor) != nullptr;
      if (found) return MemberRef{owner, m.name, m.descriptor, m.interface};
      if (!cf->super_class) break;
      owner = *cf->super_class;
    }
    return m;
  }

  void load_closure(const std::vector<std::string>& entries) {
    std::deque<std::string> work;
    for (const auto& e : entries) {
      std::string n = to_internal(e);
      if (!cp_.load(n)) throw Error(ErrorCode::Config, "class not found on the class path", dotted_name(n));
      work.push_back(n);
    }
    std::set<std::string> seen;
    while (!work.empty()) {
      std::string n = work.front();
      work.pop_front();
      if (!seen.insert(n).second || in_spec_package(n)) continue;
      const ClassFile* cf = cp_.load(n);
      if (!cf) continue;
      std::set<std::string> refs;
      if (cf->super_class) refs.insert(*cf->super_class);
      refs.insert(cf->interfaces.begin(), cf->interfaces.end());
      ClassUnit unit{cf, {}};
      std::vector<spec::MethodContracts> contracts;
      contracts = spec::resolve_contracts(*cf, opts_.ns);
      for (std::size_t i = 0; i < cf->methods.size(); ++i) {
        const MethodInfo& mi = cf->methods[i];
        MethodUnit m;
        m.info = &mi;
        m.ref = MemberRef{n, mi.name, mi.descriptor.text(), false};
        m.contracts = contracts[i];
        m.display = dotted_name(n) + "." + mi.name;
        if (mi.code) {
          try {
            grimp::Body raw = simulate_stack(mi, n);
            m.cfg = build_cfg(raw);
            m.loops = detect_loops(m.cfg, raw);
            m.body = infer_expected_types(raw);
          } catch (const Error& e) {
            throw locate(e, m.display);
          }
          collect_refs(*m.body, refs);
        }
        unit.methods.push_back(std::move(m));
      }
      units_.emplace(n, std::move(unit));
      for (const auto& r : refs) {
        if (!r.starts_with('[')) work.push_back(r);
      }
    }
  }

  std::vector<std::string> parameter_names(const MethodUnit& m) const {
    if (m.body) {
      std::vector<std::string> p = m.body->params;
      if (!m.contracts.is_static) p.erase(p.begin());
      return p;
    }
    std::vector<std::string> p;
    for (std::size_t i = 0; i < m.info->descriptor.params.size(); ++i) p.push_back("p" + std::to_string(i));
    return p;
  }

  encode::ProcedureInput input_of(const MethodUnit& m, bool extract) {
    encode::ProcedureInput in;
    in.method = m.ref;
    in.is_static = m.contracts.is_static;
    in.params = parameter_names(m);
    if (!m.body) return in;
    in.cfg = m.cfg;
    in.loops = m.loops;
    in.shadow = !extract;
    if (!extract) {
      in.body = *m.body;
      return in;
    }
    auto checks = spec::extract_inline_checks(*m.body, ctx_);
    auto invariants = spec::extract_loop_invariants(checks.body, m.cfg, m.loops, ctx_);
    in.body = std::move(invariants.body);
    in.invariants = std::move(invariants.by_loop);
    in.checks = std::move(checks.checks);
    return in;
  }

  const spec::Aggregate& aggregate_of(const MemberRef& ref) {
    std::string k = key(ref);
    if (auto it = aggregates_.find(k); it != aggregates_.end()) return it->second;
    const MethodUnit* m = find_unit(ref);
    if (!m || !m->body) {
      throw Error(ErrorCode::NoSuchPredicate, "no implementation for " + dotted_name(ref.owner) + "." + ref.name);
    }
    try {
      return aggregates_.emplace(k, spec::aggregate(*m->body, ctx_)).first->second;
    } catch (const Error& e) {
      throw locate(e, m->display);
    }
  }

  const MethodUnit* find_unit(const MemberRef& ref) const {
    auto it = units_.find(ref.owner);
    if (it == units_.end()) return nullptr;
    for (const auto& m : it->second.methods) {
      if (m.ref == ref) return &m;
    }
    return nullptr;
  }

  static bool has_old(const grimp::Expr& e) {
    bool found = false;
    grimp::for_each_expr(e, [&](const grimp::Expr& x) {
      found = found || (x.kind == grimp::Expr::Kind::Intrinsic && x.intrinsic == grimp::Intrinsic::Old);
    });
    return found;
  }

  // Bodiless procedures for callees outside the translated classes.
  void add_stubs(std::map<std::string, b::Decl>& procedures) {
    for (const auto& [name, callee] : sym_.procedures) {
      if (procedures.count(name)) continue;
      encode::ProcedureInput in;
      in.method = callee.ref;
      in.is_static = callee.is_static;
      auto desc = MethodDescriptor::parse(callee.ref.descriptor);
      for (std::size_t i = 0; i < desc.params.size(); ++i) in.params.push_back("p" + std::to_string(i));
      b::Decl d = encode::translate_procedure(in, sym_);
      if (is_object_init(callee.ref)) d.body = b::Body{};
      procedures.emplace(name, std::move(d));
    }
  }

  ClassPath& cp_;
  Options opts_;
  std::string spec_package_;
  encode::Symbols sym_;
  spec::Context ctx_;
  std::map<std::string, ClassUnit> units_;
  std::set<std::string> pure_;
  std::map<std::string, spec::Aggregate> aggregates_;
  std::set<std::string> prelude_procs_{"new", "array.new"};
};

}  // namespace

Translation translate(ClassPath& cp, const std::vector<std::string>& entries, const Options& opts) {
  if (entries.empty()) throw Error(ErrorCode::Config, "no entry class given");
  return Pipeline(cp, opts).run(entries);
}

std::string translate_to_text(ClassPath& cp, const std::vector<std::string>& entries, const Options& opts) {
  return b::print(translate(cp, entries, opts).program);
}

}  // namespace bcv

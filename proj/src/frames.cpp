// SPDX-License-Identifier: Apache-2.0
#include "bcv/frames.hpp"

#include "bcv/error.hpp"

namespace bcv::frames {

using boogie::Decl;
using boogie::HeapEvent;

FrameResult infer_frames(const boogie::Program& p) {
  FrameResult out;
  std::map<std::string, std::vector<HeapEvent>> events;
  for (const auto& d : p.decls) {
    if (d.kind != Decl::Kind::Procedure) continue;
    if (!d.body) {
      out[d.name] = {Frame::WholeHeap, "no implementation"};
      continue;
    }
    out[d.name] = {Frame::Empty, {}};
    events[d.name] = boogie::heap_events(*d.body);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (auto& [name, evs] : events) {
      FrameInfo& info = out[name];
      if (info.frame == Frame::WholeHeap) continue;
      for (const auto& ev : evs) {
        if (ev.kind == HeapEvent::Kind::Assign) {
          info = {Frame::WholeHeap, ev.text};
        } else {
          auto it = out.find(ev.callee);
          if (it == out.end()) {
            info = {Frame::WholeHeap, "call to undeclared " + ev.callee};
          } else if (it->second.frame == Frame::WholeHeap) {
            info = {Frame::WholeHeap, ev.text};
          }
        }
        if (info.frame == Frame::WholeHeap) {
          changed = true;
          break;
        }
      }
    }
  }
  return out;
}

void enforce_purity(const std::vector<SpecMethod>& methods, const FrameResult& frames) {
  for (const auto& m : methods) {
    auto it = frames.find(m.procedure);
    if (it == frames.end() || it->second.frame == Frame::Empty) continue;
    throw Error(ErrorCode::ImpureSpec, m.display + " may modify the heap: " + it->second.provenance, m.display);
  }
}

void apply_frames(boogie::Program& p, const FrameResult& frames) {
  for (auto& d : p.decls) {
    if (d.kind != Decl::Kind::Procedure || !d.body) continue;
    std::erase_if(d.specs, [](const boogie::Spec& s) { return s.kind == boogie::Spec::Kind::Modifies; });
    auto it = frames.find(d.name);
    if (it != frames.end() && it->second.frame == Frame::WholeHeap) {
      boogie::Spec s;
      s.kind = boogie::Spec::Kind::Modifies;
      s.names = {std::string(boogie::kHeap)};
      d.specs.push_back(s);
    }
  }
}

}  // namespace bcv::frames

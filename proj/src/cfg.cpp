// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <limits>
#include <map>

#include "bcv/error.hpp"
#include "bcv/lift.hpp"

namespace bcv {

using grimp::Stmt;

Cfg build_cfg(const grimp::Body& body) {
  Cfg cfg;
  const auto& stmts = body.stmts;
  cfg.block_of.assign(stmts.size(), 0);
  if (stmts.empty()) return cfg;
  std::vector<bool> leader(stmts.size(), false);
  leader[0] = true;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    auto k = stmts[i].kind;
    if (k == Stmt::Kind::Label) leader[i] = true;
    if ((k == Stmt::Kind::If || k == Stmt::Kind::Goto || k == Stmt::Kind::Return) && i + 1 < stmts.size()) leader[i + 1] = true;
  }
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    if (leader[i]) cfg.blocks.push_back({i, i, {}, {}});
    cfg.blocks.back().last = i + 1;
    cfg.block_of[i] = cfg.blocks.size() - 1;
  }
  std::map<std::string, std::size_t> label_block;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    if (stmts[i].kind == Stmt::Kind::Label) label_block[stmts[i].label] = cfg.block_of[i];
  }
  auto target = [&](const std::string& label) {
    auto it = label_block.find(label);
    if (it == label_block.end()) throw Error(ErrorCode::Unsupported, "jump to undefined label " + label);
    return it->second;
  };
  auto link = [&](std::size_t from, std::size_t to) {
    auto& s = cfg.blocks[from].succs;
    if (std::find(s.begin(), s.end(), to) == s.end()) {
      s.push_back(to);
      cfg.blocks[to].preds.push_back(from);
    }
  };
  for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
    const Stmt& tail = stmts[cfg.blocks[b].last - 1];
    bool falls = tail.kind != Stmt::Kind::Goto && tail.kind != Stmt::Kind::Return;
    if (tail.kind == Stmt::Kind::If || tail.kind == Stmt::Kind::Goto) link(b, target(tail.label));
    if (falls && b + 1 < cfg.blocks.size()) link(b, b + 1);
  }
  return cfg;
}

namespace {

std::vector<std::size_t> reverse_postorder(const Cfg& cfg) {
  std::vector<std::size_t> order;
  if (cfg.blocks.empty()) return order;
  std::vector<bool> seen(cfg.blocks.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> stack = {{0, 0}};
  seen[0] = true;
  while (!stack.empty()) {
    auto& [b, next] = stack.back();
    if (next < cfg.blocks[b].succs.size()) {
      std::size_t s = cfg.blocks[b].succs[next++];
      if (!seen[s]) {
        seen[s] = true;
        stack.push_back({s, 0});
      }
    } else {
      order.push_back(b);
      stack.pop_back();
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

bool dominates(const std::vector<std::size_t>& idom, std::size_t a, std::size_t b) {
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  while (b != kNone) {
    if (a == b) return true;
    if (idom[b] == b) return false;
    b = idom[b];
  }
  return false;
}

}  // namespace

std::vector<std::size_t> dominators(const Cfg& cfg) {
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> idom(cfg.blocks.size(), kNone);
  if (cfg.blocks.empty()) return idom;
  auto rpo = reverse_postorder(cfg);
  std::vector<std::size_t> index(cfg.blocks.size(), kNone);
  for (std::size_t i = 0; i < rpo.size(); ++i) index[rpo[i]] = i;
  idom[0] = 0;
  auto intersect = [&](std::size_t a, std::size_t b) {
    while (a != b) {
      while (index[a] > index[b]) a = idom[a];
      while (index[b] > index[a]) b = idom[b];
    }
    return a;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 1; i < rpo.size(); ++i) {
      std::size_t b = rpo[i];
      std::size_t best = kNone;
      for (auto p : cfg.blocks[b].preds) {
        if (idom[p] == kNone) continue;
        best = best == kNone ? p : intersect(p, best);
      }
      if (best != idom[b]) {
        idom[b] = best;
        changed = true;
      }
    }
  }
  return idom;
}

std::vector<LoopInfo> detect_loops(const Cfg& cfg, const grimp::Body& body) {
  std::vector<LoopInfo> loops;
  if (cfg.blocks.empty()) return loops;
  auto idom = dominators(cfg);

  // Retreating edges from an iterative DFS.
  std::vector<std::pair<std::size_t, std::size_t>> back_edges;
  std::vector<int> state(cfg.blocks.size(), 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::pair<std::size_t, std::size_t>> stack = {{0, 0}};
  state[0] = 1;
  while (!stack.empty()) {
    auto& [b, next] = stack.back();
    if (next < cfg.blocks[b].succs.size()) {
      std::size_t s = cfg.blocks[b].succs[next++];
      if (state[s] == 1) {
        back_edges.push_back({b, s});
      } else if (state[s] == 0) {
        state[s] = 1;
        stack.push_back({s, 0});
      }
    } else {
      state[b] = 2;
      stack.pop_back();
    }
  }

  std::map<std::size_t, LoopInfo> by_head;
  for (auto [u, h] : back_edges) {
    if (!dominates(idom, h, u)) {
      const Stmt& at = body.stmts[cfg.blocks[h].first];
      throw Error(ErrorCode::Irreducible, "control flow is not reducible",
                  at.offset >= 0 ? "offset " + std::to_string(at.offset) : std::string());
    }
    LoopInfo& loop = by_head[h];
    loop.head = h;
    loop.blocks.insert(h);
    std::vector<std::size_t> work = {u};
    while (!work.empty()) {
      std::size_t b = work.back();
      work.pop_back();
      if (!loop.blocks.insert(b).second) continue;
      for (auto p : cfg.blocks[b].preds) {
        if (idom[p] != std::numeric_limits<std::size_t>::max()) work.push_back(p);
      }
    }
    const Stmt& tail = body.stmts[cfg.blocks[u].last - 1];
    const Stmt& head_first = body.stmts[cfg.blocks[h].first];
    bool jumps = (tail.kind == Stmt::Kind::If || tail.kind == Stmt::Kind::Goto) &&
                 head_first.kind == Stmt::Kind::Label && tail.label == head_first.label;
    loop.backjumps.push_back(jumps ? cfg.blocks[u].last - 1 : cfg.blocks[u].last);
  }

  for (auto& [h, loop] : by_head) {
    const Stmt& first = body.stmts[cfg.blocks[h].first];
    if (first.kind == Stmt::Kind::Label) loop.head_label = first.label;
    std::sort(loop.backjumps.begin(), loop.backjumps.end());
    std::set<std::size_t> exits;
    for (auto b : loop.blocks) {
      for (auto s : cfg.blocks[b].succs) {
        if (!loop.blocks.count(s)) exits.insert(s);
      }
    }
    for (auto e : exits) {
      loop.exit_blocks.push_back(e);
      const Stmt& s = body.stmts[cfg.blocks[e].first];
      loop.exits.push_back(s.kind == Stmt::Kind::Label ? s.label : std::string());
    }
    loops.push_back(std::move(loop));
  }
  std::stable_sort(loops.begin(), loops.end(),
                   [](const LoopInfo& a, const LoopInfo& b) { return a.blocks.size() < b.blocks.size(); });
  return loops;
}

}  // namespace bcv

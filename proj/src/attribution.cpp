// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <unordered_map>

#include "aim/cohorts.hpp"
#include "aim/csv.hpp"
#include "aim/error.hpp"
#include "aim/log.hpp"
#include "aim/lp.hpp"
#include "aim/parallel.hpp"

namespace aim {

namespace {

constexpr double kObjTol = 1e-9;
constexpr double kIntTol = 1e-6;

int64_t round_half_up(double v) {
  return static_cast<int64_t>(std::floor(v + 0.5));
}

// Index-space view: pairs sorted by (subscriber, content) define the x
// variable order used by branching tie-breaks.
struct Indexed {
  std::vector<std::string> subs;      // sorted unique
  std::vector<std::string> contents;  // sorted unique
  struct Pair {
    int sub = 0;
    int content = 0;
    double affinity = 0.0;
  };
  std::vector<Pair> pairs;
  std::vector<std::vector<int>> pairs_of_sub;
  std::vector<std::vector<int>> pairs_of_content;
  std::vector<int64_t> quota;

  const AttributionInstance* src = nullptr;
  std::vector<int> src_candidate;  // pair index -> candidate index
};

Indexed index_instance(const AttributionInstance& inst) {
  Indexed ix;
  ix.src = &inst;
  std::set<std::string> subs, contents;
  for (const auto& c : inst.candidates) {
    subs.insert(c.subscriber_id);
    contents.insert(c.content_id);
  }
  for (const auto& [cid, q] : inst.quotas) {
    if (q != 0) contents.insert(cid);
  }
  ix.subs.assign(subs.begin(), subs.end());
  ix.contents.assign(contents.begin(), contents.end());

  auto sub_of = [&](const std::string& s) {
    return static_cast<int>(std::lower_bound(ix.subs.begin(), ix.subs.end(), s) -
                            ix.subs.begin());
  };
  auto content_of = [&](const std::string& c) {
    return static_cast<int>(
        std::lower_bound(ix.contents.begin(), ix.contents.end(), c) -
        ix.contents.begin());
  };

  std::vector<int> order(inst.candidates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto& ca = inst.candidates[static_cast<size_t>(a)];
    const auto& cb = inst.candidates[static_cast<size_t>(b)];
    if (ca.subscriber_id != cb.subscriber_id) {
      return ca.subscriber_id < cb.subscriber_id;
    }
    return ca.content_id < cb.content_id;
  });

  ix.pairs_of_sub.resize(ix.subs.size());
  ix.pairs_of_content.resize(ix.contents.size());
  for (int cand : order) {
    const auto& c = inst.candidates[static_cast<size_t>(cand)];
    Indexed::Pair p;
    p.sub = sub_of(c.subscriber_id);
    p.content = content_of(c.content_id);
    p.affinity = c.affinity;
    int idx = static_cast<int>(ix.pairs.size());
    ix.pairs.push_back(p);
    ix.src_candidate.push_back(cand);
    ix.pairs_of_sub[static_cast<size_t>(p.sub)].push_back(idx);
    ix.pairs_of_content[static_cast<size_t>(p.content)].push_back(idx);
  }

  ix.quota.assign(ix.contents.size(), 0);
  for (const auto& [cid, q] : inst.quotas) {
    if (q < 0) {
      throw InfeasibleError("content " + cid + ": negative quota");
    }
    auto it = std::lower_bound(ix.contents.begin(), ix.contents.end(), cid);
    if (it == ix.contents.end() || *it != cid) continue;  // quota 0, no pairs
    ix.quota[static_cast<size_t>(it - ix.contents.begin())] = q;
  }
  for (size_t j = 0; j < ix.contents.size(); ++j) {
    if (ix.quota[j] > static_cast<int64_t>(ix.pairs_of_content[j].size())) {
      throw InfeasibleError(
          "content " + ix.contents[j] + ": quota " +
          std::to_string(ix.quota[j]) + " exceeds candidate count " +
          std::to_string(ix.pairs_of_content[j].size()));
    }
  }
  return ix;
}

Assignment assemble(const Indexed& ix, const std::vector<char>& chosen,
                    double lambda) {
  Assignment a;
  a.lambda = lambda;
  std::vector<int> degree(ix.subs.size(), 0);
  double affinity_sum = 0.0;
  int64_t n_assigned = 0;
  for (size_t p = 0; p < ix.pairs.size(); ++p) {
    if (!chosen[p]) continue;
    const auto& pair = ix.pairs[p];
    a.assigned.emplace_back(ix.subs[static_cast<size_t>(pair.sub)],
                            ix.contents[static_cast<size_t>(pair.content)]);
    ++degree[static_cast<size_t>(pair.sub)];
    affinity_sum += pair.affinity;
    ++n_assigned;
  }
  std::sort(a.assigned.begin(), a.assigned.end());
  int64_t multi = 0;
  int64_t touched = 0;
  for (size_t s = 0; s < ix.subs.size(); ++s) {
    if (degree[s] >= 1) ++touched;
    if (degree[s] >= 2) {
      a.multi_assigned.push_back(ix.subs[s]);
      ++multi;
    }
  }
  a.objective = static_cast<double>(multi) - lambda * affinity_sum;
  a.mean_affinity =
      n_assigned > 0 ? affinity_sum / static_cast<double>(n_assigned) : 0.0;
  a.multi_rate =
      touched > 0 ? static_cast<double>(multi) / static_cast<double>(touched)
                  : 0.0;
  return a;
}

std::vector<char> greedy_choice(const Indexed& ix) {
  std::vector<char> chosen(ix.pairs.size(), 0);
  for (size_t j = 0; j < ix.contents.size(); ++j) {
    std::vector<int> cands = ix.pairs_of_content[j];
    std::stable_sort(cands.begin(), cands.end(), [&](int a, int b) {
      double fa = ix.pairs[static_cast<size_t>(a)].affinity;
      double fb = ix.pairs[static_cast<size_t>(b)].affinity;
      if (fa != fb) return fa > fb;
      return ix.pairs[static_cast<size_t>(a)].sub <
             ix.pairs[static_cast<size_t>(b)].sub;
    });
    for (int64_t k = 0; k < ix.quota[j]; ++k) {
      chosen[static_cast<size_t>(cands[static_cast<size_t>(k)])] = 1;
    }
  }
  return chosen;
}

// ---------------------------------------------------------------------------
// Exact solver
// ---------------------------------------------------------------------------

struct Presolve {
  // -1 free, 0 forced out, 1 forced in
  std::vector<int8_t> pair_state;
  std::vector<int8_t> y_state;
  bool feasible = true;
  std::string violating_content;
};

Presolve run_presolve(const Indexed& ix) {
  Presolve ps;
  ps.pair_state.assign(ix.pairs.size(), -1);
  ps.y_state.assign(ix.subs.size(), -1);

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t j = 0; j < ix.contents.size(); ++j) {
      int64_t fixed1 = 0, free_cnt = 0;
      for (int p : ix.pairs_of_content[j]) {
        if (ps.pair_state[static_cast<size_t>(p)] == 1) ++fixed1;
        if (ps.pair_state[static_cast<size_t>(p)] == -1) ++free_cnt;
      }
      int64_t rem = ix.quota[j] - fixed1;
      if (rem < 0 || rem > free_cnt) {
        ps.feasible = false;
        ps.violating_content = ix.contents[j];
        return ps;
      }
      if (free_cnt == 0) continue;
      if (rem == 0) {
        for (int p : ix.pairs_of_content[j]) {
          if (ps.pair_state[static_cast<size_t>(p)] == -1) {
            ps.pair_state[static_cast<size_t>(p)] = 0;
            changed = true;
          }
        }
      } else if (rem == free_cnt) {
        for (int p : ix.pairs_of_content[j]) {
          if (ps.pair_state[static_cast<size_t>(p)] == -1) {
            ps.pair_state[static_cast<size_t>(p)] = 1;
            changed = true;
          }
        }
      }
    }
    for (size_t s = 0; s < ix.subs.size(); ++s) {
      if (ps.y_state[s] != -1) continue;
      int64_t fixed1 = 0, free_cnt = 0;
      for (int p : ix.pairs_of_sub[s]) {
        if (ps.pair_state[static_cast<size_t>(p)] == 1) ++fixed1;
        if (ps.pair_state[static_cast<size_t>(p)] == -1) ++free_cnt;
      }
      if (fixed1 >= 2) {
        ps.y_state[s] = 1;
        changed = true;
      } else if (fixed1 + free_cnt <= 1) {
        ps.y_state[s] = 0;
        changed = true;
      }
    }
  }
  return ps;
}

struct MilpModel {
  lp::Problem base;
  std::vector<int> free_pairs;   // LP column -> pair index, x block
  std::vector<int> free_ys;      // LP column offset in y block -> sub index
  int n_x = 0;
  double constant = 0.0;  // objective mass carried by presolve fixings
};

MilpModel build_model(const Indexed& ix, const Presolve& ps, double lambda) {
  MilpModel m;
  std::vector<int> col_of_pair(ix.pairs.size(), -1);
  for (size_t p = 0; p < ix.pairs.size(); ++p) {
    if (ps.pair_state[p] == -1) {
      col_of_pair[p] = static_cast<int>(m.free_pairs.size());
      m.free_pairs.push_back(static_cast<int>(p));
    } else if (ps.pair_state[p] == 1) {
      m.constant -= lambda * ix.pairs[p].affinity;
    }
  }
  m.n_x = static_cast<int>(m.free_pairs.size());

  std::vector<int> ycol_of_sub(ix.subs.size(), -1);
  for (size_t s = 0; s < ix.subs.size(); ++s) {
    if (ps.y_state[s] == 1) {
      m.constant += 1.0;
    } else if (ps.y_state[s] == -1) {
      bool has_free = false;
      for (int p : ix.pairs_of_sub[s]) {
        if (ps.pair_state[static_cast<size_t>(p)] == -1) has_free = true;
      }
      if (has_free) {
        ycol_of_sub[s] = m.n_x + static_cast<int>(m.free_ys.size());
        m.free_ys.push_back(static_cast<int>(s));
      } else {
        // No free pairs left: degree is settled and below 2.
      }
    }
  }

  int n = m.n_x + static_cast<int>(m.free_ys.size());
  m.base.n_vars = n;
  m.base.objective.assign(static_cast<size_t>(n), 0.0);
  m.base.lower.assign(static_cast<size_t>(n), 0.0);
  m.base.upper.assign(static_cast<size_t>(n), 1.0);
  for (int c = 0; c < m.n_x; ++c) {
    m.base.objective[static_cast<size_t>(c)] =
        -lambda * ix.pairs[static_cast<size_t>(m.free_pairs[static_cast<size_t>(c)])].affinity;
  }
  for (size_t k = 0; k < m.free_ys.size(); ++k) {
    m.base.objective[static_cast<size_t>(m.n_x) + k] = 1.0;
  }

  // Quota rows (equalities on the free pairs).
  for (size_t j = 0; j < ix.contents.size(); ++j) {
    std::vector<double> row(static_cast<size_t>(n), 0.0);
    int64_t fixed1 = 0;
    bool any_free = false;
    for (int p : ix.pairs_of_content[j]) {
      if (ps.pair_state[static_cast<size_t>(p)] == 1) ++fixed1;
      int col = col_of_pair[static_cast<size_t>(p)];
      if (col >= 0) {
        row[static_cast<size_t>(col)] = 1.0;
        any_free = true;
      }
    }
    if (any_free) {
      m.base.add_row(std::move(row), lp::Sense::kEq,
                     static_cast<double>(ix.quota[j] - fixed1));
    }
  }

  // Disjunctive rows for subscribers whose multi flag is still open.
  for (size_t s = 0; s < ix.subs.size(); ++s) {
    int ycol = ycol_of_sub[s];
    if (ycol < 0) continue;
    int64_t fixed1 = 0;
    std::vector<int> free_cols;
    for (int p : ix.pairs_of_sub[s]) {
      if (ps.pair_state[static_cast<size_t>(p)] == 1) ++fixed1;
      int col = col_of_pair[static_cast<size_t>(p)];
      if (col >= 0) free_cols.push_back(col);
    }
    double big_m = std::max<double>(
        2.0, static_cast<double>(ix.pairs_of_sub[s].size()) - 1.0);

    // sum x <= 1 + M y   (x here includes presolve-fixed ones via rhs)
    std::vector<double> up(static_cast<size_t>(n), 0.0);
    for (int col : free_cols) up[static_cast<size_t>(col)] = 1.0;
    up[static_cast<size_t>(ycol)] = -big_m;
    m.base.add_row(std::move(up), lp::Sense::kLe,
                   1.0 - static_cast<double>(fixed1));

    // sum x >= 2 - 2(1 - y)  ==  sum x >= 2y
    std::vector<double> lo(static_cast<size_t>(n), 0.0);
    for (int col : free_cols) lo[static_cast<size_t>(col)] = 1.0;
    lo[static_cast<size_t>(ycol)] = -2.0;
    m.base.add_row(std::move(lo), lp::Sense::kGe,
                   -static_cast<double>(fixed1));
  }
  return m;
}

struct Node {
  double bound = -lp::kInfinity;
  int64_t seq = 0;
  std::vector<std::pair<int, int8_t>> fixings;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;                              // FIFO on ties
  }
};

bool lex_less(const Assignment& a, const Assignment& b) {
  return a.assigned < b.assigned;
}

}  // namespace

void AttributionInstance::validate() const {
  std::map<std::string, int64_t> counts;
  for (const auto& c : candidates) {
    if (c.affinity < 0.0 || c.affinity > 1.0) {
      throw Error("candidate (" + c.subscriber_id + ", " + c.content_id +
                  "): affinity outside [0,1]");
    }
    ++counts[c.content_id];
  }
  for (const auto& [cid, q] : quotas) {
    if (q < 0) throw InfeasibleError("content " + cid + ": negative quota");
    if (q > counts[cid]) {
      throw InfeasibleError("content " + cid + ": quota " + std::to_string(q) +
                            " exceeds candidate count " +
                            std::to_string(counts[cid]));
    }
  }
}

size_t AttributionInstance::n_subscribers() const {
  std::set<std::string> subs;
  for (const auto& c : candidates) subs.insert(c.subscriber_id);
  return subs.size();
}

Assignment rank_greedy(const AttributionInstance& instance, double lambda) {
  Indexed ix = index_instance(instance);
  Assignment a = assemble(ix, greedy_choice(ix), lambda);
  check_assignment(instance, a);
  return a;
}

Assignment solve_exact(const AttributionInstance& instance, double lambda,
                       const SolveOptions& options, SolveStats* stats_out) {
  if (lambda < 0) throw Error("solve_exact: lambda must be >= 0");
  Indexed ix = index_instance(instance);
  SolveStats stats;

  Presolve ps = run_presolve(ix);
  if (!ps.feasible) {
    throw InfeasibleError("content " + ps.violating_content +
                          ": quotas infeasible");
  }

  // Feasible warm start: independent per-content ranking.
  std::vector<char> incumbent = greedy_choice(ix);
  Assignment inc_assignment = assemble(ix, incumbent, lambda);
  double inc_obj = inc_assignment.objective;

  MilpModel model = build_model(ix, ps, lambda);
  const int n_free = model.base.n_vars;

  if (n_free == 0) {
    // Presolve settled everything; the unique solution is the fixings.
    std::vector<char> chosen(ix.pairs.size(), 0);
    for (size_t p = 0; p < ix.pairs.size(); ++p) chosen[p] = ps.pair_state[p] == 1;
    Assignment a = assemble(ix, chosen, lambda);
    check_assignment(instance, a);
    stats.root_bound = a.objective;
    stats.best_bound = a.objective;
    if (stats_out) *stats_out = stats;
    return a;
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  int64_t seq = 0;
  open.push(Node{-lp::kInfinity, seq++, {}});
  bool root_seen = false;

  lp::Problem work = model.base;

  while (!open.empty()) {
    if (stats.nodes >= options.node_budget) {
      stats.optimal = false;
      double remaining = inc_obj;
      if (!open.empty()) remaining = std::min(remaining, open.top().bound);
      stats.best_bound = remaining;
      stats.gap = inc_obj - remaining;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= inc_obj - kObjTol) continue;  // cannot improve
    ++stats.nodes;

    work.lower = model.base.lower;
    work.upper = model.base.upper;
    for (auto [col, v] : node.fixings) {
      work.lower[static_cast<size_t>(col)] = v;
      work.upper[static_cast<size_t>(col)] = v;
    }

    lp::Solution sol = lp::solve(work);
    stats.lp_iterations += sol.iterations;
    if (sol.status == lp::Status::kInfeasible) continue;
    if (sol.status != lp::Status::kOptimal) {
      throw Error("solve_exact: LP did not converge");
    }
    double bound = sol.objective + model.constant;
    if (!root_seen) {
      stats.root_bound = bound;
      root_seen = true;
    }
    if (bound >= inc_obj - kObjTol) continue;

    // Fractional column with the largest distance to an integer, ties by
    // column index (x block first, each block lexicographically ordered).
    int branch_col = -1;
    double worst = kIntTol;
    for (int c = 0; c < n_free; ++c) {
      double v = sol.x[static_cast<size_t>(c)];
      double dist = std::min(v, 1.0 - v);
      if (dist > worst) {
        worst = dist;
        branch_col = c;
      }
    }

    if (branch_col < 0) {
      // Integral: lift into a full pair selection.
      std::vector<char> chosen(ix.pairs.size(), 0);
      for (size_t p = 0; p < ix.pairs.size(); ++p) chosen[p] = ps.pair_state[p] == 1;
      for (int c = 0; c < model.n_x; ++c) {
        if (sol.x[static_cast<size_t>(c)] > 0.5) {
          chosen[static_cast<size_t>(model.free_pairs[static_cast<size_t>(c)])] = 1;
        }
      }
      Assignment a = assemble(ix, chosen, lambda);
      stats.max_bound_violation =
          std::max(stats.max_bound_violation, bound - a.objective);
      if (a.objective < inc_obj - kObjTol ||
          (a.objective <= inc_obj + kObjTol && lex_less(a, inc_assignment))) {
        inc_assignment = std::move(a);
        inc_obj = inc_assignment.objective;
      }
      continue;
    }

    for (int8_t v : {static_cast<int8_t>(0), static_cast<int8_t>(1)}) {
      Node child;
      child.bound = bound;
      child.seq = seq++;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch_col, v);
      open.push(std::move(child));
    }
  }

  if (stats.optimal) {
    stats.best_bound = inc_obj;
    stats.gap = 0.0;
  }
  check_assignment(instance, inc_assignment);
  if (stats_out) *stats_out = stats;
  return inc_assignment;
}

Assignment brute_force(const AttributionInstance& instance, double lambda) {
  Indexed ix = index_instance(instance);
  if (ix.pairs.size() > 25) {
    throw SizeError("brute_force: " + std::to_string(ix.pairs.size()) +
                    " candidate pairs exceed the 25-pair bound");
  }

  const size_t n_contents = ix.contents.size();
  std::vector<char> chosen(ix.pairs.size(), 0);
  std::vector<int> degree(ix.subs.size(), 0);
  int64_t multi = 0;
  double affinity_sum = 0.0;

  bool have_best = false;
  double best_obj = 0.0;
  Assignment best;

  // Per-content combination cursors, enumerated depth-first in
  // lexicographic order over subscriber-sorted candidate lists.
  std::vector<std::vector<int>> combos(n_contents);

  auto take = [&](int p, int dir) {
    const auto& pair = ix.pairs[static_cast<size_t>(p)];
    chosen[static_cast<size_t>(p)] = dir > 0;
    int& deg = degree[static_cast<size_t>(pair.sub)];
    if (dir > 0) {
      ++deg;
      if (deg == 2) ++multi;
      affinity_sum += pair.affinity;
    } else {
      if (deg == 2) --multi;
      --deg;
      affinity_sum -= pair.affinity;
    }
  };

  auto leaf = [&]() {
    double obj = static_cast<double>(multi) - lambda * affinity_sum;
    if (have_best && obj > best_obj + 1e-12) return;
    Assignment a = assemble(ix, chosen, lambda);
    if (!have_best || obj < best_obj - 1e-12 ||
        (obj <= best_obj + 1e-12 && lex_less(a, best))) {
      best = std::move(a);
      best_obj = obj;
      have_best = true;
    }
  };

  // Recursive enumeration over contents; combination per content.
  auto rec = [&](auto&& self, size_t j) -> void {
    if (j == n_contents) {
      leaf();
      return;
    }
    const auto& cands = ix.pairs_of_content[j];
    int64_t q = ix.quota[j];
    if (q == 0) {
      self(self, j + 1);
      return;
    }
    std::vector<int> pick(static_cast<size_t>(q));
    auto combo = [&](auto&& cself, size_t depth, size_t from) -> void {
      if (depth == pick.size()) {
        self(self, j + 1);
        return;
      }
      for (size_t i = from; i + (pick.size() - depth) <= cands.size(); ++i) {
        int p = cands[i];
        pick[depth] = p;
        take(p, +1);
        cself(cself, depth + 1, i + 1);
        take(p, -1);
      }
    };
    combo(combo, 0, 0);
  };
  rec(rec, 0);

  if (!have_best) {
    throw InfeasibleError("brute_force: no feasible assignment");
  }
  check_assignment(instance, best);
  return best;
}

AttributionInstance apply_order_decay(const AttributionInstance& instance,
                                      double gamma) {
  if (gamma <= 0.0 || gamma > 1.0) {
    throw ConfigError("decay gamma must be in (0,1]");
  }
  AttributionInstance out = instance;
  for (auto& c : out.candidates) {
    c.affinity *= std::pow(gamma, c.order_rank - 1);
  }
  return out;
}

std::vector<AttributionInstance> build_instances(
    const Dataset& ds, const std::vector<ContentLaunch>& launches,
    const std::vector<LaunchImpactSeries>& series,
    const BaselineModel& model) {
  // (content, group, date) -> estimated incrementals
  std::map<std::tuple<std::string, std::string, int32_t>, double> estimate;
  for (const auto& s : series) {
    for (const auto& d : s.daily) {
      estimate[{s.content_id, s.group, d.date.days}] = d.n_incremental;
    }
  }

  struct CellKey {
    int32_t date;
    std::string group;
    bool operator<(const CellKey& o) const {
      return std::tie(date, group) < std::tie(o.date, o.group);
    }
  };
  struct CellCandidate {
    uint32_t row;
    const ContentLaunch* launch;
    Date first_event;
  };
  std::map<CellKey, std::vector<CellCandidate>> cells;

  for (const auto& launch : launches) {
    launch.validate();
    for (Date d = launch.launch_date; d <= launch.post_end(); ++d) {
      auto it = ds.rows_by_date.find(d);
      if (it == ds.rows_by_date.end()) continue;
      for (uint32_t row : it->second) {
        if (!consumption_label(ds, row, launch)) continue;
        // Earliest qualifying event dates the consumption for ordering.
        Date avail = availability_date(d, launch);
        Date first = avail + launch.label_window_days;
        for (uint32_t e : ds.events_by_row[row]) {
          const auto& ev = ds.consumption[e];
          if (ev.content_id != launch.content_id) continue;
          int offset = ev.event_date - avail;
          if (offset < 0 || offset > launch.label_window_days) continue;
          if (ev.completion_fraction < launch.completion_threshold) continue;
          first = std::min(first, ev.event_date);
        }
        cells[{d.days, ds.signups[row].group}].push_back(
            {row, &launch, first});
      }
    }
  }

  std::vector<AttributionInstance> instances;
  for (auto& [key, cands] : cells) {
    AttributionInstance inst;
    inst.date = Date{key.date};
    inst.group = key.group;

    // Consumption order per subscriber: earliest qualifying event first,
    // content id breaking same-day ties.
    std::stable_sort(cands.begin(), cands.end(),
                     [&](const CellCandidate& a, const CellCandidate& b) {
                       const auto& ida = ds.signups[a.row].subscriber_id;
                       const auto& idb = ds.signups[b.row].subscriber_id;
                       if (ida != idb) return ida < idb;
                       if (a.first_event != b.first_event) {
                         return a.first_event < b.first_event;
                       }
                       return a.launch->content_id < b.launch->content_id;
                     });

    std::map<std::string, int64_t> cand_count;
    size_t i = 0;
    while (i < cands.size()) {
      size_t begin = i;
      const std::string& sub = ds.signups[cands[begin].row].subscriber_id;
      while (i < cands.size() &&
             ds.signups[cands[i].row].subscriber_id == sub) {
        ++i;
      }
      for (size_t k = begin; k < i; ++k) {
        const auto& cc = cands[k];
        const auto& s = ds.signups[cc.row];
        CandidatePair pair;
        pair.subscriber_id = s.subscriber_id;
        pair.content_id = cc.launch->content_id;
        pair.order_rank = static_cast<int>(k - begin) + 1;
        double p_hat = predict_p(model, 0.0, s.activity,
                                 ds.promo_intensity(cc.row, pair.content_id));
        pair.affinity = 1.0 - p_hat;
        ++cand_count[pair.content_id];
        inst.candidates.push_back(std::move(pair));
      }
    }
    std::sort(inst.candidates.begin(), inst.candidates.end(),
              [](const CandidatePair& a, const CandidatePair& b) {
                return std::tie(a.subscriber_id, a.content_id) <
                       std::tie(b.subscriber_id, b.content_id);
              });

    for (const auto& [cid, count] : cand_count) {
      auto it = estimate.find({cid, key.group, key.date});
      if (it == estimate.end()) {
        throw Error("build_instances: no impact estimate for content " + cid +
                    " group '" + key.group + "' on " +
                    format_date(Date{key.date}));
      }
      int64_t q = std::min(round_half_up(it->second), count);
      if (q == 0 && it->second > 0) {
        log::info("attribution: content " + cid + " on " +
                  format_date(Date{key.date}) + " group '" + key.group +
                  "': estimate " + csv::format_double(it->second) +
                  " rounds to quota 0");
      }
      inst.quotas[cid] = q;
    }
    inst.validate();
    instances.push_back(std::move(inst));
  }
  return instances;
}

std::vector<ParetoPoint> pareto_sweep(
    const std::vector<AttributionInstance>& instances,
    const std::vector<double>& lambda_grid, const SolveOptions& options) {
  for (size_t i = 0; i < lambda_grid.size(); ++i) {
    if (lambda_grid[i] < 0) throw Error("pareto_sweep: lambda must be >= 0");
    if (i > 0 && lambda_grid[i] < lambda_grid[i - 1]) {
      throw Error("pareto_sweep: lambda grid must be sorted ascending");
    }
  }

  // (instance, lambda) solves are independent; instances own disjoint
  // subscriber sets, so aggregation is a plain sum.
  struct CellResult {
    int64_t multi = 0;
    int64_t touched = 0;
    int64_t assigned = 0;
    double affinity_sum = 0.0;
  };
  size_t n_tasks = instances.size() * lambda_grid.size();
  std::vector<CellResult> results(n_tasks);
  par::parallel_for(n_tasks, [&](size_t task) {
    size_t li = task / instances.size();
    size_t ii = task % instances.size();
    Assignment a = solve_exact(instances[ii], lambda_grid[li], options);
    CellResult& r = results[task];
    r.multi = static_cast<int64_t>(a.multi_assigned.size());
    std::set<std::string> touched;
    for (const auto& [sub, content] : a.assigned) touched.insert(sub);
    r.touched = static_cast<int64_t>(touched.size());
    r.assigned = static_cast<int64_t>(a.assigned.size());
    r.affinity_sum = a.mean_affinity * static_cast<double>(a.assigned.size());
  });

  std::vector<ParetoPoint> points;
  for (size_t li = 0; li < lambda_grid.size(); ++li) {
    ParetoPoint pt;
    pt.lambda = lambda_grid[li];
    int64_t multi = 0, touched = 0, assigned = 0;
    double affinity = 0.0;
    for (size_t ii = 0; ii < instances.size(); ++ii) {
      const CellResult& r = results[li * instances.size() + ii];
      multi += r.multi;
      touched += r.touched;
      assigned += r.assigned;
      affinity += r.affinity_sum;
    }
    pt.multi_count = multi;
    pt.multi_rate =
        touched > 0 ? static_cast<double>(multi) / static_cast<double>(touched)
                    : 0.0;
    pt.mean_affinity =
        assigned > 0 ? affinity / static_cast<double>(assigned) : 0.0;
    points.push_back(pt);
  }
  return points;
}

void write_attribution_csv(
    const std::vector<std::pair<const AttributionInstance*, const Assignment*>>&
        solved,
    const std::string& path) {
  csv::Writer out(path);
  out.write_row({"subscriber_id", "content_id", "date", "group", "affinity",
                 "multi_assigned"});
  for (const auto& [inst, assignment] : solved) {
    std::map<std::pair<std::string, std::string>, double> affinity;
    for (const auto& c : inst->candidates) {
      affinity[{c.subscriber_id, c.content_id}] = c.affinity;
    }
    std::set<std::string> multi(assignment->multi_assigned.begin(),
                                assignment->multi_assigned.end());
    for (const auto& pair : assignment->assigned) {
      out.write_row({pair.first, pair.second, format_date(inst->date),
                     inst->group, csv::format_double(affinity[pair]),
                     multi.count(pair.first) ? "true" : "false"});
    }
  }
  out.close();
}

void write_pareto_csv(const std::vector<ParetoPoint>& points,
                      const std::string& path) {
  csv::Writer out(path);
  out.write_row({"lambda", "multi_rate", "mean_affinity"});
  for (const auto& p : points) {
    out.write_row({csv::format_double(p.lambda),
                   csv::format_double(p.multi_rate),
                   csv::format_double(p.mean_affinity)});
  }
  out.close();
}

void check_assignment(const AttributionInstance& instance,
                      const Assignment& assignment) {
  std::map<std::string, int64_t> per_content;
  std::map<std::string, int64_t> per_sub;
  for (const auto& [sub, content] : assignment.assigned) {
    ++per_content[content];
    ++per_sub[sub];
  }
  for (const auto& [cid, q] : instance.quotas) {
    int64_t got = per_content.count(cid) ? per_content[cid] : 0;
    if (got != q) {
      throw Error("assignment: content " + cid + " has " +
                  std::to_string(got) + " assignments, quota " +
                  std::to_string(q));
    }
  }
  for (const auto& [cid, got] : per_content) {
    if (!instance.quotas.count(cid)) {
      throw Error("assignment: content " + cid + " not in instance quotas");
    }
  }
  std::set<std::string> multi(assignment.multi_assigned.begin(),
                              assignment.multi_assigned.end());
  for (const auto& [sub, deg] : per_sub) {
    bool flagged = multi.count(sub) > 0;
    if (flagged != (deg >= 2)) {
      throw Error("assignment: subscriber " + sub +
                  " multi flag inconsistent with degree " +
                  std::to_string(deg));
    }
  }
  for (const auto& sub : multi) {
    if (!per_sub.count(sub)) {
      throw Error("assignment: multi-assigned subscriber " + sub +
                  " has no assignments");
    }
  }
}

}  // namespace aim

#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "../error.hpp"
#include "../graph/dag.hpp"
#include "gauss_score.hpp"

namespace tsdbn {

enum class MoveKind { add, remove, reverse };

struct Move {
  MoveKind kind = MoveKind::add;
  std::size_t from = 0;
  std::size_t to = 0;
  double delta = 0.0;

  bool same_action(const Move& o) const { return kind == o.kind && from == o.from && to == o.to; }
};

struct SearchOptions {
  // Column tiers; an edge a -> b is forbidden when tiers[a] > tiers[b]. Empty
  // means unconstrained.
  std::vector<int> tiers;
  std::size_t max_iterations = 1000000;
  bool record_trace = false;
};

struct TabuOptions {
  std::size_t tabu_length = 10;
  std::size_t max_worsening = 10;  // consecutive steps without a new best
};

struct SearchResult {
  Dag graph;
  double score = 0.0;
  std::size_t iterations = 0;
  std::vector<Move> trace;
};

namespace detail {

// Incremental search state: delta[j][i] is the change in node j's local score
// when i is toggled in or out of j's parent set.
class SearchState {
 public:
  SearchState(const GaussScore& score, const std::vector<std::string>& names, const SearchOptions& opt)
      : score_(score), opt_(opt), g_(names), m_(names.size()), delta_(m_, std::vector<double>(m_, 0.0)) {
    if (score.nodes() != m_) throw ValidationError("score and node list sizes differ");
    if (!opt.tiers.empty() && opt.tiers.size() != m_) throw ValidationError("tier vector size differs from node count");
    for (std::size_t j = 0; j < m_; ++j) {
      local_.push_back(score_.local(j, {}));
      total_ += local_.back();
    }
    for (std::size_t j = 0; j < m_; ++j) refresh(j);
  }

  const Dag& graph() const { return g_; }
  double total() const { return total_; }

  bool allowed(std::size_t a, std::size_t b) const { return opt_.tiers.empty() || opt_.tiers[a] <= opt_.tiers[b]; }

  // Best legal move passing `accept`, scanned in a fixed order. Acyclicity is
  // only checked for moves that beat the best found so far.
  template <class Accept>
  std::optional<Move> best_move(Accept accept) const {
    std::optional<Move> best;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < m_; ++j) {
        if (i == j) continue;
        if (g_.has_edge(i, j)) {
          consider({MoveKind::remove, i, j, delta_[j][i]}, best, accept);
          if (allowed(j, i)) consider({MoveKind::reverse, i, j, delta_[j][i] + delta_[i][j]}, best, accept);
        } else if (!g_.has_edge(j, i) && allowed(i, j)) {
          consider({MoveKind::add, i, j, delta_[j][i]}, best, accept);
        }
      }
    return best;
  }

  void apply(const Move& mv) {
    switch (mv.kind) {
      case MoveKind::add:
        if (!g_.try_add(mv.from, mv.to)) throw NumericError("search: add move closes a cycle");
        break;
      case MoveKind::remove:
        g_.remove_edge(mv.from, mv.to);
        break;
      case MoveKind::reverse:
        if (!g_.try_reverse(mv.from, mv.to)) throw NumericError("search: reverse move closes a cycle");
        break;
    }
    refresh_local(mv.to);
    if (mv.kind == MoveKind::reverse) refresh_local(mv.from);
  }

 private:
  template <class Accept>
  void consider(const Move& mv, std::optional<Move>& best, Accept& accept) const {
    if (!std::isfinite(mv.delta)) return;
    if (best && !(mv.delta > best->delta)) return;
    if (!accept(mv)) return;
    if (!legal(mv)) return;
    best = mv;
  }

  bool legal(const Move& mv) const {
    if (mv.kind == MoveKind::add) return !g_.reaches(mv.to, mv.from);
    if (mv.kind == MoveKind::remove) return true;
    return !reaches_indirect(mv.from, mv.to);
  }

  // Path from a to b that does not use the edge a -> b itself.
  bool reaches_indirect(std::size_t a, std::size_t b) const {
    std::vector<char> seen(m_, 0);
    std::vector<std::size_t> stack;
    for (auto c : g_.children(a))
      if (c != b) {
        seen[c] = 1;
        stack.push_back(c);
      }
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      if (u == b) return true;
      for (auto c : g_.children(u))
        if (!seen[c]) {
          seen[c] = 1;
          stack.push_back(c);
        }
    }
    return false;
  }

  void refresh_local(std::size_t j) {
    const double s = score_.local(j, g_.parents(j));
    total_ += s - local_[j];
    local_[j] = s;
    refresh(j);
  }

  void refresh(std::size_t j) {
    const auto& ps = g_.parents(j);
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == j) continue;
      std::vector<std::size_t> q = ps;
      const auto pos = std::lower_bound(q.begin(), q.end(), i);
      if (pos != q.end() && *pos == i)
        q.erase(pos);
      else
        q.insert(pos, i);
      delta_[j][i] = score_.local(j, q) - local_[j];
    }
  }

  const GaussScore& score_;
  SearchOptions opt_;
  Dag g_;
  std::size_t m_;
  std::vector<double> local_;
  std::vector<std::vector<double>> delta_;
  double total_ = 0.0;
};

inline constexpr double kImprovement = 1e-9;

}  // namespace detail

// Greedy best-improvement search from the empty graph over single-edge
// additions, deletions and reversals. Ties go to the first move in
// (from, to) index order; there is no randomness.
inline SearchResult hill_climb(const GaussScore& score, const std::vector<std::string>& names,
                               const SearchOptions& opt = {}) {
  detail::SearchState st(score, names, opt);
  SearchResult res;
  while (res.iterations < opt.max_iterations) {
    const auto mv = st.best_move([](const Move& m) { return m.delta > detail::kImprovement; });
    if (!mv) break;
    st.apply(*mv);
    ++res.iterations;
    if (opt.record_trace) res.trace.push_back(*mv);
  }
  res.graph = st.graph();
  res.score = st.total();
  return res;
}

inline SearchResult hill_climb(const NumericData& data, double gamma = 0.5, const SearchOptions& opt = {}) {
  GaussScore score(data, gamma);
  return hill_climb(score, data.names, opt);
}

// Hill climbing to a local optimum, then tabu exploration: the best non-tabu
// move is taken even when it lowers the score, the inverse of each applied
// move stays forbidden for `tabu_length` steps (unless it would beat the best
// score so far), and the search stops after `max_worsening` consecutive steps
// without a new best. Returns the best graph visited, so its score is never
// below the hill-climbing optimum.
inline SearchResult tabu_search(const GaussScore& score, const std::vector<std::string>& names,
                                const TabuOptions& tabu, const SearchOptions& opt = {}) {
  if (tabu.tabu_length < 1) throw ValidationError("tabu: tabu list length must be >= 1");
  if (tabu.max_worsening < 1) throw ValidationError("tabu: max_worsening must be >= 1");
  detail::SearchState st(score, names, opt);
  SearchResult res;
  while (res.iterations < opt.max_iterations) {
    const auto mv = st.best_move([](const Move& m) { return m.delta > detail::kImprovement; });
    if (!mv) break;
    st.apply(*mv);
    ++res.iterations;
    if (opt.record_trace) res.trace.push_back(*mv);
  }
  Dag best = st.graph();
  double best_score = st.total();
  std::deque<Move> forbidden;
  std::size_t worsening = 0;
  while (res.iterations < opt.max_iterations && worsening < tabu.max_worsening) {
    const double current = st.total();
    const auto mv = st.best_move([&](const Move& m) {
      if (current + m.delta > best_score + detail::kImprovement) return true;
      for (const auto& f : forbidden)
        if (f.same_action(m)) return false;
      return true;
    });
    if (!mv) break;
    st.apply(*mv);
    ++res.iterations;
    if (opt.record_trace) res.trace.push_back(*mv);
    Move inverse = *mv;
    if (mv->kind == MoveKind::add) inverse.kind = MoveKind::remove;
    if (mv->kind == MoveKind::remove) inverse.kind = MoveKind::add;
    if (mv->kind == MoveKind::reverse) std::swap(inverse.from, inverse.to);
    forbidden.push_back(inverse);
    if (forbidden.size() > tabu.tabu_length) forbidden.pop_front();
    if (st.total() > best_score + detail::kImprovement) {
      best = st.graph();
      best_score = st.total();
      worsening = 0;
    } else {
      ++worsening;
    }
  }
  res.graph = best;
  res.score = best_score;
  return res;
}

inline SearchResult tabu_search(const NumericData& data, double gamma = 0.5, const TabuOptions& tabu = {},
                                const SearchOptions& opt = {}) {
  if (tabu.tabu_length < 1) throw ValidationError("tabu: tabu list length must be >= 1");
  GaussScore score(data, gamma);
  return tabu_search(score, data.names, tabu, opt);
}

}  // namespace tsdbn

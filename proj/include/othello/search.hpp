#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "othello/game_core.hpp"

namespace othello {

// Values are centidisk-scale integers seen from a stated side. A finished game
// is worth kWinScore plus 100 per disc of margin.
constexpr int kWinScore = 1'000'000;
constexpr int kInfinity = 1 << 30;

class SearchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Heuristic {
  std::array<std::array<int, 8>, 8> cell_weights{};
  int mobility_weight = 0;
  int disc_weight = 0;
  int corner_weight = 0;

  /// Corner-heavy folklore weights; tunable, not tuned.
  static Heuristic standard() {
    Heuristic h;
    for (int r = 0; r < 8; ++r) {
      for (int c = 0; c < 8; ++c) {
        const bool edge_r = r == 0 || r == 7;
        const bool edge_c = c == 0 || c == 7;
        const bool near_r = r == 1 || r == 6;
        const bool near_c = c == 1 || c == 6;
        int w = 0;
        if (edge_r && edge_c) w = 100;
        else if (near_r && near_c) w = -50;  // X-squares
        else if ((edge_r && near_c) || (near_r && edge_c)) w = -20;  // C-squares
        else if (edge_r || edge_c) w = 10;
        h.cell_weights[r][c] = w;
      }
    }
    h.mobility_weight = 8;
    h.disc_weight = 1;
    h.corner_weight = 25;
    return h;
  }

  friend bool operator==(const Heuristic&, const Heuristic&) = default;
};

namespace detail {

constexpr Bitboard kCorners = 0x8100000000000081ULL;

inline int cell_sum(const Heuristic& h, Bitboard discs) noexcept {
  int sum = 0;
  for (; discs; discs &= discs - 1) {
    const int i = std::countr_zero(discs);
    sum += h.cell_weights[i / 8][i % 8];
  }
  return sum;
}

}  // namespace detail

inline int terminal_value(const GameState& s, Color perspective) noexcept {
  const int margin = s.count(perspective) - s.count(opponent(perspective));
  if (margin > 0) return kWinScore + 100 * margin;
  if (margin < 0) return -kWinScore + 100 * margin;
  return 0;
}

/// Static evaluation from `perspective`. Antisymmetric: swapping the
/// perspective negates the value.
inline int evaluate(const GameState& s, const Heuristic& h, Color perspective) noexcept {
  if (s.is_terminal()) return terminal_value(s, perspective);
  const Bitboard own = s.discs(perspective);
  const Bitboard opp = s.discs(opponent(perspective));
  const int discs = std::popcount(own) - std::popcount(opp);
  const int mob = mobility(s, perspective) - mobility(s, opponent(perspective));
  const int cells = detail::cell_sum(h, own) - detail::cell_sum(h, opp);
  const int corners = std::popcount(own & detail::kCorners) - std::popcount(opp & detail::kCorners);
  return h.disc_weight * discs + h.mobility_weight * mob + cells + h.corner_weight * corners;
}

struct SearchLimits {
  std::optional<int> max_depth;
  std::optional<std::chrono::milliseconds> time_budget;
  std::optional<std::uint64_t> node_budget;

  static SearchLimits depth(int d) { return SearchLimits{d, std::nullopt, std::nullopt}; }

  void validate() const {
    if (!max_depth && !time_budget && !node_budget) throw SearchError("search limits: no limit set");
    if (max_depth && *max_depth < 1) throw SearchError("search limits: max_depth must be >= 1");
  }
};

struct SearchResult {
  Move best_move;
  int value = 0;
  int depth_completed = 0;
  std::uint64_t nodes = 0;
  std::chrono::milliseconds elapsed{0};
};

// ---------------------------------------------------------------------------
// Zobrist hashing

namespace detail {

constexpr std::uint64_t kZobristSeed = 0x6f7468656c6c6f31ULL;  // "othello1"

struct ZobristKeys {
  std::array<std::array<std::uint64_t, 2>, 64> cell{};
  std::uint64_t white_to_move = 0;
  std::uint64_t pass_pending = 0;  // transposition key only

  ZobristKeys() {
    std::mt19937_64 rng(kZobristSeed);
    for (auto& c : cell) c = {rng(), rng()};
    white_to_move = rng();
    pass_pending = rng();
  }
};

inline const ZobristKeys& zobrist_keys() {
  static const ZobristKeys keys;
  return keys;
}

inline std::uint64_t hash_cells(Bitboard b, int color) noexcept {
  const auto& k = zobrist_keys();
  std::uint64_t h = 0;
  for (; b; b &= b - 1) h ^= k.cell[std::countr_zero(b)][color];
  return h;
}

}  // namespace detail

inline std::uint64_t zobrist_hash(const GameState& s) noexcept {
  std::uint64_t h = detail::hash_cells(s.black, 0) ^ detail::hash_cells(s.white, 1);
  if (s.to_move == Color::White) h ^= detail::zobrist_keys().white_to_move;
  return h;
}

/// Incremental update: XOR out/in only the cells that changed.
inline std::uint64_t zobrist_update(std::uint64_t h, const GameState& before, const GameState& after) noexcept {
  h ^= detail::hash_cells(before.black ^ after.black, 0);
  h ^= detail::hash_cells(before.white ^ after.white, 1);
  if (before.to_move != after.to_move) h ^= detail::zobrist_keys().white_to_move;
  return h;
}

// ---------------------------------------------------------------------------
// Transposition table

enum class Bound : std::uint8_t { Exact, Lower, Upper };

struct TranspositionEntry {
  std::uint64_t key = 0;
  int depth = -1;  // -1 marks an empty slot
  int value = 0;
  Bound bound = Bound::Exact;
  Move best_move;
  std::uint32_t generation = 0;
};

/// Fixed power-of-two table. Within a generation a slot is only overwritten
/// by an entry of equal or greater depth; older generations always yield.
class TranspositionTable {
 public:
  explicit TranspositionTable(std::size_t entries = std::size_t{1} << 20)
      : slots_(std::bit_ceil(std::max<std::size_t>(entries, 1))), mask_(slots_.size() - 1) {}

  std::size_t size() const noexcept { return slots_.size(); }

  const TranspositionEntry* probe(std::uint64_t key) const noexcept {
    const auto& e = slots_[key & mask_];
    return (e.depth >= 0 && e.key == key) ? &e : nullptr;
  }

  void store(const TranspositionEntry& entry) noexcept {
    auto& slot = slots_[entry.key & mask_];
    if (slot.depth < 0 || slot.generation != generation_ || entry.depth >= slot.depth) {
      slot = entry;
      slot.generation = generation_;
    }
  }

  void new_search() noexcept { ++generation_; }

  void clear() {
    std::fill(slots_.begin(), slots_.end(), TranspositionEntry{});
    generation_ = 0;
  }

 private:
  std::vector<TranspositionEntry> slots_;
  std::size_t mask_;
  std::uint32_t generation_ = 0;
};

// ---------------------------------------------------------------------------
// Fixed-depth searches

namespace detail {

inline void require_searchable(const GameState& s, int depth) {
  if (s.is_terminal()) throw RulesError(RulesError::Reason::GameOver, "cannot search a finished game");
  if (depth < 1) throw SearchError("search depth must be >= 1");
}

inline std::chrono::milliseconds since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
}

class MinimaxSearch {
 public:
  MinimaxSearch(const Heuristic& h, Color root) : h_(h), root_(root) {}

  int value(const GameState& s, int depth) {
    ++nodes;
    if (depth == 0 || s.is_terminal()) return evaluate(s, h_, root_);
    const bool maximizing = s.to_move == root_;
    int best = maximizing ? -kInfinity : kInfinity;
    for (Move m : legal_moves(s)) {
      const int v = value(apply_move(s, m), depth - 1);
      best = maximizing ? std::max(best, v) : std::min(best, v);
    }
    return best;
  }

  std::uint64_t nodes = 0;

 private:
  const Heuristic& h_;
  Color root_;
};

class NegamaxSearch {
 public:
  explicit NegamaxSearch(const Heuristic& h) : h_(h) {}

  int value(const GameState& s, int depth) {
    ++nodes;
    if (depth == 0 || s.is_terminal()) return evaluate(s, h_, s.to_move);
    int best = -kInfinity;
    for (Move m : legal_moves(s)) best = std::max(best, -value(apply_move(s, m), depth - 1));
    return best;
  }

  std::uint64_t nodes = 0;

 private:
  const Heuristic& h_;
};

struct SearchAborted {};

// Fail-soft negamax alpha-beta. Transposition entries only cut off at an
// exactly matching depth, so the root value never depends on table contents;
// deeper entries still contribute their best move for ordering.
class AlphaBetaSearch {
 public:
  AlphaBetaSearch(const Heuristic& h, TranspositionTable* tt) : h_(h), tt_(tt) {}

  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::optional<std::uint64_t> node_budget;
  bool abortable = false;
  std::uint64_t nodes = 0;

  SearchResult root(const GameState& s, int depth, int alpha, int beta) {
    ++nodes;
    const auto moves = legal_moves(s);
    const std::uint64_t key = tt_key(s);
    const int alpha0 = alpha;
    SearchResult r;
    r.best_move = moves.front();
    int best = -kInfinity;
    for (Move m : moves) {
      const int v = -node(apply_move(s, m), depth - 1, -beta, -alpha);
      if (v > best) {
        best = v;
        r.best_move = m;
      }
      alpha = std::max(alpha, v);
      if (alpha >= beta) break;
    }
    r.value = best;
    r.depth_completed = depth;
    store(key, depth, best, alpha0, beta, r.best_move);
    return r;
  }

 private:
  std::uint64_t tt_key(const GameState& s) const noexcept {
    std::uint64_t k = zobrist_hash(s);
    if (s.consecutive_passes) k ^= detail::zobrist_keys().pass_pending;
    return k;
  }

  void store(std::uint64_t key, int depth, int value, int alpha0, int beta, Move best) {
    if (!tt_) return;
    const Bound b = value <= alpha0 ? Bound::Upper : value >= beta ? Bound::Lower : Bound::Exact;
    tt_->store(TranspositionEntry{key, depth, value, b, best, 0});
  }

  void check_limits() {
    if (!abortable) return;
    if (node_budget && nodes > *node_budget) throw SearchAborted{};
    if (deadline && (nodes & 1023) == 0 && std::chrono::steady_clock::now() >= *deadline) throw SearchAborted{};
  }

  int node(const GameState& s, int depth, int alpha, int beta) {
    ++nodes;
    check_limits();
    if (depth == 0 || s.is_terminal()) return evaluate(s, h_, s.to_move);

    const std::uint64_t key = tt_ ? tt_key(s) : 0;
    std::optional<Move> hint;
    if (tt_) {
      if (const auto* e = tt_->probe(key)) {
        if (e->depth == depth) {
          if (e->bound == Bound::Exact) return e->value;
          if (e->bound == Bound::Lower) alpha = std::max(alpha, e->value);
          if (e->bound == Bound::Upper) beta = std::min(beta, e->value);
          if (alpha >= beta) return e->value;
        }
        hint = e->best_move;
      }
    }

    auto moves = legal_moves(s);
    if (hint) {
      auto it = std::find(moves.begin(), moves.end(), *hint);
      if (it != moves.end()) std::rotate(moves.begin(), it, it + 1);
    }

    const int alpha0 = alpha;
    int best = -kInfinity;
    Move best_move = moves.front();
    for (Move m : moves) {
      const int v = -node(apply_move(s, m), depth - 1, -beta, -alpha);
      if (v > best) {
        best = v;
        best_move = m;
      }
      alpha = std::max(alpha, v);
      if (alpha >= beta) break;
    }
    store(key, depth, best, alpha0, beta, best_move);
    return best;
  }

  const Heuristic& h_;
  TranspositionTable* tt_;
};

}  // namespace detail

/// Exhaustive depth-limited minimax, value from the mover's perspective.
/// Ties go to the first maximal move in legal_moves order.
inline SearchResult minimax(const GameState& s, int depth, const Heuristic& h) {
  detail::require_searchable(s, depth);
  const auto t0 = std::chrono::steady_clock::now();
  detail::MinimaxSearch search(h, s.to_move);
  ++search.nodes;
  SearchResult r;
  int best = -kInfinity;
  for (Move m : legal_moves(s)) {
    const int v = search.value(apply_move(s, m), depth - 1);
    if (v > best) {
      best = v;
      r.best_move = m;
    }
  }
  r.value = best;
  r.depth_completed = depth;
  r.nodes = search.nodes;
  r.elapsed = detail::since(t0);
  return r;
}

inline SearchResult negamax(const GameState& s, int depth, const Heuristic& h) {
  detail::require_searchable(s, depth);
  const auto t0 = std::chrono::steady_clock::now();
  detail::NegamaxSearch search(h);
  ++search.nodes;
  SearchResult r;
  int best = -kInfinity;
  for (Move m : legal_moves(s)) {
    const int v = -search.value(apply_move(s, m), depth - 1);
    if (v > best) {
      best = v;
      r.best_move = m;
    }
  }
  r.value = best;
  r.depth_completed = depth;
  r.nodes = search.nodes;
  r.elapsed = detail::since(t0);
  return r;
}

inline SearchResult alphabeta(const GameState& s, int depth, const Heuristic& h, int alpha = -kInfinity,
                              int beta = kInfinity, TranspositionTable* tt = nullptr) {
  if (!(alpha < beta)) throw SearchError("alpha-beta window is empty");
  detail::require_searchable(s, depth);
  const auto t0 = std::chrono::steady_clock::now();
  detail::AlphaBetaSearch search(h, tt);
  auto r = search.root(s, depth, alpha, beta);
  r.nodes = search.nodes;
  r.elapsed = detail::since(t0);
  return r;
}

/// Alpha-beta at depths 1, 2, ... until a limit trips. Depth 1 always runs to
/// completion so a legal move is available under any budget; an aborted
/// iteration never contributes its move.
inline SearchResult iterative_deepening(const GameState& s, const SearchLimits& limits, const Heuristic& h,
                                        TranspositionTable& tt) {
  limits.validate();
  if (s.is_terminal()) throw RulesError(RulesError::Reason::GameOver, "cannot search a finished game");
  const auto t0 = std::chrono::steady_clock::now();
  tt.new_search();

  detail::AlphaBetaSearch search(h, &tt);
  if (limits.time_budget) search.deadline = t0 + *limits.time_budget;
  search.node_budget = limits.node_budget;

  // 60 placements plus interleaved passes bound any game; deeper is wasted.
  const int cap = limits.max_depth.value_or(128);
  SearchResult best;
  for (int depth = 1; depth <= cap; ++depth) {
    search.abortable = depth > 1;
    if (depth > 1) {
      if (search.deadline && std::chrono::steady_clock::now() >= *search.deadline) break;
      if (search.node_budget && search.nodes >= *search.node_budget) break;
    }
    try {
      const auto r = search.root(s, depth, -kInfinity, kInfinity);
      best.best_move = r.best_move;
      best.value = r.value;
      best.depth_completed = depth;
    } catch (const detail::SearchAborted&) {
      break;
    }
    if (depth > 2 * s.empty_count() + 2) break;
  }
  best.nodes = search.nodes;
  best.elapsed = detail::since(t0);
  return best;
}

// ---------------------------------------------------------------------------
// Monte-Carlo tree search

namespace detail {

inline Move random_legal_move(const GameState& s, std::mt19937_64& rng) {
  const Bitboard moves = placement_mask(s);
  if (moves == 0) return Move::pass();
  std::uniform_int_distribution<int> pick(0, std::popcount(moves) - 1);
  Bitboard m = moves;
  for (int k = pick(rng); k > 0; --k) m &= m - 1;
  return Move(Coord::from_index(std::countr_zero(m)));
}

// 1 for a win by `side`, 0.5 for a draw, 0 for a loss.
inline double playout(GameState s, Color side, std::mt19937_64& rng) {
  while (!s.is_terminal()) s = apply_move(s, random_legal_move(s, rng));
  const int margin = s.count(side) - s.count(opponent(side));
  return margin > 0 ? 1.0 : margin < 0 ? 0.0 : 0.5;
}

struct MctsNode {
  GameState state;
  Move move;
  int parent = -1;
  std::vector<int> children;
  std::vector<Move> untried;
  std::uint64_t visits = 0;
  double reward = 0;  // for the player who made `move`
  int depth = 0;
};

}  // namespace detail

struct MctsRootStats {
  Move move;
  std::uint64_t visits = 0;
};

/// UCT with uniform random playouts. Returns the most visited root child;
/// `value` is that child's mean reward in permille.
inline SearchResult mcts_choose(const GameState& s, const SearchLimits& limits, double exploration,
                                std::uint64_t seed = 0, std::vector<MctsRootStats>* root_stats = nullptr) {
  if (!limits.node_budget && !limits.time_budget) throw SearchError("mcts needs a playout or time budget");
  if (s.is_terminal()) throw RulesError(RulesError::Reason::GameOver, "cannot search a finished game");
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(seed);

  std::vector<detail::MctsNode> tree;
  tree.push_back({s, Move::pass(), -1, {}, legal_moves(s), 0, 0.0, 0});
  std::uint64_t playouts = 0;
  int max_depth = 0;

  auto out_of_budget = [&] {
    if (playouts == 0) return false;
    if (limits.node_budget && playouts >= *limits.node_budget) return true;
    if (limits.time_budget && (playouts & 63) == 0 && detail::since(t0) >= *limits.time_budget) return true;
    return false;
  };

  while (!out_of_budget()) {
    int cur = 0;
    // Selection
    while (tree[cur].untried.empty() && !tree[cur].children.empty()) {
      const double log_n = std::log(static_cast<double>(tree[cur].visits));
      int best = -1;
      double best_score = -1.0;
      for (int child : tree[cur].children) {
        const auto& c = tree[child];
        const double ucb = c.reward / c.visits + exploration * std::sqrt(log_n / c.visits);
        if (ucb > best_score) {
          best_score = ucb;
          best = child;
        }
      }
      cur = best;
    }
    // Expansion
    if (!tree[cur].untried.empty()) {
      auto& untried = tree[cur].untried;
      std::uniform_int_distribution<std::size_t> pick(0, untried.size() - 1);
      const std::size_t i = pick(rng);
      const Move m = untried[i];
      untried.erase(untried.begin() + static_cast<std::ptrdiff_t>(i));
      detail::MctsNode child;
      child.state = apply_move(tree[cur].state, m);
      child.move = m;
      child.parent = cur;
      child.depth = tree[cur].depth + 1;
      if (!child.state.is_terminal()) child.untried = legal_moves(child.state);
      tree.push_back(std::move(child));
      const int id = static_cast<int>(tree.size()) - 1;
      tree[cur].children.push_back(id);
      cur = id;
      max_depth = std::max(max_depth, tree[cur].depth);
    }
    // Simulation, scored for Black and converted per node on the way up.
    const double black_reward = detail::playout(tree[cur].state, Color::Black, rng);
    ++playouts;
    // Backpropagation
    for (int n = cur; n >= 0; n = tree[n].parent) {
      auto& node = tree[n];
      ++node.visits;
      if (node.parent >= 0) {
        const Color mover = tree[node.parent].state.to_move;
        node.reward += mover == Color::Black ? black_reward : 1.0 - black_reward;
      }
    }
  }

  SearchResult r;
  std::uint64_t most = 0;
  for (int child : tree[0].children) {
    if (tree[child].visits > most) {
      most = tree[child].visits;
      r.best_move = tree[child].move;
      r.value = static_cast<int>(std::lround(1000.0 * tree[child].reward / tree[child].visits));
    }
  }
  if (root_stats) {
    root_stats->clear();
    for (int child : tree[0].children) root_stats->push_back({tree[child].move, tree[child].visits});
  }
  r.depth_completed = std::max(1, max_depth);
  r.nodes = playouts;
  r.elapsed = detail::since(t0);
  return r;
}

}  // namespace othello

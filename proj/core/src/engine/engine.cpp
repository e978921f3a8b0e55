#include "gavel/engine/engine.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "gavel/common/error.hpp"
#include "gavel/common/rng.hpp"

namespace gavel::engine {

namespace {

constexpr std::uint64_t kZobristSeed = 0x6761'7665'6C5A'6F62ULL;

struct Ctx {
  const CompiledGame& game;
  const GameState& state;
  int player;
  int to = -1;
  int from = -1;
  int between = -1;
  int depth = 0;

  int site(SiteRef ref) const noexcept {
    switch (ref) {
      case SiteRef::To: return to;
      case SiteRef::From: return from;
      case SiteRef::Between: return between;
      case SiteRef::LastTo: return state.last_to;
      case SiteRef::LastFrom: return state.last_from;
    }
    return -1;
  }
};

SiteSet around(const BoardGraph& board, int site) {
  SiteSet out;
  if (site < 0) return out;
  for (int d : board.directions(DirClass::Adjacent)) {
    const int t = board.neighbor(site, d);
    if (t >= 0) out.set(t);
  }
  return out;
}

SiteSet region(const RegionExpr& r, const Ctx& c) {
  const BoardGraph& b = c.game.board;
  switch (r.kind) {
    case RegionKind::Empty: {
      SiteSet s = b.all();
      return s.subtract(c.state.occupied[0]);
    }
    case RegionKind::Board: return b.all();
    case RegionKind::Top: return b.top();
    case RegionKind::Bottom: return b.bottom();
    case RegionKind::Left: return b.left();
    case RegionKind::Right: return b.right();
    case RegionKind::Corners: return b.corners();
    case RegionKind::Mover: return c.game.region_union[c.player];
    case RegionKind::Next: return c.game.region_union[other(c.player)];
    case RegionKind::Around: return around(b, c.site(r.site));
    case RegionKind::Expand: {
      SiteSet s = region(r.inner.front(), c);
      for (int i = 0; i < r.steps; ++i) s |= b.neighbourhood(s, DirClass::Adjacent);
      return s;
    }
  }
  return {};
}

std::vector<Move> generate(const CompiledGame& game, const GameState& state, int player, int depth);

bool eval(const Condition& cond, const Ctx& c) {
  const GameState& s = c.state;
  switch (cond.kind) {
    case CondKind::Line: {
      int through = s.last_to;
      if (through >= 0 && !s.occupied[c.player].test(through)) through = -1;
      return has_line(c.game, s, c.player, cond.n, cond.dirs, through);
    }
    case CondKind::Connected: return is_connected(c.game, s, c.player, cond.n, cond.target, cond.dirs);
    case CondKind::In: {
      const int site = c.site(cond.site);
      return site >= 0 && region(cond.region, c).test(site);
    }
    case CondKind::Empty: {
      const int site = c.site(cond.site);
      return site >= 0 && s.empty(site);
    }
    case CondKind::Occupied: {
      const int site = c.site(cond.site);
      return site >= 0 && !s.empty(site);
    }
    case CondKind::Enemy: {
      const int site = c.site(cond.site);
      return site >= 0 && s.occupied[other(c.player)].test(site);
    }
    case CondKind::Friend: {
      const int site = c.site(cond.site);
      return site >= 0 && s.occupied[c.player].test(site);
    }
    case CondKind::NoMoves: {
      const int who = cond.role == Role::Mover ? c.player : other(c.player);
      // Nested no-moves checks inside move generation are cut off.
      if (c.depth > 0) return false;
      if (who == s.mover && !s.terminal && c.depth == 0 && c.to < 0 && c.from < 0) return s.legal.empty();
      return generate(c.game, s, who, c.depth + 1).empty();
    }
    case CondKind::Not: return !eval(cond.children.front(), c);
    case CondKind::And:
      for (const Condition& k : cond.children)
        if (!eval(k, c)) return false;
      return true;
    case CondKind::Or:
      for (const Condition& k : cond.children)
        if (eval(k, c)) return true;
      return false;
  }
  return false;
}

void put(GameState& s, const CompiledGame& game, int site, int piece) {
  const int old = s.piece_at(site);
  if (old >= 0) {
    const int owner = game.pieces[old].owner;
    s.hash ^= zobrist_piece(site, old, owner);
    s.occupied[owner].reset(site);
    s.occupied[0].reset(site);
  }
  s.cells[site] = static_cast<std::uint8_t>(piece + 1);
  if (piece >= 0) {
    const int owner = game.pieces[piece].owner;
    s.hash ^= zobrist_piece(site, piece, owner);
    s.occupied[owner].set(site);
    s.occupied[0].set(site);
  }
}

struct Generator {
  const CompiledGame& game;
  const GameState& state;
  int player;
  int depth;
  std::vector<Move>& out;

  Ctx ctx() const { return Ctx{game, state, player, -1, -1, -1, depth}; }

  void add(const MoveRule& r) {
    const int piece = game.add_piece[player];
    if (piece < 0) return;
    Ctx c = ctx();
    SiteSet targets = region(r.add_region, c);
    targets.subtract(state.occupied[0]);
    targets.for_each([&](int t) {
      c.to = t;
      if (r.add_condition && !eval(*r.add_condition, c)) return;
      Move m;
      m.kind = MoveKind::Add;
      m.to = static_cast<std::int16_t>(t);
      m.piece = static_cast<std::int16_t>(piece);
      m.effect = static_cast<std::int8_t>(r.effect);
      out.push_back(m);
    });
  }

  // Appends removals of a clause; returns false if the capture list overflows.
  static void collect(const Clause& cl, const Ctx& c, Move& m, int& n) {
    for (SiteRef ref : cl.removals) {
      const int site = c.site(ref);
      if (site < 0 || c.state.empty(site) || n >= 2) continue;
      if (n == 1 && m.captures[0] == site) continue;
      m.captures[n++] = static_cast<std::int16_t>(site);
    }
  }

  static bool captured(const Move& m, int site) { return m.captures[0] == site || m.captures[1] == site; }

  void emit(MoveKind kind, int from, int to, Move m, const MoveRule& r) {
    if (!state.empty(to) && !captured(m, to)) return;
    m.kind = kind;
    m.from = static_cast<std::int16_t>(from);
    m.to = static_cast<std::int16_t>(to);
    m.piece = static_cast<std::int16_t>(state.piece_at(from));
    m.effect = static_cast<std::int8_t>(r.effect);
    out.push_back(m);
  }

  bool landing_ok(const MoveRule& r, const Ctx& c) const {
    if (r.to.condition) return eval(*r.to.condition, c);
    return state.empty(c.to);
  }

  void from_site(const MoveRule& r, int from) {
    const BoardGraph& b = game.board;
    switch (r.kind) {
      case RuleKind::Add: add(r); return;
      case RuleKind::Or:
        for (const MoveRule& k : r.children) from_site(k, from);
        return;
      case RuleKind::ForEachPiece: return;
      case RuleKind::Step:
        for (int d : b.directions(r.dirs, player)) {
          const int t = b.neighbor(from, d);
          if (t < 0) continue;
          Ctx c = ctx();
          c.from = from;
          c.to = t;
          if (!landing_ok(r, c)) continue;
          Move m;
          int n = 0;
          collect(r.to, c, m, n);
          emit(MoveKind::Step, from, t, m, r);
        }
        return;
      case RuleKind::Slide:
        for (int d : b.directions(r.dirs, player)) {
          Ctx c = ctx();
          c.from = from;
          for (int t = b.neighbor(from, d); t >= 0; t = b.neighbor(t, d)) {
            c.to = t;
            c.between = t;
            if (landing_ok(r, c)) {
              Move m;
              int n = 0;
              collect(r.to, c, m, n);
              emit(MoveKind::Slide, from, t, m, r);
            }
            const bool go_on = r.between.condition ? eval(*r.between.condition, c) : state.empty(t);
            if (!go_on) break;
          }
        }
        return;
      case RuleKind::Hop:
        for (int d : b.directions(r.dirs, player)) {
          const int mid = b.neighbor(from, d);
          if (mid < 0) continue;
          const int t = b.neighbor(mid, d);
          if (t < 0) continue;
          Ctx c = ctx();
          c.from = from;
          c.between = mid;
          c.to = t;
          const bool over = r.between.condition ? eval(*r.between.condition, c) : !state.empty(mid);
          if (!over || !landing_ok(r, c)) continue;
          Move m;
          int n = 0;
          collect(r.between, c, m, n);
          collect(r.to, c, m, n);
          emit(MoveKind::Hop, from, t, m, r);
        }
        return;
    }
  }

  void top(const MoveRule& r) {
    switch (r.kind) {
      case RuleKind::Add: add(r); return;
      case RuleKind::Or:
        for (const MoveRule& k : r.children) top(k);
        return;
      case RuleKind::ForEachPiece:
        state.occupied[player].for_each([&](int site) {
          const PieceType& t = game.pieces[state.piece_at(site)];
          if (t.moves) from_site(*t.moves, site);
        });
        return;
      default:
        // A bare piece-level rule applies to every piece of the player.
        state.occupied[player].for_each([&](int site) { from_site(r, site); });
        return;
    }
  }
};

void run_effect(const CompiledGame& game, GameState& s, const Enclose& e, int player, const Move& move) {
  const BoardGraph& b = game.board;
  Ctx c{game, s, player, move.to, move.from, -1, 1};
  const int origin = c.site(e.origin);
  if (origin < 0) return;
  const auto dirs = b.directions(e.dirs, player);
  auto inside = [&](int x) {
    c.between = x;
    return e.between.condition ? eval(*e.between.condition, c) : s.occupied[other(player)].test(x);
  };
  SiteSet seen;
  std::vector<int> stack, group;
  for (int d : dirs) {
    const int start = b.neighbor(origin, d);
    if (start < 0 || seen.test(start) || !inside(start)) continue;
    group.clear();
    stack.assign(1, start);
    seen.set(start);
    bool liberty = false;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      group.push_back(x);
      for (int dd : dirs) {
        const int y = b.neighbor(x, dd);
        if (y < 0 || seen.test(y)) continue;
        if (s.empty(y)) {
          liberty = true;
        } else if (inside(y)) {
          seen.set(y);
          stack.push_back(y);
        }
      }
    }
    if (liberty) continue;
    for (int x : group) {
      if (e.between.removals.empty()) {
        put(s, game, x, -1);
        continue;
      }
      c.between = x;
      for (SiteRef ref : e.between.removals) {
        const int site = c.site(ref);
        if (site >= 0) put(s, game, site, -1);
      }
    }
  }
}

// Placement change of a move, without end evaluation or turn change.
void perform(const CompiledGame& game, GameState& s, const Move& m, int player) {
  for (int cap : m.captures)
    if (cap >= 0) put(s, game, cap, -1);
  if (m.kind == MoveKind::Add) {
    put(s, game, m.to, m.piece);
  } else {
    const int piece = m.piece >= 0 ? m.piece : s.piece_at(m.from);
    put(s, game, m.from, -1);
    put(s, game, m.to, piece);
  }
  s.last_from = m.from;
  s.last_to = m.to;
  if (m.effect >= 0) run_effect(game, s, game.effects[m.effect], player, m);
}

GameState scratch_copy(const GameState& s) {
  GameState t;
  t.cells = s.cells;
  for (int i = 0; i < 3; ++i) t.occupied[i] = s.occupied[i];
  t.mover = s.mover;
  t.last_to = s.last_to;
  t.last_from = s.last_from;
  t.hash = s.hash;
  return t;
}

std::vector<Move> generate(const CompiledGame& game, const GameState& state, int player, int depth) {
  std::vector<Move> out;
  Generator{game, state, player, depth, out}.top(game.play);
  if (game.needs_dedupe && out.size() > 1) {
    std::unordered_set<std::uint64_t> seen;
    std::size_t w = 0;
    for (const Move& m : out) {
      const std::uint64_t key = (static_cast<std::uint64_t>(m.kind) << 40) |
                                (static_cast<std::uint64_t>(m.from + 1) << 20) | static_cast<std::uint64_t>(m.to);
      if (seen.insert(key).second) out[w++] = m;
    }
    out.resize(w);
  }
  if (game.no_repeat && !state.history.empty()) {
    std::erase_if(out, [&](const Move& m) {
      GameState t = scratch_copy(state);
      perform(game, t, m, player);
      const std::uint64_t h = t.hash ^ zobrist_mover(t.mover) ^ zobrist_mover(other(player));
      return std::find(state.history.begin(), state.history.end(), h) != state.history.end();
    });
  }
  return out;
}

std::optional<Outcome> evaluate_end(const CompiledGame& game, const GameState& s, int player) {
  const Ctx c{game, s, player};
  for (std::size_t i = 0; i < game.end.size(); ++i) {
    const EndRule& rule = game.end[i];
    if (!eval(rule.condition, c)) continue;
    const int who = rule.who == Role::Mover ? player : other(player);
    Outcome o;
    o.reason = Outcome::Reason::EndRule;
    o.rule = static_cast<int>(i);
    o.winner = rule.result == Result::Win ? who : rule.result == Result::Loss ? other(who) : 0;
    return o;
  }
  return std::nullopt;
}

void settle(const CompiledGame& game, GameState& s, int previous) {
  s.terminal.reset();
  s.legal = generate(game, s, s.mover, 0);
  if (previous != 0) s.terminal = evaluate_end(game, s, previous);
  if (!s.terminal && s.legal.empty()) s.terminal = Outcome{0, Outcome::Reason::NoMovesDefault, -1};
  if (s.terminal) s.legal.clear();
}

}  // namespace

std::string_view to_string(MoveKind kind) noexcept {
  switch (kind) {
    case MoveKind::Add: return "Add";
    case MoveKind::Step: return "Step";
    case MoveKind::Slide: return "Slide";
    case MoveKind::Hop: return "Hop";
  }
  return "?";
}

std::string to_string(const Move& move) {
  std::ostringstream out;
  out << to_string(move.kind) << ' ';
  if (move.from >= 0) out << move.from << '-';
  out << move.to;
  for (int c : move.captures)
    if (c >= 0) out << 'x' << c;
  return out.str();
}

std::string_view to_string(Outcome::Reason reason) noexcept {
  switch (reason) {
    case Outcome::Reason::EndRule: return "end-rule";
    case Outcome::Reason::MoveLimit: return "move-limit";
    case Outcome::Reason::NoMovesDefault: return "no-moves-default";
  }
  return "?";
}

std::uint64_t zobrist_piece(int site, int piece, int owner) noexcept {
  return splitmix64(kZobristSeed ^ ((static_cast<std::uint64_t>(site) * 256 + piece) * 4 + owner));
}

std::uint64_t zobrist_mover(int player) noexcept {
  return splitmix64(~kZobristSeed + static_cast<std::uint64_t>(player));
}

void set_site(const CompiledGame& game, GameState& state, int site, int piece) {
  if (site < 0 || site >= game.board.size()) throw Error(Errc::InvalidParams, "site out of range");
  put(state, game, site, piece);
}

void refresh(const CompiledGame& game, GameState& s) {
  std::uint64_t h = zobrist_mover(s.mover);
  for (int i = 0; i < game.board.size(); ++i)
    if (const int p = s.piece_at(i); p >= 0) h ^= zobrist_piece(i, p, game.pieces[p].owner);
  s.hash = h;
  s.history.assign(1, h);
  settle(game, s, s.last_to >= 0 ? other(s.mover) : 0);
}

GameState initial_state(const CompiledGame& game) {
  GameState s;
  s.hash = zobrist_mover(1);
  for (const Placement& p : game.start) {
    const SiteSet sites = static_region(game, s, p.region, game.pieces[p.piece].owner);
    // Conflicts are checked against the board before this directive.
    const SiteSet clash = sites & s.occupied[0];
    if (clash.any()) {
      throw Error(Errc::PlacementConflict, "placement conflict at site " + std::to_string(clash.first()),
                  static_cast<std::size_t>(clash.first()));
    }
    sites.for_each([&](int site) { put(s, game, site, p.piece); });
  }
  s.history.assign(1, s.hash);
  settle(game, s, 0);
  return s;
}

const std::vector<Move>& legal_moves(const CompiledGame&, const GameState& state) { return state.legal; }

void advance(const CompiledGame& game, GameState& s, const Move& move) {
  const int player = s.mover;
  perform(game, s, move, player);
  s.move_count[player]++;
  s.hash ^= zobrist_mover(player) ^ zobrist_mover(other(player));
  s.mover = other(player);
  s.history.push_back(s.hash);
  settle(game, s, player);
}

GameState apply(const CompiledGame& game, const GameState& state, const Move& move) {
  if (state.terminal) throw Error(Errc::IllegalMove, "game is over");
  const auto it = std::find(state.legal.begin(), state.legal.end(), move);
  if (it == state.legal.end()) throw Error(Errc::IllegalMove, "illegal move " + to_string(move));
  GameState next = state;
  advance(game, next, *it);
  return next;
}

std::optional<Outcome> outcome(const CompiledGame& game, const GameState& state) {
  if (state.terminal) return state.terminal;
  return evaluate_end(game, state, other(state.mover));
}

std::vector<Move> generate_moves(const CompiledGame& game, const GameState& state, int player) {
  return generate(game, state, player, 0);
}

int line_length(const CompiledGame& game, const GameState& state, int player, int site, DirClass dirs) {
  const BoardGraph& b = game.board;
  const SiteSet& mine = state.occupied[player];
  if (site < 0 || !mine.test(site)) return 0;
  int best = 0;
  for (int d : b.axes(dirs)) {
    int run = 1;
    for (int t = b.neighbor(site, d); t >= 0 && mine.test(t); t = b.neighbor(t, d)) ++run;
    const int o = b.opposite(d);
    for (int t = b.neighbor(site, o); t >= 0 && mine.test(t); t = b.neighbor(t, o)) ++run;
    best = std::max(best, run);
  }
  return best;
}

bool has_line(const CompiledGame& game, const GameState& state, int player, int n, DirClass dirs, int through) {
  if (through >= 0) return line_length(game, state, player, through, dirs) >= n;
  const BoardGraph& b = game.board;
  const SiteSet& mine = state.occupied[player];
  bool found = false;
  mine.for_each([&](int site) {
    if (found) return;
    for (int d : b.axes(dirs)) {
      const int prev = b.neighbor(site, b.opposite(d));
      if (prev >= 0 && mine.test(prev)) continue;  // not the start of a run
      int run = 1;
      for (int t = b.neighbor(site, d); t >= 0 && mine.test(t); t = b.neighbor(t, d)) ++run;
      if (run >= n) {
        found = true;
        return;
      }
    }
  });
  return found;
}

bool is_connected(const CompiledGame& game, const GameState& state, int player, int k, ConnectTarget target,
                  DirClass dirs) {
  const BoardGraph& b = game.board;
  const std::vector<SiteSet>* targets = nullptr;
  switch (target) {
    case ConnectTarget::SidesNoCorners: targets = &b.sides_no_corners(); break;
    case ConnectTarget::Corners: targets = &b.corner_list(); break;
    case ConnectTarget::Sides: targets = &b.sides(); break;
    case ConnectTarget::Regions: targets = &game.regions[player]; break;
  }
  if (static_cast<int>(targets->size()) < k) return false;
  SiteSet touching;
  for (const SiteSet& t : *targets) touching |= t;
  const SiteSet& mine = state.occupied[player];
  if (!mine.intersects(touching)) return false;

  const auto step = b.directions(dirs, player);
  SiteSet seen;
  std::vector<int> stack;
  bool result = false;
  (mine & touching).for_each([&](int seed) {
    if (result || seen.test(seed)) return;
    SiteSet group;
    stack.assign(1, seed);
    seen.set(seed);
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      group.set(x);
      for (int d : step) {
        const int y = b.neighbor(x, d);
        if (y >= 0 && mine.test(y) && !seen.test(y)) {
          seen.set(y);
          stack.push_back(y);
        }
      }
    }
    int hits = 0;
    for (const SiteSet& t : *targets) hits += group.intersects(t) ? 1 : 0;
    if (hits >= k) result = true;
  });
  return result;
}

SiteSet static_region(const CompiledGame& game, const GameState& state, const RegionExpr& r, int player) {
  return region(r, Ctx{game, state, player});
}

}  // namespace gavel::engine

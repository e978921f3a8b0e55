#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "gavel/common/error.hpp"
#include "gavel/common/rng.hpp"
#include "oracles/brute_force.hpp"
#include "oracles/tictactoe.hpp"
#include "support/support.hpp"

using namespace gavel;
using namespace gavel::engine;
using gavel::test::at;
using gavel::test::compile_corpus;
using gavel::test::compile_text;
using gavel::test::owner_at;

namespace {

int count_owner(const CompiledGame& g, const GameState& s, int player) {
  int n = 0;
  for (int i = 0; i < g.board.size(); ++i) n += owner_at(g, s, i) == player;
  return n;
}

/// Checks occupancy sets and the incremental hash against a rebuild.
void expect_consistent(const CompiledGame& g, const GameState& s) {
  for (int i = 0; i < g.board.size(); ++i) {
    const int o = owner_at(g, s, i);
    ASSERT_EQ(s.occupied[1].test(i), o == 1) << "site " << i;
    ASSERT_EQ(s.occupied[2].test(i), o == 2) << "site " << i;
    ASSERT_EQ(s.occupied[0].test(i), o != 0) << "site " << i;
  }
  GameState copy = s;
  refresh(g, copy);
  ASSERT_EQ(copy.hash, s.hash);
}

Move find_move(const GameState& s, MoveKind kind, int from, int to) {
  for (const auto& m : s.legal)
    if (m.kind == kind && m.from == from && m.to == to) return m;
  ADD_FAILURE() << "move not legal: " << from << "->" << to;
  return {};
}

}  // namespace

// ---------------------------------------------------------------- boards

TEST(Board, SquareHasNSquaredSites) {
  for (int n = 1; n <= 12; ++n) EXPECT_EQ(BoardGraph::square(n).size(), n * n);
}

TEST(Board, HexHasCenteredHexagonalCount) {
  for (int n = 1; n <= 9; ++n) EXPECT_EQ(BoardGraph::hex(n).size(), 3 * n * n - 3 * n + 1);
}

TEST(Board, AdjacencyIsSymmetric) {
  for (const auto& b : {BoardGraph::square(5), BoardGraph::hex(4), BoardGraph::square(8, 45), BoardGraph::hex(5, 90)}) {
    for (int s = 0; s < b.size(); ++s)
      for (int d = 0; d < b.direction_count(); ++d) {
        const int t = b.neighbor(s, d);
        if (t < 0) continue;
        EXPECT_EQ(b.neighbor(t, b.opposite(d)), s);
      }
  }
}

TEST(Board, SquareNeighbourCounts) {
  const auto b = BoardGraph::square(4);
  auto count = [&](int s, DirClass c) {
    int k = 0;
    for (int d : b.directions(c))
      if (b.neighbor(s, d) >= 0) ++k;
    return k;
  };
  EXPECT_EQ(count(b.site_at(0, 0), DirClass::Orthogonal), 2);
  EXPECT_EQ(count(b.site_at(0, 0), DirClass::Adjacent), 3);
  EXPECT_EQ(count(b.site_at(1, 1), DirClass::Adjacent), 8);
  EXPECT_EQ(count(b.site_at(1, 1), DirClass::Forwards), 3);
  EXPECT_EQ(b.corner_list().size(), 4u);
  EXPECT_EQ(b.sides().size(), 4u);
}

TEST(Board, HexAdjacentIsOrthogonal) {
  const auto b = BoardGraph::hex(3);
  const int c = b.site_at(0, 0);
  int k = 0;
  for (int d : b.directions(DirClass::Adjacent))
    if (b.neighbor(c, d) >= 0) ++k;
  EXPECT_EQ(k, 6);
  EXPECT_EQ(b.corner_list().size(), 6u);
}

TEST(Board, ForwardIsMirroredForSecondPlayer) {
  const auto b = BoardGraph::square(5);
  const int s = b.site_at(2, 2);
  ASSERT_EQ(b.directions(DirClass::Forward, 1).size(), 1u);
  EXPECT_EQ(b.neighbor(s, b.directions(DirClass::Forward, 1)[0]), b.site_at(2, 3));
  EXPECT_EQ(b.neighbor(s, b.directions(DirClass::Forward, 2)[0]), b.site_at(2, 1));
}

// ---------------------------------------------------------------- corpus games

TEST(Compile, ExampleGamesCompile) {
  for (const char* name : {"havabu", "hopthrough", "yavago", "tictactoe", "breakthrough", "jumpers", "queensweep",
                           "gomoku", "hex", "havannah", "yavalath", "gonnect"})
    EXPECT_NO_THROW(compile_corpus(name)) << name;
}

TEST(Compile, HavabuStartsEmpty) {
  const auto g = compile_corpus("havabu");
  const auto s = initial_state(g);
  EXPECT_EQ(g.board.size(), 64);
  EXPECT_TRUE(s.occupied[0].none());
  EXPECT_EQ(s.mover, 1);
  EXPECT_EQ(s.legal.size(), 64u);
}

TEST(Compile, HopThroughStartsWithTwoRanksEach) {
  const auto g = compile_corpus("hopthrough");
  const auto s = initial_state(g);
  EXPECT_EQ(count_owner(g, s, 1), 16);
  EXPECT_EQ(count_owner(g, s, 2), 16);
  for (int c = 0; c < 8; ++c) {
    for (int r : {0, 1}) EXPECT_EQ(owner_at(g, s, at(g, c, r)), 1);
    for (int r : {6, 7}) EXPECT_EQ(owner_at(g, s, at(g, c, r)), 2);
    for (int r = 2; r <= 5; ++r) EXPECT_EQ(owner_at(g, s, at(g, c, r)), 0);
  }
}

TEST(Compile, YavaGoHasSixtyOneSites) {
  const auto g = compile_corpus("yavago");
  EXPECT_EQ(g.board.size(), 61);
  EXPECT_TRUE(g.no_repeat);
  EXPECT_EQ(initial_state(g).legal.size(), 61u);
}

TEST(Compile, ConflictingPlacementsAreRejected) {
  const auto g = compile_text(R"((game "X" (players 2) (equipment { (board (square 3)) (piece "A" Each) })
      (rules (start { (place "A1" (sites Bottom)) (place "A2" (sites Left)) })
             (play (move Add (to (sites Empty)))) (end (if (is Line 3) (result Mover Win))))))");
  try {
    initial_state(g);
    FAIL() << "expected PlacementConflict";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PlacementConflict);
  }
}

TEST(Apply, IllegalMoveThrows) {
  const auto g = compile_corpus("hopthrough");
  const auto s = initial_state(g);
  Move bogus{MoveKind::Hop, static_cast<std::int16_t>(at(g, 0, 0)), static_cast<std::int16_t>(at(g, 0, 4))};
  try {
    apply(g, s, bogus);
    FAIL() << "expected IllegalMove";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::IllegalMove);
  }
}

// ---------------------------------------------------------------- Havabu

TEST(Havabu, PlacementAvoidsSitesAroundLastMove) {
  const auto g = compile_corpus("havabu");
  Rng rng(7);
  auto s = initial_state(g);
  for (int ply = 0; ply < 12 && !s.terminal; ++ply) {
    const Move m = s.legal[rng.below(s.legal.size())];
    advance(g, s, m);
    if (s.terminal) break;
    const auto [lc, lr] = g.board.lattice(m.to);
    std::set<int> expected;
    for (int i = 0; i < 64; ++i) {
      if (!s.empty(i)) continue;
      const auto [c, r] = g.board.lattice(i);
      if (std::max(std::abs(c - lc), std::abs(r - lr)) == 1) continue;
      expected.insert(i);
    }
    std::set<int> got;
    for (const auto& mv : s.legal) got.insert(mv.to);
    EXPECT_EQ(got, expected) << "ply " << ply;
  }
}

TEST(Havabu, ConnectingThreeSidesWins) {
  const auto g = compile_corpus("havabu");
  auto s = initial_state(g);
  const int p1 = *g.piece_by_ref("Marker1");
  // Row 3 joins left and right; column 3 below it reaches the bottom.
  for (int c = 0; c < 8; ++c) set_site(g, s, at(g, c, 3), p1);
  set_site(g, s, at(g, 3, 2), p1);
  set_site(g, s, at(g, 3, 1), p1);
  refresh(g, s);
  EXPECT_FALSE(s.terminal);
  EXPECT_FALSE(is_connected(g, s, 1, 3, ConnectTarget::SidesNoCorners));
  EXPECT_TRUE(is_connected(g, s, 1, 2, ConnectTarget::SidesNoCorners));
  advance(g, s, find_move(s, MoveKind::Add, -1, at(g, 3, 0)));
  ASSERT_TRUE(s.terminal);
  EXPECT_EQ(s.terminal->winner, 1);
  EXPECT_EQ(s.terminal->reason, Outcome::Reason::EndRule);
}

TEST(Havabu, OpeningPositionsAreNotTerminal) {
  const auto g = compile_corpus("havabu");
  auto s = initial_state(g);
  advance(g, s, s.legal[0]);
  advance(g, s, s.legal.back());
  EXPECT_FALSE(s.terminal);
  EXPECT_FALSE(outcome(g, s));
}

// ---------------------------------------------------------------- HopThrough

TEST(HopThrough, OpeningHopsMatchExhaustiveCheck) {
  const auto g = compile_corpus("hopthrough");
  const auto s = initial_state(g);
  std::set<std::pair<int, int>> expected;
  for (int from = 0; from < 64; ++from) {
    if (owner_at(g, s, from) != 1) continue;
    const auto [c, r] = g.board.lattice(from);
    for (int dc = -1; dc <= 1; ++dc)
      for (int dr = -1; dr <= 1; ++dr) {
        if (dc == 0 && dr == 0) continue;
        const int tc = c + 2 * dc, tr = r + 2 * dr;
        if (tc < 0 || tr < 0 || tc >= 8 || tr >= 8) continue;
        if (owner_at(g, s, at(g, c + dc, r + dr)) == 0) continue;
        if (owner_at(g, s, at(g, tc, tr)) != 0) continue;
        expected.insert({from, at(g, tc, tr)});
      }
  }
  std::set<std::pair<int, int>> got;
  for (const auto& m : s.legal) {
    EXPECT_EQ(m.kind, MoveKind::Hop);
    got.insert({m.from, m.to});
  }
  EXPECT_EQ(got, expected);
  EXPECT_FALSE(expected.empty());
}

TEST(HopThrough, ReachingTheFarRowWins) {
  const auto g = compile_corpus("hopthrough");
  GameState s = initial_state(g);
  for (int i = 0; i < 64; ++i) set_site(g, s, i, -1);
  set_site(g, s, at(g, 0, 5), *g.piece_by_ref("Counter1"));
  set_site(g, s, at(g, 0, 6), *g.piece_by_ref("Counter2"));
  set_site(g, s, at(g, 5, 6), *g.piece_by_ref("Counter2"));
  refresh(g, s);
  advance(g, s, find_move(s, MoveKind::Hop, at(g, 0, 5), at(g, 0, 7)));
  ASSERT_TRUE(s.terminal);
  EXPECT_EQ(s.terminal->winner, 1);
}

// ---------------------------------------------------------------- YavaGo

namespace {

struct HexLine {
  std::vector<int> sites;  // five collinear sites through the centre
};

HexLine centre_line(const CompiledGame& g) {
  const int dir = g.board.directions(DirClass::Orthogonal)[0];
  const int back = g.board.opposite(dir);
  const int c = g.board.site_at(0, 0);
  const int b1 = g.board.neighbor(c, back), b2 = g.board.neighbor(b1, back);
  const int f1 = g.board.neighbor(c, dir), f2 = g.board.neighbor(f1, dir);
  return {{b2, b1, c, f1, f2}};
}

}  // namespace

TEST(YavaGo, FiveInARowWinsForMover) {
  const auto g = compile_corpus("yavago");
  auto s = initial_state(g);
  const auto line = centre_line(g);
  const int p1 = *g.piece_by_ref("Marker1");
  for (int i = 0; i < 4; ++i) set_site(g, s, line.sites[i], p1);
  refresh(g, s);
  // The fourth stone is already on the board, so this is the line-5 rule.
  advance(g, s, find_move(s, MoveKind::Add, -1, line.sites[4]));
  ASSERT_TRUE(s.terminal);
  EXPECT_EQ(s.terminal->winner, 1);
  EXPECT_EQ(s.terminal->rule, 0);
}

TEST(YavaGo, ExactlyFourLosesForMover) {
  const auto g = compile_corpus("yavago");
  auto s = initial_state(g);
  const auto line = centre_line(g);
  const int p1 = *g.piece_by_ref("Marker1");
  for (int i = 0; i < 3; ++i) set_site(g, s, line.sites[i], p1);
  refresh(g, s);
  advance(g, s, find_move(s, MoveKind::Add, -1, line.sites[3]));
  ASSERT_TRUE(s.terminal);
  EXPECT_EQ(s.terminal->winner, 2);
  EXPECT_EQ(s.terminal->rule, 1);
}

TEST(YavaGo, JoiningTwoPairsMakesFive) {
  const auto g = compile_corpus("yavago");
  auto s = initial_state(g);
  const auto line = centre_line(g);
  const int p1 = *g.piece_by_ref("Marker1");
  for (int i : {0, 1, 3, 4}) set_site(g, s, line.sites[i], p1);
  refresh(g, s);
  EXPECT_FALSE(s.terminal);
  advance(g, s, find_move(s, MoveKind::Add, -1, line.sites[2]));
  ASSERT_TRUE(s.terminal);
  EXPECT_EQ(s.terminal->winner, 1);
}

TEST(YavaGo, SurroundedStoneIsRemoved) {
  const auto g = compile_corpus("yavago");
  auto s = initial_state(g);
  const int p1 = *g.piece_by_ref("Marker1"), p2 = *g.piece_by_ref("Marker2");
  const int c = g.board.site_at(0, 0);
  set_site(g, s, c, p2);
  std::vector<int> around;
  for (int d : g.board.directions(DirClass::Orthogonal)) around.push_back(g.board.neighbor(c, d));
  ASSERT_EQ(around.size(), 6u);
  // Non-adjacent ring positions only, so no line of 4 can appear.
  for (std::size_t i = 0; i + 1 < around.size(); ++i) set_site(g, s, around[i], p1);
  refresh(g, s);
  ASSERT_FALSE(s.terminal);
  const auto before = s;
  advance(g, s, find_move(s, MoveKind::Add, -1, around.back()));
  EXPECT_TRUE(s.empty(c));
  EXPECT_EQ(count_owner(g, s, 1), 6);
  EXPECT_EQ(count_owner(g, s, 2), 0);
  expect_consistent(g, s);

  // With a liberty left the stone stays.
  auto t = before;
  set_site(g, t, around[0], -1);
  refresh(g, t);
  advance(g, t, find_move(t, MoveKind::Add, -1, around.back()));
  EXPECT_EQ(owner_at(g, t, c), 2);
}

TEST(YavaGo, SurroundedGroupIsRemovedTogether) {
  const auto g = compile_corpus("yavago");
  auto s = initial_state(g);
  const int p1 = *g.piece_by_ref("Marker1"), p2 = *g.piece_by_ref("Marker2");
  const int dir = g.board.directions(DirClass::Orthogonal)[0];
  const int a = g.board.site_at(0, 0), b = g.board.neighbor(a, dir);
  set_site(g, s, a, p2);
  set_site(g, s, b, p2);
  SiteSet ring;
  for (int x : {a, b})
    for (int d : g.board.directions(DirClass::Orthogonal)) {
      const int t = g.board.neighbor(x, d);
      if (t != a && t != b) ring.set(t);
    }
  std::vector<int> ring_sites;
  ring.for_each([&](int i) { ring_sites.push_back(i); });
  ASSERT_EQ(ring_sites.size(), 8u);
  for (std::size_t i = 0; i + 1 < ring_sites.size(); ++i) set_site(g, s, ring_sites[i], p1);
  refresh(g, s);
  if (s.terminal) GTEST_SKIP() << "ring forms a line on this orientation";
  advance(g, s, find_move(s, MoveKind::Add, -1, ring_sites.back()));
  EXPECT_TRUE(s.empty(a));
  EXPECT_TRUE(s.empty(b));
}

// ---------------------------------------------------------------- repetition

namespace {

const char* kRooks = R"((game "Rooks" (players 2)
    (equipment { (board (square 4)) (piece "Rook" Each (move Step Orthogonal)) })
    (rules %META%
           (play (forEach Piece)) (end (if (no Moves Next) (result Mover Win))))))";

std::string rooks(bool no_repeat) {
  std::string s = kRooks;
  s.replace(s.find("%META%"), 6, no_repeat ? "(meta (no Repeat))" : "");
  return s;
}

/// Rooks in opposite corners, player 1 to move.
GameState rooks_start(const CompiledGame& g) {
  auto s = initial_state(g);
  set_site(g, s, 0, *g.piece_by_ref("Rook1"));
  set_site(g, s, 15, *g.piece_by_ref("Rook2"));
  refresh(g, s);
  return s;
}

}  // namespace

TEST(Repetition, FourMoveCycleRestoresHash) {
  const auto g = compile_text(rooks(false));
  auto s = rooks_start(g);
  const auto h0 = position_hash(s);
  advance(g, s, find_move(s, MoveKind::Step, 0, 1));
  advance(g, s, find_move(s, MoveKind::Step, 15, 14));
  advance(g, s, find_move(s, MoveKind::Step, 1, 0));
  EXPECT_NE(position_hash(s), h0);
  advance(g, s, find_move(s, MoveKind::Step, 14, 15));
  EXPECT_EQ(position_hash(s), h0);
}

TEST(Repetition, NoRepeatExcludesRecreatingMove) {
  const auto g = compile_text(rooks(true));
  auto s = rooks_start(g);
  advance(g, s, find_move(s, MoveKind::Step, 0, 1));
  advance(g, s, find_move(s, MoveKind::Step, 15, 14));
  advance(g, s, find_move(s, MoveKind::Step, 1, 0));
  for (const auto& m : s.legal) EXPECT_FALSE(m.from == 14 && m.to == 15);
  EXPECT_FALSE(s.legal.empty());

  const auto plain = compile_text(rooks(false));
  auto t = rooks_start(plain);
  advance(plain, t, find_move(t, MoveKind::Step, 0, 1));
  advance(plain, t, find_move(t, MoveKind::Step, 15, 14));
  advance(plain, t, find_move(t, MoveKind::Step, 1, 0));
  EXPECT_EQ(t.legal.size(), s.legal.size() + 1);
}

TEST(Repetition, MoverIsPartOfTheHash) {
  EXPECT_NE(zobrist_mover(1), zobrist_mover(2));
  const auto g = compile_text(rooks(false));
  auto s = rooks_start(g);
  auto t = s;
  t.mover = 2;
  refresh(g, t);
  EXPECT_NE(s.hash, t.hash);
}

// ---------------------------------------------------------------- brute-force oracle

namespace {

oracle::brute::Pos to_oracle(const CompiledGame& g, const GameState& s) {
  const int n = g.board.dimension();
  oracle::brute::Pos p;
  p.n = n;
  p.owner.assign(n * n, 0);
  for (int i = 0; i < g.board.size(); ++i) {
    const auto [c, r] = g.board.lattice(i);
    p.owner[r * n + c] = owner_at(g, s, i);
  }
  p.mover = s.mover;
  if (s.last_to >= 0) {
    const auto [c, r] = g.board.lattice(s.last_to);
    p.last_to = r * n + c;
  }
  return p;
}

char kind_code(MoveKind k) {
  switch (k) {
    case MoveKind::Add: return 'A';
    case MoveKind::Step: return 'S';
    case MoveKind::Slide: return 'L';
    case MoveKind::Hop: return 'H';
  }
  return '?';
}

int oracle_site(const CompiledGame& g, int site) {
  if (site < 0) return -1;
  const auto [c, r] = g.board.lattice(site);
  return r * g.board.dimension() + c;
}

}  // namespace

TEST(BruteForce, SmallGamesAgreeWithReferenceRules) {
  for (const auto& game : oracle::brute::small_games()) {
    SCOPED_TRACE(game.name);
    const auto g = compile_text(game.source);
    for (int playout = 0; playout < 40; ++playout) {
      Rng rng(derive_seed(99, playout));
      auto s = initial_state(g);
      for (int ply = 0; ply < 80 && !s.terminal; ++ply) {
        const auto p = to_oracle(g, s);
        const auto expected = game.moves(p);
        std::set<std::tuple<char, int, int>> got;
        for (const auto& m : s.legal) got.insert({kind_code(m.kind), oracle_site(g, m.from), oracle_site(g, m.to)});
        ASSERT_EQ(got, oracle::brute::keys(expected)) << "playout " << playout << " ply " << ply;

        const Move m = s.legal[rng.below(s.legal.size())];
        const auto key = std::make_tuple(kind_code(m.kind), oracle_site(g, m.from), oracle_site(g, m.to));
        const auto om = std::find_if(expected.begin(), expected.end(), [&](const auto& e) { return e.key() == key; });
        const auto q = oracle::brute::apply(p, *om);
        const int prev = s.mover;
        advance(g, s, m);
        ASSERT_EQ(to_oracle(g, s).owner, q.owner) << "playout " << playout << " ply " << ply;
        expect_consistent(g, s);

        std::optional<int> want = game.end(q, prev);
        if (!want && game.moves(q).empty()) want = 0;
        if (!want) {
          ASSERT_FALSE(s.terminal);
        } else {
          ASSERT_TRUE(s.terminal);
          ASSERT_EQ(s.terminal->winner, *want);
        }
      }
    }
  }
}

// ---------------------------------------------------------------- tic-tac-toe

namespace {

oracle::ttt::Board ttt_board(const CompiledGame& g, const GameState& s) {
  oracle::ttt::Board b{};
  for (int i = 0; i < 9; ++i) {
    const auto [c, r] = g.board.lattice(i);
    b[r * 3 + c] = owner_at(g, s, i);
  }
  return b;
}

}  // namespace

TEST(TicTacToe, ReachablePositionsMatchEnumeration) {
  const auto g = compile_corpus("tictactoe");
  const auto reference = oracle::ttt::reachable();
  ASSERT_EQ(reference.size(), 5478u);

  std::set<oracle::ttt::Board> seen;
  std::vector<GameState> stack{initial_state(g)};
  while (!stack.empty()) {
    GameState s = std::move(stack.back());
    stack.pop_back();
    const auto b = ttt_board(g, s);
    if (!seen.insert(b).second) continue;
    ASSERT_EQ(s.terminal.has_value(), oracle::ttt::terminal(b));
    if (s.terminal) {
      ASSERT_EQ(s.terminal->winner, oracle::ttt::winner(b));
      continue;
    }
    ASSERT_EQ(s.mover, oracle::ttt::to_move(b));
    ASSERT_EQ(s.legal.size(), oracle::ttt::empties(b).size());
    for (const auto& m : s.legal) stack.push_back(apply(g, s, m));
  }
  EXPECT_EQ(seen, reference);
}

TEST(TicTacToe, PerfectPlayIsADraw) {
  std::map<oracle::ttt::Board, int> memo;
  EXPECT_EQ(oracle::ttt::minimax({}, memo), 0);
}

// ---------------------------------------------------------------- properties

TEST(Properties, PlayoutsKeepStateConsistent) {
  for (const char* name : {"havabu", "hopthrough", "yavago", "breakthrough", "jumpers", "queensweep", "havannah",
                           "gonnect", "yavalath"}) {
    SCOPED_TRACE(name);
    const auto g = compile_corpus(name);
    for (int k = 0; k < 5; ++k) {
      Rng rng(derive_seed(5, k));
      auto s = initial_state(g);
      for (int ply = 0; ply < 120 && !s.terminal; ++ply) {
        // Generated moves agree with the cache and every one applies cleanly.
        ASSERT_EQ(generate_moves(g, s, s.mover).size(), s.legal.size());
        const Move m = s.legal[rng.below(s.legal.size())];
        const GameState next = apply(g, s, m);
        ASSERT_NE(next.mover, s.mover);
        s = next;
        expect_consistent(g, s);
      }
    }
  }
}

TEST(Properties, EnclosureRemovesOnlyEnemyStones) {
  const auto g = compile_corpus("yavago");
  int captures = 0;
  for (int k = 0; k < 30; ++k) {
    Rng rng(derive_seed(11, k));
    auto s = initial_state(g);
    while (!s.terminal) {
      const int me = s.mover;
      const int mine = count_owner(g, s, me), theirs = count_owner(g, s, other(me));
      advance(g, s, s.legal[rng.below(s.legal.size())]);
      ASSERT_EQ(count_owner(g, s, me), mine + 1);
      ASSERT_LE(count_owner(g, s, other(me)), theirs);
      captures += theirs - count_owner(g, s, other(me));
    }
  }
  EXPECT_GT(captures, 0);
}

TEST(Properties, ConnectivityNeverShrinksWithoutRemovals) {
  const auto g = compile_corpus("havabu");
  for (int k = 0; k < 20; ++k) {
    Rng rng(derive_seed(13, k));
    auto s = initial_state(g);
    bool had[3][3] = {};
    while (!s.terminal) {
      advance(g, s, s.legal[rng.below(s.legal.size())]);
      for (int p : {1, 2})
        for (int n : {1, 2}) {
          const bool now = is_connected(g, s, p, n, ConnectTarget::SidesNoCorners);
          ASSERT_TRUE(now || !had[p][n]);
          had[p][n] = now;
        }
    }
  }
}

TEST(Properties, LineThroughLastMoveMatchesFullScan) {
  for (const char* name : {"gomoku", "crossfour", "tictactoe"}) {
    SCOPED_TRACE(name);
    const auto g = compile_corpus(name);
    for (int k = 0; k < 20; ++k) {
      Rng rng(derive_seed(17, k));
      auto s = initial_state(g);
      while (!s.terminal) {
        const int me = s.mover;
        advance(g, s, s.legal[rng.below(s.legal.size())]);
        for (int n = 2; n <= 5; ++n)
          for (DirClass d : {DirClass::Adjacent, DirClass::Orthogonal}) {
            // Earlier positions held no winning line, so any line of the
            // winning length must pass through the last placement.
            if (n < 3) continue;
            const bool full = has_line(g, s, me, n, d);
            const bool through = has_line(g, s, me, n, d, s.last_to);
            if (through) {
              ASSERT_TRUE(full);
            }
            if (full && !through) {
              const bool winning = (std::string(name) == "gomoku" && n >= 5) ||
                                   (std::string(name) == "tictactoe" && n >= 3) ||
                                   (std::string(name) == "crossfour" && n >= 4 && d == DirClass::Orthogonal);
              ASSERT_FALSE(winning);
            }
          }
      }
    }
  }
}

TEST(Properties, LineLengthMatchesCoordinateCount) {
  const auto g = compile_corpus("gomoku");
  Rng rng(3);
  auto s = initial_state(g);
  for (int ply = 0; ply < 40 && !s.terminal; ++ply) advance(g, s, s.legal[rng.below(s.legal.size())]);
  const auto p = to_oracle(g, s);
  for (int site = 0; site < g.board.size(); ++site)
    for (int player : {1, 2}) {
      if (owner_at(g, s, site) != player) continue;
      EXPECT_EQ(line_length(g, s, player, site, DirClass::Adjacent),
                oracle::brute::line_through(p, oracle_site(g, site), player));
    }
}

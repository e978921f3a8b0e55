#include "gavel/hub/service.hpp"

#include <map>
#include <mutex>

#include "gavel/agents/agents.hpp"
#include "gavel/common/error.hpp"
#include "gavel/engine/engine.hpp"
#include "gavel/gdl/parser.hpp"
#include "httplib.h"
#include "json_io.hpp"

namespace gavel::hub {

using io::json;

namespace {

struct ServedGame {
  std::string id;
  std::string source;
  engine::CompiledGame game;
  std::optional<qd::CandidateRecord> record;
  bool novel = false;
};

struct Session {
  std::string id;
  std::shared_ptr<const ServedGame> game;
  std::optional<agents::AgentConfig> seats[3];  // nullopt = human
  engine::GameState state;
  std::vector<engine::Move> history;
  std::mutex mu;
};

HttpResponse reply(int status, const json& body) { return {status, body.dump()}; }

HttpResponse error(int status, const std::string& message, json extra = json::object()) {
  extra["error"] = message;
  return reply(status, extra);
}

std::vector<std::string_view> split_path(std::string_view path) {
  if (auto q = path.find('?'); q != std::string_view::npos) path = path.substr(0, q);
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    const std::size_t next = path.find('/', pos);
    const std::size_t end = next == std::string_view::npos ? path.size() : next;
    if (end > pos) parts.push_back(path.substr(pos, end - pos));
    pos = end + 1;
  }
  return parts;
}

json moves_json(const std::vector<engine::Move>& moves) {
  json out = json::array();
  for (const auto& m : moves) out.push_back(io::to_json(m));
  return out;
}

json seat_json(const std::optional<agents::AgentConfig>& seat) {
  if (!seat) return "human";
  return {{"kind", seat->kind == agents::AgentConfig::Kind::Mcts ? "mcts" : "random"},
          {"iterations", seat->iterations},
          {"exploration_c", seat->exploration_c},
          {"seed", seat->rng_seed}};
}

json state_json(const Session& s) {
  const auto& g = s.game->game;
  json placement = json::array();
  for (int site = 0; site < g.board.size(); ++site) {
    const int p = s.state.piece_at(site);
    if (p < 0) continue;
    placement.push_back({{"site", site}, {"piece", p}, {"name", g.pieces[p].name}, {"owner", g.pieces[p].owner}});
  }
  json outcome = nullptr;
  if (s.state.terminal) {
    outcome = {{"winner", s.state.terminal->winner},
               {"reason", std::string(engine::to_string(s.state.terminal->reason))},
               {"rule", s.state.terminal->rule}};
  }
  const bool human_to_move = !s.state.terminal && !s.seats[s.state.mover];
  return {{"id", s.id},
          {"game", s.game->id},
          {"seats", {{"1", seat_json(s.seats[1])}, {"2", seat_json(s.seats[2])}}},
          {"mover", s.state.mover},
          {"human_to_move", human_to_move},
          {"move_counts", {s.state.move_count[1], s.state.move_count[2]}},
          {"placement", placement},
          {"legal", moves_json(s.state.legal)},
          {"last_move", s.history.empty() ? json(nullptr) : io::to_json(s.history.back())},
          {"history", moves_json(s.history)},
          {"terminal", s.state.terminal.has_value()},
          {"outcome", outcome},
          {"hash", io::hex64(s.state.hash)}};
}

agents::AgentConfig parse_agent(const json& j) {
  agents::AgentConfig c = agents::AgentConfig::mcts(1000);
  if (j.is_null()) return c;
  if (!j.is_object()) throw Error(Errc::InvalidParams, "agent must be an object");
  const std::string kind = j.value("kind", "mcts");
  if (kind == "random") {
    c.kind = agents::AgentConfig::Kind::Random;
  } else if (kind != "mcts") {
    throw Error(Errc::InvalidParams, "agent.kind must be 'mcts' or 'random'");
  }
  c.iterations = j.value("iterations", c.iterations);
  c.exploration_c = j.value("exploration_c", c.exploration_c);
  c.rng_seed = j.value("seed", std::uint64_t{0});
  c.move_limit = j.value("move_limit", c.move_limit);
  c.check();
  return c;
}

}  // namespace

struct Service::Impl {
  mutable std::mutex mu;
  std::map<std::string, std::shared_ptr<const ServedGame>> games;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  long long next_match = 1;

  std::shared_ptr<const ServedGame> game(std::string_view id) const {
    std::lock_guard lock(mu);
    const auto it = games.find(std::string(id));
    return it == games.end() ? nullptr : it->second;
  }
  std::shared_ptr<Session> session(std::string_view id) const {
    std::lock_guard lock(mu);
    const auto it = sessions.find(std::string(id));
    return it == sessions.end() ? nullptr : it->second;
  }

  HttpResponse list_games() const {
    json out = json::array();
    std::lock_guard lock(mu);
    for (const auto& [id, g] : games) {
      json e = {{"id", id}, {"name", g->game.name}, {"board", g->game.board.describe()}, {"novel", g->novel}};
      if (g->record) {
        e["fitness"] = io::to_json(g->record->fitness);
        e["cell"] = {g->record->cell.i, g->record->cell.j};
        e["lineage"] = io::to_json(*g->record).at("lineage");
        e["step"] = g->record->step;
      } else {
        e["fitness"] = nullptr;
      }
      out.push_back(std::move(e));
    }
    return reply(200, {{"games", out}});
  }

  HttpResponse get_game(std::string_view id) const {
    const auto g = game(id);
    if (!g) return error(404, "unknown game");
    json pieces = json::array();
    for (std::size_t i = 0; i < g->game.pieces.size(); ++i)
      pieces.push_back({{"index", i}, {"name", g->game.pieces[i].name}, {"owner", g->game.pieces[i].owner}});
    json out = {{"id", g->id},
                {"source", g->source},
                {"board", io::board_to_json(g->game.board)},
                {"pieces", pieces},
                {"novel", g->novel}};
    if (g->record) {
      out["fitness"] = io::to_json(g->record->fitness);
      out["cell"] = {g->record->cell.i, g->record->cell.j};
      out["lineage"] = io::to_json(*g->record).at("lineage");
    }
    return reply(200, out);
  }

  HttpResponse create_match(const json& body) {
    if (!body.is_object() || !body.contains("game") || !body["game"].is_string())
      return error(400, "body must name a game");
    const auto g = game(body["game"].get<std::string>());
    if (!g) return error(404, "unknown game");
    int human = 1;
    if (body.contains("human_seat")) {
      const auto& h = body["human_seat"];
      if (h.is_null()) {
        human = 0;
      } else if (h.is_number_integer() && h.get<int>() >= 0 && h.get<int>() <= 2) {
        human = h.get<int>();
      } else {
        return error(400, "human_seat must be 1, 2, 0 or null");
      }
    }
    auto s = std::make_shared<Session>();
    try {
      const auto agent = parse_agent(body.value("agent", json(nullptr)));
      for (int p = 1; p <= 2; ++p)
        if (p != human) s->seats[p] = agent;
      s->state = engine::initial_state(g->game);
    } catch (const Error& e) {
      return error(422, e.what());
    }
    s->game = g;
    {
      std::lock_guard lock(mu);
      char buf[32];
      std::snprintf(buf, sizeof buf, "m%06lld", next_match++);
      s->id = buf;
      sessions[s->id] = s;
    }
    std::lock_guard lock(s->mu);
    return reply(201, state_json(*s));
  }

  HttpResponse get_match(std::string_view id) const {
    const auto s = session(id);
    if (!s) return error(404, "unknown match");
    std::lock_guard lock(s->mu);
    return reply(200, state_json(*s));
  }

  HttpResponse human_move(std::string_view id, const json& body) {
    const auto s = session(id);
    if (!s) return error(404, "unknown match");
    std::lock_guard lock(s->mu);
    if (s->state.terminal) return error(409, "match is over");
    if (s->seats[s->state.mover]) return error(409, "not the human's turn");
    const json spec = body.contains("move") ? body["move"] : body;
    if (!spec.is_object()) return error(400, "move must be an object");
    const auto& legal = s->state.legal;
    std::optional<engine::Move> chosen;
    if (spec.contains("index")) {
      if (!spec["index"].is_number_integer()) return error(400, "index must be an integer");
      const int i = spec["index"].get<int>();
      if (i >= 0 && i < static_cast<int>(legal.size())) chosen = legal[i];
    } else {
      if (!spec.contains("to") || !spec["to"].is_number_integer()) return error(400, "move needs 'to'");
      const int to = spec["to"].get<int>();
      const int from = spec.contains("from") && spec["from"].is_number_integer() ? spec["from"].get<int>() : -1;
      const std::string kind = spec.value("kind", "");
      for (const auto& m : legal) {
        if (m.to == to && m.from == from && (kind.empty() || engine::to_string(m.kind) == kind)) {
          chosen = m;
          break;
        }
      }
    }
    if (!chosen) return error(422, "illegal move", {{"legal", moves_json(legal)}});
    engine::advance(s->game->game, s->state, *chosen);
    s->history.push_back(*chosen);
    return reply(200, state_json(*s));
  }

  HttpResponse agent_move(std::string_view id) {
    const auto s = session(id);
    if (!s) return error(404, "unknown match");
    std::lock_guard lock(s->mu);
    if (s->state.terminal) return error(409, "match is over");
    const auto& seat = s->seats[s->state.mover];
    if (!seat) return error(409, "the mover is human");
    Rng rng(derive_seed(seat->rng_seed, s->history.size()));
    const auto move = agents::choose_move(s->game->game, s->state, *seat, rng);
    engine::advance(s->game->game, s->state, move);
    s->history.push_back(move);
    return reply(200, state_json(*s));
  }
};

Service::Service() : impl_(std::make_unique<Impl>()) {}
Service::~Service() = default;
Service::Service(Service&&) noexcept = default;
Service& Service::operator=(Service&&) noexcept = default;

Service Service::from_run(const std::filesystem::path& dir) {
  const auto loaded = load_run(dir);
  Service svc;
  for (const auto& [cell, rec] : loaded.state.archive.cells())
    svc.add_game(rec.id, rec.source, &rec, !loaded.state.archive.baseline_cells.contains(cell));
  return svc;
}

Service Service::from_games(const std::vector<GameSource>& games) {
  Service svc;
  for (const auto& g : games) svc.add_game(g.name, g.source);
  return svc;
}

void Service::add_game(const std::string& id, const std::string& source, const qd::CandidateRecord* record,
                       bool novel) {
  auto g = std::make_shared<ServedGame>();
  g->id = id;
  g->source = source;
  g->game = engine::compile(gdl::parse_game(source));
  if (record) g->record = *record;
  g->novel = novel;
  std::lock_guard lock(impl_->mu);
  impl_->games[id] = std::move(g);
}

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body) {
  const auto parts = split_path(path);
  json doc;
  if (method == "POST" && !body.empty()) {
    try {
      doc = json::parse(body);
    } catch (const json::parse_error&) {
      return error(400, "body is not valid JSON");
    }
  }
  try {
    if (method == "GET" && parts.size() == 1 && parts[0] == "games") return impl_->list_games();
    if (method == "GET" && parts.size() == 2 && parts[0] == "games") return impl_->get_game(parts[1]);
    if (method == "POST" && parts.size() == 1 && parts[0] == "matches") return impl_->create_match(doc);
    if (method == "GET" && parts.size() == 2 && parts[0] == "matches") return impl_->get_match(parts[1]);
    if (method == "POST" && parts.size() == 3 && parts[0] == "matches" && parts[2] == "moves")
      return impl_->human_move(parts[1], doc.is_null() ? json::object() : doc);
    if (method == "POST" && parts.size() == 3 && parts[0] == "matches" && parts[2] == "agent-move")
      return impl_->agent_move(parts[1]);
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
  return error(404, "no such route");
}

std::optional<engine::GameState> Service::session_state(const std::string& match_id) const {
  const auto s = impl_->session(match_id);
  if (!s) return std::nullopt;
  std::lock_guard lock(s->mu);
  return s->state;
}

std::optional<engine::GameState> Service::replay(const std::string& match_id) const {
  const auto s = impl_->session(match_id);
  if (!s) return std::nullopt;
  std::lock_guard lock(s->mu);
  auto state = engine::initial_state(s->game->game);
  for (const auto& m : s->history) engine::advance(s->game->game, state, m);
  return state;
}

void serve(Service& service, const std::string& host, int port) {
  httplib::Server server;
  auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    const auto out = service.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
    res.set_header("Access-Control-Allow-Origin", "*");
  };
  server.Get(R"(/.*)", route);
  server.Post(R"(/.*)", route);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  if (!server.listen(host, port)) throw Error(Errc::Io, "cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace gavel::hub

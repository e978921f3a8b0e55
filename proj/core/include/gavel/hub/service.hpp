#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gavel/engine/state.hpp"
#include "gavel/hub/run.hpp"
#include "gavel/qd/archive.hpp"

namespace gavel::hub {

struct HttpResponse {
  int status = 200;
  std::string body;  // JSON
};

/// Match and archive API. Rules run server-side; clients only submit moves
/// from the served legal list. Thread-safe; each session serialises its own
/// moves.
class Service {
 public:
  Service();
  ~Service();
  Service(Service&&) noexcept;
  Service& operator=(Service&&) noexcept;

  /// Elites of a run directory.
  static Service from_run(const std::filesystem::path& dir);
  static Service from_games(const std::vector<GameSource>& games);

  /// Throws the compile error if the game is outside the engine.
  void add_game(const std::string& id, const std::string& source, const qd::CandidateRecord* record = nullptr,
                bool novel = false);

  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

  /// Current state of a session and the state obtained by replaying its move
  /// history from the start position.
  std::optional<engine::GameState> session_state(const std::string& match_id) const;
  std::optional<engine::GameState> replay(const std::string& match_id) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocking HTTP server on host:port routing every request to `service`.
void serve(Service& service, const std::string& host, int port);

}  // namespace gavel::hub

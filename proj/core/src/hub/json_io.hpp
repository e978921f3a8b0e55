#pragma once

#include "gavel/engine/board.hpp"
#include "gavel/engine/game.hpp"
#include "gavel/engine/state.hpp"
#include "gavel/eval/eval.hpp"
#include "gavel/qd/archive.hpp"
#include "gavel/qd/bandit.hpp"
#include "json.hpp"

namespace gavel::hub::io {

using nlohmann::json;

json to_json(const eval::RandomEvalStats& s);
eval::RandomEvalStats stats_from_json(const json& j);

json to_json(const eval::Fitness& f);
eval::Fitness fitness_from_json(const json& j);

json to_json(const qd::CandidateRecord& r);
qd::CandidateRecord record_from_json(const json& j);

json to_json(const qd::BanditStats& b);
qd::BanditStats bandit_from_json(const json& j);

json to_json(const qd::ArchiveReport& r);

json to_json(const engine::Move& m);

json board_to_json(const engine::BoardGraph& board);

std::string hex64(std::uint64_t v);
std::uint64_t parse_hex64(const std::string& s);

}  // namespace gavel::hub::io

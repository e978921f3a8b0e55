#include "gavel/hub/config.hpp"

#include <fstream>
#include <sstream>

#include "gavel/common/error.hpp"
#include "json.hpp"

namespace gavel::hub {

using nlohmann::json;

eval::EvalParams EvalConfig::params(std::uint64_t seed) const {
  eval::EvalParams p;
  p.random_playouts = n_random;
  p.mcts_playouts = n_mcts;
  p.move_limit = move_limit;
  p.mcts = agents::AgentConfig::mcts(mcts_iterations);
  p.mcts.exploration_c = exploration_c;
  p.mcts.move_limit = move_limit;
  p.balance_threshold = balance_gate;
  p.agency_threshold = agency_gate;
  p.seed = seed;
  return p;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::Config, what);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  require(obj.is_object(), where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    require(known, "unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, std::string_view key, T& out, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->template get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::Config, "bad value for '" + std::string(key) + "' in " + where);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

}  // namespace

void RunConfig::check() const {
  require(!seeds.empty(), "at least one seed path is required");
  require(steps >= 0, "steps must be >= 0");
  require(j >= 1 && k >= 1, "j and k must be >= 1");
  require(eval.n_random >= 1 && eval.n_mcts >= 1 && eval.mcts_iterations >= 1, "evaluation counts must be >= 1");
  require(eval.move_limit >= 1, "move_limit must be >= 1");
  require(eval.exploration_c >= 0, "exploration_c must be >= 0");
  require(eval.balance_gate >= 0 && eval.balance_gate <= 1, "balance_gate must be in [0, 1]");
  require(eval.agency_gate >= 0 && eval.agency_gate <= 1, "agency_gate must be in [0, 1]");
  require(archive.regions >= 1 && archive.lo < archive.hi, "archive needs regions >= 1 and lo < hi");
  require(workers >= 0, "workers must be >= 0");
  require(snapshot_every >= 1, "snapshot_every must be >= 1");
  require(!output.empty(), "output directory is required");
  require(op.grammar.max_depth >= 1 && op.grammar.max_attempts >= 1 && op.grammar.max_nodes >= 1,
          "grammar sampler limits must be >= 1");
  if (op.kind == OperatorConfig::Kind::Infill) {
    try {
      op.infill.check();
    } catch (const Error& e) {
      throw Error(Errc::Config, e.what());
    }
  }
}

void RunConfig::check_paths() const {
  check();
  for (const auto& s : seeds) require(std::filesystem::exists(s), "seed path not found: " + s.string());
  require(!corpus.empty(), "corpus path is required");
  require(std::filesystem::exists(corpus), "corpus path not found: " + corpus.string());
  if (!macros.empty()) require(std::filesystem::is_directory(macros), "macro directory not found: " + macros.string());
}

int RunConfig::resolved_workers() const { return workers > 0 ? workers : qd::WorkerPool::default_workers(); }

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Config, std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc,
             {"seeds", "corpus", "macros", "steps", "j", "k", "eval", "archive", "operator", "seed", "workers",
              "snapshot_every", "output"},
             "config");
  RunConfig c;
  c.seeds.clear();
  if (doc.contains("seeds")) {
    const auto& s = doc["seeds"];
    if (s.is_string()) {
      c.seeds.push_back(resolve(base_dir, s.get<std::string>()));
    } else {
      require(s.is_array(), "seeds must be a string or a list of strings");
      for (const auto& p : s) {
        require(p.is_string(), "seeds must be a string or a list of strings");
        c.seeds.push_back(resolve(base_dir, p.get<std::string>()));
      }
    }
  }
  std::string corpus, macros, output;
  read(doc, "corpus", corpus, "config");
  read(doc, "macros", macros, "config");
  read(doc, "output", output, "config");
  if (!corpus.empty()) c.corpus = resolve(base_dir, corpus);
  if (!macros.empty()) c.macros = resolve(base_dir, macros);
  if (!output.empty()) c.output = resolve(base_dir, output);
  read(doc, "steps", c.steps, "config");
  read(doc, "j", c.j, "config");
  read(doc, "k", c.k, "config");
  read(doc, "seed", c.seed, "config");
  read(doc, "workers", c.workers, "config");
  read(doc, "snapshot_every", c.snapshot_every, "config");

  if (doc.contains("eval")) {
    const auto& e = doc["eval"];
    check_keys(e,
               {"n_random", "n_mcts", "mcts_iterations", "exploration_c", "move_limit", "balance_gate",
                "agency_gate"},
               "eval");
    read(e, "n_random", c.eval.n_random, "eval");
    read(e, "n_mcts", c.eval.n_mcts, "eval");
    read(e, "mcts_iterations", c.eval.mcts_iterations, "eval");
    read(e, "exploration_c", c.eval.exploration_c, "eval");
    read(e, "move_limit", c.eval.move_limit, "eval");
    read(e, "balance_gate", c.eval.balance_gate, "eval");
    read(e, "agency_gate", c.eval.agency_gate, "eval");
  }
  if (doc.contains("archive")) {
    const auto& a = doc["archive"];
    check_keys(a, {"regions", "lo", "hi"}, "archive");
    read(a, "regions", c.archive.regions, "archive");
    read(a, "lo", c.archive.lo, "archive");
    read(a, "hi", c.archive.hi, "archive");
  }
  if (doc.contains("operator")) {
    const auto& o = doc["operator"];
    check_keys(o, {"kind", "ucb", "grammar", "infill"}, "operator");
    std::string kind = "grammar";
    read(o, "kind", kind, "operator");
    if (kind == "grammar") {
      c.op.kind = OperatorConfig::Kind::Grammar;
    } else if (kind == "infill") {
      c.op.kind = OperatorConfig::Kind::Infill;
    } else {
      throw Error(Errc::Config, "operator.kind must be 'grammar' or 'infill'");
    }
    read(o, "ucb", c.op.ucb, "operator");
    if (o.contains("grammar")) {
      const auto& g = o["grammar"];
      check_keys(g, {"max_depth", "terminal_bias", "subtree_library_p", "max_attempts", "max_nodes"},
                 "operator.grammar");
      read(g, "max_depth", c.op.grammar.max_depth, "operator.grammar");
      read(g, "terminal_bias", c.op.grammar.terminal_bias, "operator.grammar");
      read(g, "subtree_library_p", c.op.grammar.subtree_library_p, "operator.grammar");
      read(g, "max_attempts", c.op.grammar.max_attempts, "operator.grammar");
      read(g, "max_nodes", c.op.grammar.max_nodes, "operator.grammar");
    }
    if (o.contains("infill")) {
      const auto& f = o["infill"];
      check_keys(f,
                 {"url", "mode", "request_template", "completion_pointer", "temperature", "top_k",
                  "max_new_tokens", "timeout_seconds", "retries", "reference_games"},
                 "operator.infill");
      auto& ic = c.op.infill;
      read(f, "url", ic.url, "operator.infill");
      std::string mode = "infill";
      read(f, "mode", mode, "operator.infill");
      if (mode == "infill") {
        ic.mode = mutate::InfillEndpointConfig::Mode::Infill;
      } else if (mode == "chat") {
        ic.mode = mutate::InfillEndpointConfig::Mode::Chat;
      } else {
        throw Error(Errc::Config, "operator.infill.mode must be 'infill' or 'chat'");
      }
      if (f.contains("request_template")) {
        const auto& t = f["request_template"];
        ic.request_template = t.is_string() ? t.get<std::string>() : t.dump();
      }
      read(f, "completion_pointer", ic.completion_pointer, "operator.infill");
      read(f, "temperature", ic.temperature, "operator.infill");
      read(f, "top_k", ic.top_k, "operator.infill");
      read(f, "max_new_tokens", ic.max_new_tokens, "operator.infill");
      read(f, "timeout_seconds", ic.timeout_seconds, "operator.infill");
      read(f, "retries", ic.retries, "operator.infill");
      read(f, "reference_games", ic.reference_games, "operator.infill");
    }
  }
  c.check();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::string run_config_to_json(const RunConfig& c) {
  json seeds = json::array();
  for (const auto& s : c.seeds) seeds.push_back(s.string());
  json doc = {
      {"seeds", seeds},
      {"corpus", c.corpus.string()},
      {"macros", c.macros.string()},
      {"steps", c.steps},
      {"j", c.j},
      {"k", c.k},
      {"seed", c.seed},
      {"workers", c.workers},
      {"snapshot_every", c.snapshot_every},
      {"output", c.output.string()},
      {"eval",
       {{"n_random", c.eval.n_random},
        {"n_mcts", c.eval.n_mcts},
        {"mcts_iterations", c.eval.mcts_iterations},
        {"exploration_c", c.eval.exploration_c},
        {"move_limit", c.eval.move_limit},
        {"balance_gate", c.eval.balance_gate},
        {"agency_gate", c.eval.agency_gate}}},
      {"archive", {{"regions", c.archive.regions}, {"lo", c.archive.lo}, {"hi", c.archive.hi}}},
  };
  json op = {{"kind", c.op.kind == OperatorConfig::Kind::Grammar ? "grammar" : "infill"},
             {"ucb", c.op.ucb},
             {"grammar",
              {{"max_depth", c.op.grammar.max_depth},
               {"terminal_bias", c.op.grammar.terminal_bias},
               {"subtree_library_p", c.op.grammar.subtree_library_p},
               {"max_attempts", c.op.grammar.max_attempts},
               {"max_nodes", c.op.grammar.max_nodes}}}};
  if (c.op.kind == OperatorConfig::Kind::Infill) {
    const auto& ic = c.op.infill;
    op["infill"] = {{"url", ic.url},
                    {"mode", ic.mode == mutate::InfillEndpointConfig::Mode::Infill ? "infill" : "chat"},
                    {"request_template", ic.request_template},
                    {"completion_pointer", ic.completion_pointer},
                    {"temperature", ic.temperature},
                    {"top_k", ic.top_k},
                    {"max_new_tokens", ic.max_new_tokens},
                    {"timeout_seconds", ic.timeout_seconds},
                    {"retries", ic.retries},
                    {"reference_games", ic.reference_games}};
  }
  doc["operator"] = op;
  return doc.dump(2);
}

}  // namespace gavel::hub

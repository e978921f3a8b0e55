#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gavel/engine/engine.hpp"
#include "gavel/gdl/parser.hpp"
#include "gavel/gdl/preprocess.hpp"
#include "gavel/gdl/printer.hpp"

namespace gavel::test {

inline std::filesystem::path corpus_dir() { return GAVEL_CORPUS_DIR; }

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Raw text of a bundled game, e.g. corpus_source("havabu").
inline std::string corpus_source(const std::string& name) { return read_text(corpus_dir() / (name + ".lud")); }

inline engine::CompiledGame compile_text(const std::string& text) { return engine::compile(gdl::parse_game(text)); }

inline engine::CompiledGame compile_corpus(const std::string& name) { return compile_text(corpus_source(name)); }

/// Preprocessed canonical text of a bundled game.
inline std::string canonical_corpus(const std::string& name) {
  return gdl::print_canonical(
      gdl::preprocess(gdl::parse_game(corpus_source(name)), gdl::load_macros(corpus_dir() / "macros")));
}

/// Site index of lattice coordinate (a, b).
inline int at(const engine::CompiledGame& g, int a, int b) { return g.board.site_at(a, b); }

inline int owner_at(const engine::CompiledGame& g, const engine::GameState& s, int site) {
  const int p = s.piece_at(site);
  return p < 0 ? 0 : g.pieces[p].owner;
}

}  // namespace gavel::test

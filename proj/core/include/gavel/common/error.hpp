#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace gavel {

enum class Errc {
  IllegalCharacter,
  UnbalancedParens,
  UnexpectedToken,
  UnknownMacro,
  CategoryMismatch,
  UnsupportedConstruct,
  PlacementConflict,
  IllegalMove,
  NoLegalMoves,
  EmptyInput,
  DegenerateCorpus,
  CatalogMismatch,
  NonFinite,
  InvalidParams,
  EmptyArchive,
  NoSites,
  GenerationBudgetExceeded,
  Config,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type used across the library. `where` carries a byte
/// offset for lexer/parser errors, a site index for engine errors, and is
/// npos when not applicable.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Error(Errc code, std::string message, std::size_t where = npos);

  Errc code() const noexcept { return code_; }
  std::size_t where() const noexcept { return where_; }

 private:
  Errc code_;
  std::size_t where_;
};

}  // namespace gavel

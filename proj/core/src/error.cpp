#include "gavel/common/error.hpp"

namespace gavel {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::IllegalCharacter: return "IllegalCharacter";
    case Errc::UnbalancedParens: return "UnbalancedParens";
    case Errc::UnexpectedToken: return "UnexpectedToken";
    case Errc::UnknownMacro: return "UnknownMacro";
    case Errc::CategoryMismatch: return "CategoryMismatch";
    case Errc::UnsupportedConstruct: return "UnsupportedConstruct";
    case Errc::PlacementConflict: return "PlacementConflict";
    case Errc::IllegalMove: return "IllegalMove";
    case Errc::NoLegalMoves: return "NoLegalMoves";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DegenerateCorpus: return "DegenerateCorpus";
    case Errc::CatalogMismatch: return "CatalogMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::EmptyArchive: return "EmptyArchive";
    case Errc::NoSites: return "NoSites";
    case Errc::GenerationBudgetExceeded: return "GenerationBudgetExceeded";
    case Errc::Config: return "Config";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(Errc code, std::string message, std::size_t where)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), where_(where) {}

}  // namespace gavel

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gavel/common/rng.hpp"
#include "gavel/gdl/grammar.hpp"
#include "gavel/gdl/sites.hpp"
#include "gavel/qd/bandit.hpp"

namespace gavel::mutate {

struct MutationRequest {
  std::string parent;
  gdl::ExpressionSite site;
  std::string prefix;
  std::string suffix;
  std::string category;
  std::string arm;  // leading keyword of the occupant

  std::string target() const { return parent.substr(prefix.size(), parent.size() - prefix.size() - suffix.size()); }
};

/// Sites eligible for mutation: every categorised expression except the root.
std::vector<gdl::ExpressionSite> mutable_sites(const gdl::GameTree& tree, const gdl::Grammar& grammar);

/// Uniform site choice. Throws Error(NoSites).
MutationRequest make_request(std::string_view parent, Rng& rng, const gdl::Grammar& grammar = gdl::default_grammar());
/// Site chosen by the bandit (which records the pull).
MutationRequest make_request(std::string_view parent, Rng& rng, qd::BanditStats& bandit,
                             const gdl::Grammar& grammar = gdl::default_grammar());

struct GrammarSamplerParams {
  int max_depth = 6;
  double terminal_bias = 0.6;
  double subtree_library_p = 0.35;
  int max_attempts = 40;
  int max_nodes = 48;
  std::uint64_t seed = 0;
};

/// Category-labelled subtrees in canonical text form.
class SubtreeLibrary {
 public:
  void add(const std::string& category, std::string text);
  static SubtreeLibrary harvest(std::span<const gdl::GameTree> corpus,
                                const gdl::Grammar& grammar = gdl::default_grammar());
  const std::vector<std::string>& entries(std::string_view category) const;
  std::size_t size() const;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> by_category_;
};

/// Facts about the surrounding game that steer sampling.
struct SamplerContext {
  std::vector<std::pair<std::string, std::string>> pieces;  // (name, owner keyword)
  bool in_piece = false;
  bool replacing_board = false;
  bool in_removal = false;  // `(remove (from))` would delete the moving piece
};

SamplerContext context_for(const gdl::GameTree& tree, const gdl::ExpressionSite& site);

/// Top-down random derivation of `category`. Throws
/// Error(GenerationBudgetExceeded) if no alternative fits the depth budget.
gdl::Node sample_subtree(const gdl::Grammar& grammar, std::string_view category, const SamplerContext& context,
                         const GrammarSamplerParams& params, Rng& rng);

/// Replaces the request's site with a library subtree or a fresh derivation.
/// The result always validates; engine compatibility is preferred but not
/// guaranteed. Throws Error(GenerationBudgetExceeded).
std::string grammar_mutate(const MutationRequest& req, const gdl::Grammar& grammar, const SubtreeLibrary& library,
                           const GrammarSamplerParams& params, Rng& rng);

// Infill endpoint ------------------------------------------------------------

struct InfillEndpointConfig {
  enum class Mode { Infill, Chat };
  std::string url = "http://127.0.0.1:8000/infill";
  Mode mode = Mode::Infill;
  /// JSON body; string values equal to a placeholder ({prefix}, {suffix},
  /// {temperature}, {top_k}, {max_new_tokens}, {system}, {prompt}) are
  /// replaced by the typed value.
  std::string request_template;
  std::string completion_pointer = "/completion";  // JSON pointer into the response
  double temperature = 1.0;
  int top_k = 50;
  int max_new_tokens = 256;
  double timeout_seconds = 30;
  int retries = 2;
  std::vector<std::string> reference_games;  // Chat mode

  void check() const;
  static std::string default_template(Mode mode);
};

struct InfillResult {
  enum class Status { Ok, Timeout, EndpointError, EmptyCompletion };
  Status status = Status::Ok;
  std::string candidate;
  std::string completion;
  std::string message;
  int attempts = 0;

  bool ok() const { return status == Status::Ok; }
};

std::string_view to_string(InfillResult::Status status) noexcept;

/// Builds the request body for `req` (exposed for tests and dry runs).
std::string infill_request_body(const MutationRequest& req, const InfillEndpointConfig& config);

/// Never throws for transport problems; they are reported in the result.
InfillResult infill_mutate(const MutationRequest& req, const InfillEndpointConfig& config);

extern const std::string_view kSystemPrompt;

/// Whole-game modification prompt with numbered reference games.
std::string build_modification_prompt(std::span<const std::string> references, std::string_view game);

// Novelty / validity ---------------------------------------------------------

using MutationOperator = std::function<std::string(const MutationRequest&, Rng&)>;

struct MutationStatsRow {
  int attempts = 0;
  double novel = 0;  // percentages
  double valid = 0;
  double novel_and_valid = 0;
};

/// n attempts over uniformly drawn (game, site) pairs. Novel: canonical text
/// differs from the parent. Valid: the candidate compiles.
MutationStatsRow mutation_stats(std::span<const std::string> corpus, const MutationOperator& op, int n,
                                std::uint64_t seed);

std::string format_mutation_table(std::span<const std::pair<std::string, MutationStatsRow>> rows);

/// Canonical text of a parseable source, nullopt otherwise.
std::optional<std::string> canonical_text(std::string_view source);

}  // namespace gavel::mutate

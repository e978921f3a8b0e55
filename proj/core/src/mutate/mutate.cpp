#include "gavel/mutate/mutate.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "gavel/common/error.hpp"
#include "gavel/engine/game.hpp"
#include "gavel/gdl/parser.hpp"
#include "gavel/gdl/preprocess.hpp"
#include "gavel/gdl/printer.hpp"
#include "gavel/gdl/splice.hpp"

namespace gavel::mutate {

using gdl::Alternative;
using gdl::Grammar;
using gdl::Literal;
using gdl::Node;
using gdl::NodeSet;
using gdl::Slot;
using gdl::SlotKind;

namespace {

MutationRequest request_for(std::string_view parent, const gdl::ExpressionSite& site) {
  MutationRequest r;
  r.parent = std::string(parent);
  r.site = site;
  r.prefix = r.parent.substr(0, site.span.begin);
  r.suffix = r.parent.substr(site.span.end);
  r.category = site.category;
  r.arm = qd::arm_of(site);
  return r;
}

struct TooLarge {};

struct Sampler {
  const Grammar& grammar;
  const GrammarSamplerParams& params;
  Rng& rng;
  int nodes = 0;

  bool allowed(const Alternative& alt, std::string_view category, const SamplerContext& ctx) const {
    if (category == "moves" && ctx.in_piece && alt.head == "forEach") return false;
    if (category == "item") return ctx.replacing_board == (alt.head == "board");
    if (category == "site" && ctx.in_removal && alt.head == "from") return false;
    if (category == "placement" && ctx.pieces.empty()) return false;
    return true;
  }

  int category_height(std::string_view category, const SamplerContext& ctx) const {
    const auto* alts = grammar.alternatives(category);
    int best = 1 << 20;
    if (alts)
      for (const auto& a : *alts)
        if (allowed(a, category, ctx)) best = std::min(best, a.min_height);
    return best;
  }

  Literal string_literal(const Slot& slot, const SamplerContext& ctx) {
    Literal l;
    l.kind = Literal::Kind::String;
    switch (slot.role) {
      case gdl::StringRole::GameName: l.text = std::string(gdl::kAbstractGameName); break;
      case gdl::StringRole::PieceName: {
        std::size_t i = 0;
        auto taken = [&](const std::string& name) {
          return std::any_of(ctx.pieces.begin(), ctx.pieces.end(), [&](const auto& p) { return p.first == name; });
        };
        while (taken(gdl::abstract_piece_name(i))) ++i;
        l.text = gdl::abstract_piece_name(i);
        break;
      }
      case gdl::StringRole::PieceRef: {
        if (ctx.pieces.empty()) {
          l.text = gdl::abstract_piece_name(0) + "1";
          break;
        }
        const auto& [name, owner] = ctx.pieces[rng.below(ctx.pieces.size())];
        const char suffix = owner == "P1" ? '1' : owner == "P2" ? '2' : (rng.chance(0.5) ? '1' : '2');
        l.text = name + suffix;
        break;
      }
    }
    return l;
  }

  gdl::Value value(const Slot& slot, int depth, const SamplerContext& ctx) {
    switch (slot.kind) {
      case SlotKind::Category: return node(slot.category, depth + 1, ctx);
      case SlotKind::SetOf:
      case SlotKind::CategoryOrSet: {
        if (slot.kind == SlotKind::CategoryOrSet && rng.chance(0.75)) return node(slot.category, depth + 1, ctx);
        NodeSet set;
        int count = 1;
        while (count < 3 && rng.chance(0.35)) ++count;
        if (slot.category == "item") {
          // An equipment list needs exactly one board.
          SamplerContext board = ctx;
          board.replacing_board = true;
          set.items.push_back(node("item", depth + 1, board));
          SamplerContext rest = ctx;
          rest.replacing_board = false;
          for (int i = 1; i < count + 1; ++i) set.items.push_back(node("item", depth + 1, rest));
        } else {
          for (int i = 0; i < count; ++i) set.items.push_back(node(slot.category, depth + 1, ctx));
        }
        return set;
      }
      case SlotKind::Int: {
        Literal l;
        l.kind = Literal::Kind::Int;
        int v = slot.lo;
        if (!slot.sample_values.empty())
          v = slot.sample_values[rng.below(slot.sample_values.size())];
        else
          v = rng.between(slot.lo, slot.hi);
        l.text = std::to_string(v);
        return l;
      }
      case SlotKind::Enum: {
        Literal l;
        l.kind = Literal::Kind::Ident;
        l.text = slot.values[rng.below(slot.values.size())];
        return l;
      }
      case SlotKind::String: return string_literal(slot, ctx);
    }
    return Literal{};
  }

  Node node(std::string_view category, int depth, const SamplerContext& ctx) {
    if (++nodes > params.max_nodes) throw TooLarge{};
    const auto* alts = grammar.alternatives(category);
    if (alts == nullptr) throw Error(Errc::GenerationBudgetExceeded, "unknown category " + std::string(category));
    const int budget = params.max_depth - depth;
    std::vector<const Alternative*> feasible;
    int lowest = 1 << 20;
    for (const auto& a : *alts) {
      if (!allowed(a, category, ctx) || a.min_height > std::max(budget, 1)) continue;
      feasible.push_back(&a);
      lowest = std::min(lowest, a.min_height);
    }
    if (feasible.empty() || (budget < 1 && lowest > 1))
      throw Error(Errc::GenerationBudgetExceeded, "no alternative of '" + std::string(category) + "' fits");
    const double p_terminal = std::min(1.0, params.terminal_bias * (depth + 1) / std::max(1, params.max_depth));
    if (rng.chance(p_terminal)) std::erase_if(feasible, [&](const Alternative* a) { return a->min_height > lowest; });
    const Alternative& alt = *feasible[rng.below(feasible.size())];

    SamplerContext inner = ctx;
    inner.replacing_board = false;
    if (alt.head == "piece") inner.in_piece = true;
    if (alt.head == "remove") inner.in_removal = true;
    Node n;
    n.head = alt.head;
    if (!alt.tag.empty()) n.args.push_back({"", Literal{Literal::Kind::Ident, alt.tag, {}}});
    for (const Slot& slot : alt.slots) {
      if (slot.optional) {
        const bool structural =
            slot.kind == SlotKind::Category || slot.kind == SlotKind::SetOf || slot.kind == SlotKind::CategoryOrSet;
        if (structural && category_height(slot.category, inner) > budget - 1) continue;
        if (!rng.chance(0.5)) continue;
      }
      n.args.push_back({slot.key, value(slot, depth, inner)});
    }
    return n;
  }
};

}  // namespace

std::vector<gdl::ExpressionSite> mutable_sites(const gdl::GameTree& tree, const Grammar& grammar) {
  auto sites = gdl::extract_expressions(tree, grammar);
  std::vector<gdl::ExpressionSite> out;
  for (std::size_t i = 1; i < sites.size(); ++i)
    if (!sites[i].category.empty()) out.push_back(sites[i]);
  return out;
}

MutationRequest make_request(std::string_view parent, Rng& rng, const Grammar& grammar) {
  const auto tree = gdl::parse_game(parent);
  const auto sites = mutable_sites(tree, grammar);
  if (sites.empty()) throw Error(Errc::NoSites, "game has no mutable expression");
  return request_for(parent, sites[rng.below(sites.size())]);
}

MutationRequest make_request(std::string_view parent, Rng& rng, qd::BanditStats& bandit, const Grammar& grammar) {
  const auto tree = gdl::parse_game(parent);
  const auto sites = mutable_sites(tree, grammar);
  if (sites.empty()) throw Error(Errc::NoSites, "game has no mutable expression");
  return request_for(parent, sites[qd::ucb_select(bandit, sites, rng)]);
}

void SubtreeLibrary::add(const std::string& category, std::string text) {
  auto& list = by_category_[category];
  if (std::find(list.begin(), list.end(), text) == list.end()) list.push_back(std::move(text));
}

SubtreeLibrary SubtreeLibrary::harvest(std::span<const gdl::GameTree> corpus, const Grammar& grammar) {
  SubtreeLibrary lib;
  for (const auto& tree : corpus) {
    for (const auto& site : mutable_sites(tree, grammar)) {
      const std::string_view text = std::string_view(tree.source).substr(site.span.begin, site.span.size());
      lib.add(site.category, gdl::print_canonical(gdl::parse_fragment(text)));
    }
  }
  return lib;
}

const std::vector<std::string>& SubtreeLibrary::entries(std::string_view category) const {
  static const std::vector<std::string> kEmpty;
  const auto it = by_category_.find(category);
  return it == by_category_.end() ? kEmpty : it->second;
}

std::size_t SubtreeLibrary::size() const {
  std::size_t n = 0;
  for (const auto& [_, v] : by_category_) n += v.size();
  return n;
}

SamplerContext context_for(const gdl::GameTree& tree, const gdl::ExpressionSite& site) {
  SamplerContext ctx;
  gdl::for_each_node(tree.root, [&](const Node& n) {
    if (n.head != "piece" || n.args.size() < 2) return;
    const auto* name = std::get_if<Literal>(&n.args[0].value);
    const auto* owner = std::get_if<Literal>(&n.args[1].value);
    if (name && owner) ctx.pieces.emplace_back(name->text, owner->text);
    // the site lies strictly inside a piece declaration
    if (n.span.begin < site.span.begin && site.span.end <= n.span.end) ctx.in_piece = true;
  });
  ctx.replacing_board = site.head == "board" && site.category == "item";
  return ctx;
}

Node sample_subtree(const Grammar& grammar, std::string_view category, const SamplerContext& context,
                    const GrammarSamplerParams& params, Rng& rng) {
  if (params.max_depth < 1) throw Error(Errc::InvalidParams, "max_depth must be >= 1");
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    Sampler s{grammar, params, rng};
    try {
      return s.node(category, 0, context);
    } catch (const TooLarge&) {
    }
  }
  throw Error(Errc::GenerationBudgetExceeded, "derivations exceeded the size budget");
}

std::string grammar_mutate(const MutationRequest& req, const Grammar& grammar, const SubtreeLibrary& library,
                           const GrammarSamplerParams& params, Rng& rng) {
  const gdl::GameTree tree = gdl::parse_game(req.parent);
  const std::string parent_text = gdl::print_canonical(tree);
  const SamplerContext ctx = context_for(tree, req.site);
  const std::string occupant = gdl::print_canonical(gdl::parse_fragment(req.target()));

  std::vector<const std::string*> alternatives;
  for (const auto& e : library.entries(req.category))
    if (e != occupant) alternatives.push_back(&e);

  std::optional<std::string> uncompiled, unchanged;
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    Node replacement;
    try {
      if (!alternatives.empty() && rng.chance(params.subtree_library_p)) {
        replacement = gdl::parse_fragment(*alternatives[rng.below(alternatives.size())]);
      } else {
        replacement = sample_subtree(grammar, req.category, ctx, params, rng);
      }
      const gdl::GameTree result = gdl::splice(tree, req.site, replacement, grammar);
      if (!gdl::validate(result, grammar).ok()) continue;
      std::string text = gdl::print_canonical(result);
      if (text == parent_text) {
        unchanged = std::move(text);
        continue;
      }
      try {
        engine::compile(result);
        return text;
      } catch (const Error&) {
        if (!uncompiled) uncompiled = std::move(text);
      }
    } catch (const Error& e) {
      if (e.code() != Errc::GenerationBudgetExceeded && e.code() != Errc::CategoryMismatch) throw;
    }
  }
  if (uncompiled) return *uncompiled;
  if (unchanged) return *unchanged;
  throw Error(Errc::GenerationBudgetExceeded, "no valid replacement for '" + req.category + "'");
}

std::optional<std::string> canonical_text(std::string_view source) {
  try {
    return gdl::print_canonical(gdl::parse_game(source));
  } catch (const Error&) {
    return std::nullopt;
  }
}

MutationStatsRow mutation_stats(std::span<const std::string> corpus, const MutationOperator& op, int n,
                                std::uint64_t seed) {
  std::vector<std::string> parents;
  for (const auto& g : corpus)
    if (auto c = canonical_text(g)) parents.push_back(std::move(*c));
  if (parents.empty() || n < 1) throw Error(Errc::InvalidParams, "mutation_stats needs games and n >= 1");
  Rng rng(seed);
  int novel = 0, valid = 0, both = 0;
  for (int i = 0; i < n; ++i) {
    const std::string& parent = parents[rng.below(parents.size())];
    const MutationRequest req = make_request(parent, rng);
    std::optional<std::string> candidate;
    try {
      candidate = op(req, rng);
    } catch (const Error&) {
    }
    if (!candidate) continue;
    const auto canon = canonical_text(*candidate);
    const bool is_novel = canon.value_or(*candidate) != parent;
    bool is_valid = false;
    if (canon) {
      try {
        engine::compile(gdl::parse_game(*canon));
        is_valid = true;
      } catch (const Error&) {
      }
    }
    novel += is_novel;
    valid += is_valid;
    both += is_novel && is_valid;
  }
  MutationStatsRow row;
  row.attempts = n;
  row.novel = 100.0 * novel / n;
  row.valid = 100.0 * valid / n;
  row.novel_and_valid = 100.0 * both / n;
  return row;
}

std::string format_mutation_table(std::span<const std::pair<std::string, MutationStatsRow>> rows) {
  std::size_t width = 8;
  for (const auto& [name, _] : rows) width = std::max(width, name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "Operator" << " | " << std::right << std::setw(6)
      << "Novel" << " | " << std::setw(6) << "Valid" << " | " << std::setw(13) << "Novel & Valid" << '\n';
  out << std::string(width, '-') << "-+-" << std::string(6, '-') << "-+-" << std::string(6, '-') << "-+-"
      << std::string(13, '-') << '\n';
  out << std::fixed << std::setprecision(2);
  for (const auto& [name, r] : rows) {
    out << std::left << std::setw(static_cast<int>(width)) << name << " | " << std::right << std::setw(6) << r.novel
        << " | " << std::setw(6) << r.valid << " | " << std::setw(13) << r.novel_and_valid << '\n';
  }
  return out.str();
}

}  // namespace gavel::mutate

#include "tapo/guard.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "tapo/error.hpp"
#include "tapo/reasoner.hpp"

namespace tapo {

GuardAtom GuardAtom::of(Assertion a) {
  GuardAtom g;
  g.kind = Kind::Assertion;
  g.assertion = std::move(a);
  return g;
}

GuardAtom GuardAtom::subsumption(Concept c, Concept d) {
  GuardAtom g;
  g.kind = Kind::Subsumption;
  g.sub = std::move(c);
  g.super = std::move(d);
  return g;
}

std::strong_ordering operator<=>(const GuardAtom& a, const GuardAtom& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (a.is_assertion()) return a.assertion <=> b.assertion;
  if (auto c = a.sub <=> b.sub; c != 0) return c;
  return a.super <=> b.super;
}

std::string to_string(const GuardAtom& atom) {
  if (atom.is_assertion()) return to_string(atom.assertion);
  return "[" + to_string(atom.sub) + " sub " + to_string(atom.super) + "]";
}

GuardExpr::GuardExpr() = default;

GuardExpr GuardExpr::truth() { return GuardExpr(); }

GuardExpr GuardExpr::falsity() {
  GuardExpr g;
  g.kind_ = GuardKind::False;
  return g;
}

GuardExpr GuardExpr::atom(GuardAtom a) {
  GuardExpr g;
  g.kind_ = GuardKind::Atom;
  g.atom_ = std::make_shared<const GuardAtom>(std::move(a));
  return g;
}

GuardExpr GuardExpr::conj(GuardExpr lhs, GuardExpr rhs) {
  GuardExpr g;
  g.kind_ = GuardKind::And;
  g.args_ = {std::move(lhs), std::move(rhs)};
  return g;
}

GuardExpr GuardExpr::disj(GuardExpr lhs, GuardExpr rhs) {
  GuardExpr g;
  g.kind_ = GuardKind::Or;
  g.args_ = {std::move(lhs), std::move(rhs)};
  return g;
}

GuardExpr GuardExpr::negation(GuardExpr body) {
  GuardExpr g;
  g.kind_ = GuardKind::Not;
  g.args_ = {std::move(body)};
  return g;
}

std::size_t GuardExpr::depth() const {
  std::size_t d = 0;
  for (const auto& a : args_) d = std::max(d, a.depth());
  return d + 1;
}

bool operator==(const GuardExpr& a, const GuardExpr& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ == GuardKind::Atom) return *a.atom_ == *b.atom_;
  return a.args_ == b.args_;
}

std::strong_ordering operator<=>(const GuardExpr& a, const GuardExpr& b) {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  if (a.kind_ == GuardKind::Atom) return *a.atom_ <=> *b.atom_;
  for (std::size_t i = 0; i < a.args_.size() && i < b.args_.size(); ++i) {
    if (auto c = a.args_[i] <=> b.args_[i]; c != 0) return c;
  }
  return a.args_.size() <=> b.args_.size();
}

namespace {

int precedence(const GuardExpr& g) {
  switch (g.kind()) {
    case GuardKind::Or: return 1;
    case GuardKind::And: return 2;
    default: return 3;
  }
}

void print(const GuardExpr& g, std::string& out) {
  auto operand = [&out](const GuardExpr& sub, bool parens) {
    if (parens) out += '(';
    print(sub, out);
    if (parens) out += ')';
  };
  switch (g.kind()) {
    case GuardKind::True: out += "true"; return;
    case GuardKind::False: out += "false"; return;
    case GuardKind::Atom: out += to_string(g.atom()); return;
    case GuardKind::And:
    case GuardKind::Or: {
      int p = precedence(g);
      operand(g.lhs(), precedence(g.lhs()) < p);
      out += g.is(GuardKind::And) ? " and " : " or ";
      operand(g.rhs(), precedence(g.rhs()) <= p);
      return;
    }
    case GuardKind::Not:
      out += "not ";
      operand(g.body(), precedence(g.body()) < 3);
      return;
  }
}

}  // namespace

std::string to_string(const GuardExpr& g) {
  std::string out;
  print(g, out);
  return out;
}

void collect_atoms(const GuardExpr& g, std::set<GuardAtom>& out) {
  switch (g.kind()) {
    case GuardKind::Atom: out.insert(g.atom()); break;
    case GuardKind::And:
    case GuardKind::Or:
      collect_atoms(g.lhs(), out);
      collect_atoms(g.rhs(), out);
      break;
    case GuardKind::Not: collect_atoms(g.body(), out); break;
    default: break;
  }
}

std::string to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::Static: return "static";
    case ProviderKind::StateDerived: return "state";
    case ProviderKind::Interactive: return "interactive";
    case ProviderKind::Scripted: return "scripted";
  }
  return "unknown";
}

bool GuardProvider::value(const GuardAtom& atom, const KnowledgeState& state) {
  bool v = compute(atom, state);
  log_.push_back(AtomAnswer{atom, v});
  return v;
}

bool GuardProvider::recompute(const GuardAtom& atom, const KnowledgeState& state) {
  if (!is_pure()) throw GuardError("provider '" + name_ + "' cannot be re-queried");
  return compute(atom, state);
}

void GuardProvider::reset() { log_.clear(); }

bool StaticProvider::compute(const GuardAtom& atom, const KnowledgeState&) {
  auto it = profile_.valuation.find(atom);
  if (it == profile_.valuation.end()) {
    throw GuardError("atom '" + to_string(atom) + "' is outside the guard profile");
  }
  return it->second;
}

bool StateDerivedProvider::compute(const GuardAtom& atom, const KnowledgeState& state) {
  if (!atom.is_assertion()) {
    return derive_subsumption(state.tbox, atom.sub, atom.super).has_value();
  }
  if (atom.assertion.context != state.context) {
    throw ContextError("guard atom '" + to_string(atom) + "' is not over context '" +
                       state.context + "'");
  }
  if (mode_ == Mode::Literal) return state.contains(atom.assertion);
  return entails(state, atom.assertion, max_depth_).has_value();
}

void InteractiveProvider::reset() {
  GuardProvider::reset();
  cache_.clear();
}

bool InteractiveProvider::compute(const GuardAtom& atom, const KnowledgeState&) {
  if (auto it = cache_.find(atom); it != cache_.end()) return it->second;
  nlohmann::json question = {{"kind", "guard"}, {"atom", to_string(atom)}};
  while (true) {
    auto answer = channel_->ask(question.dump());
    if (!answer) throw GuardError("question channel closed");
    if (*answer == "t" || *answer == "f") {
      bool v = *answer == "t";
      cache_.emplace(atom, v);
      return v;
    }
  }
}

void ScriptedProvider::reset() {
  GuardProvider::reset();
  calls_.clear();
}

bool ScriptedProvider::compute(const GuardAtom& atom, const KnowledgeState&) {
  auto it = script_.find(atom);
  if (it == script_.end() || it->second.empty()) {
    throw GuardError("atom '" + to_string(atom) + "' has no scripted values");
  }
  std::size_t n = calls_[atom]++;
  const auto& values = it->second;
  return values[std::min(n, values.size() - 1)];
}

namespace {

template <typename AtomFn>
bool evaluate(const GuardExpr& g, AtomFn&& atom_value) {
  switch (g.kind()) {
    case GuardKind::True: return true;
    case GuardKind::False: return false;
    case GuardKind::Atom: return atom_value(g.atom());
    case GuardKind::And: return evaluate(g.lhs(), atom_value) && evaluate(g.rhs(), atom_value);
    case GuardKind::Or: return evaluate(g.lhs(), atom_value) || evaluate(g.rhs(), atom_value);
    case GuardKind::Not: return !evaluate(g.body(), atom_value);
  }
  return false;
}

}  // namespace

bool eval_guard(GuardProvider& provider, const GuardExpr& guard, const KnowledgeState& state) {
  return evaluate(guard, [&](const GuardAtom& a) { return provider.value(a, state); });
}

bool eval_guard(const GuardProfile& profile, const GuardExpr& guard) {
  return evaluate(guard, [&](const GuardAtom& a) {
    auto it = profile.valuation.find(a);
    if (it == profile.valuation.end()) {
      throw GuardError("atom '" + to_string(a) + "' is outside the guard profile");
    }
    return it->second;
  });
}

GuardProfile derive_profile(const KnowledgeState& state, const std::set<GuardAtom>& atoms,
                            std::size_t max_depth) {
  StateDerivedProvider provider(max_depth);
  GuardProfile profile;
  for (const auto& a : atoms) profile.valuation.emplace(a, provider.value(a, state));
  return profile;
}

GuardProfile TruthTable::profile(std::size_t row) const {
  GuardProfile p;
  for (std::size_t i = 0; i < atoms.size(); ++i) p.valuation.emplace(atoms[i], (row >> i) & 1u);
  return p;
}

namespace {

// Column-wise evaluation: every subguard is evaluated on all rows at once.
std::vector<bool> columns(const GuardExpr& g, const std::vector<GuardAtom>& atoms,
                          std::size_t rows) {
  std::vector<bool> out(rows);
  switch (g.kind()) {
    case GuardKind::True: out.flip(); break;
    case GuardKind::False: break;
    case GuardKind::Atom: {
      auto pos = static_cast<std::size_t>(
          std::lower_bound(atoms.begin(), atoms.end(), g.atom()) - atoms.begin());
      for (std::size_t r = 0; r < rows; ++r) out[r] = ((r >> pos) & 1u) != 0;
      break;
    }
    case GuardKind::And:
    case GuardKind::Or: {
      auto l = columns(g.lhs(), atoms, rows);
      auto r = columns(g.rhs(), atoms, rows);
      bool conj = g.is(GuardKind::And);
      for (std::size_t i = 0; i < rows; ++i) out[i] = conj ? (l[i] && r[i]) : (l[i] || r[i]);
      break;
    }
    case GuardKind::Not:
      out = columns(g.body(), atoms, rows);
      out.flip();
      break;
  }
  return out;
}

}  // namespace

TruthTable truth_table(const GuardExpr& guard) {
  std::set<GuardAtom> atoms;
  collect_atoms(guard, atoms);
  if (atoms.size() > kMaxTruthTableAtoms) {
    throw GuardError("guard has " + std::to_string(atoms.size()) + " atoms; at most " +
                     std::to_string(kMaxTruthTableAtoms) + " supported");
  }
  TruthTable t;
  t.atoms.assign(atoms.begin(), atoms.end());
  t.rows = columns(guard, t.atoms, std::size_t{1} << t.atoms.size());
  return t;
}

}  // namespace tapo

#include "tapo/finite_models.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <tuple>
#include <stdexcept>
#include <vector>

namespace tapo {

bool Interpretation::member(const Concept& c, std::size_t x) const {
  switch (c.kind()) {
    case ConceptKind::Top: return true;
    case ConceptKind::Bottom: return false;
    case ConceptKind::Atom: {
      auto it = atoms.find(c.name());
      return it != atoms.end() && it->second.count(x);
    }
    case ConceptKind::And: return member(c.lhs(), x) && member(c.rhs(), x);
    case ConceptKind::Or: return member(c.lhs(), x) || member(c.rhs(), x);
    case ConceptKind::Not: return !member(c.body(), x);
    case ConceptKind::Exists:
    case ConceptKind::Forall: {
      auto it = roles.find(c.name());
      bool ex = c.is(ConceptKind::Exists);
      for (std::size_t y = 0; y < domain; ++y) {
        bool edge = it != roles.end() && it->second.count({x, y});
        if (!edge) continue;
        bool in = member(c.body(), y);
        if (ex && in) return true;
        if (!ex && !in) return false;
      }
      return !ex;
    }
  }
  return false;
}

bool Interpretation::holds(const Assertion& a) const {
  auto x = individuals.at(a.individual);
  if (a.is_concept()) return member(a.term, x);
  auto it = roles.find(a.role);
  return it != roles.end() && it->second.count({x, individuals.at(a.other)});
}

bool Interpretation::satisfies(const TBox& tbox) const {
  for (const auto& ax : tbox) {
    for (std::size_t x = 0; x < domain; ++x) {
      if (member(ax.lhs, x) && !member(ax.rhs, x)) return false;
    }
  }
  return true;
}

bool Interpretation::satisfies(const ABox& abox) const {
  for (const auto& a : abox) {
    if (!holds(a)) return false;
  }
  return true;
}

namespace {

using Clause = std::vector<int>;

// Propositional grounding of ALC over a fixed domain. Literals are +-(var+1).
class Grounding {
 public:
  explicit Grounding(std::size_t n) : n_(n) {}

  int atom(const Name& a, std::size_t x) { return var({"A:" + a, x, 0}); }
  int role(const Name& r, std::size_t x, std::size_t y) { return var({"R:" + r, x, y}); }

  int lit(const Concept& c, std::size_t x) {
    switch (c.kind()) {
      case ConceptKind::Atom: return atom(c.name(), x);
      case ConceptKind::Top: return truth();
      case ConceptKind::Bottom: return -truth();
      case ConceptKind::Not: return -lit(c.body(), x);
      default: break;
    }
    auto key = std::make_pair(c, x);
    if (auto it = compound_.find(key); it != compound_.end()) return it->second;
    int v = fresh();
    compound_.emplace(key, v);
    switch (c.kind()) {
      case ConceptKind::And: {
        int a = lit(c.lhs(), x), b = lit(c.rhs(), x);
        clauses.push_back({-v, a});
        clauses.push_back({-v, b});
        clauses.push_back({v, -a, -b});
        break;
      }
      case ConceptKind::Or: {
        int a = lit(c.lhs(), x), b = lit(c.rhs(), x);
        clauses.push_back({-v, a, b});
        clauses.push_back({v, -a});
        clauses.push_back({v, -b});
        break;
      }
      case ConceptKind::Exists: {
        // v <-> OR_y (r(x,y) and C(y))
        Clause any{-v};
        for (std::size_t y = 0; y < n_; ++y) {
          int r = role(c.name(), x, y), b = lit(c.body(), y), w = fresh();
          clauses.push_back({-w, r});
          clauses.push_back({-w, b});
          clauses.push_back({w, -r, -b});
          clauses.push_back({v, -w});
          any.push_back(w);
        }
        clauses.push_back(any);
        break;
      }
      case ConceptKind::Forall: {
        // v <-> not OR_y (r(x,y) and not C(y))
        Clause any{v};
        for (std::size_t y = 0; y < n_; ++y) {
          int r = role(c.name(), x, y), b = lit(c.body(), y), u = fresh();
          clauses.push_back({-u, r});
          clauses.push_back({-u, -b});
          clauses.push_back({u, -r, b});
          clauses.push_back({-v, -u});
          any.push_back(u);
        }
        clauses.push_back(any);
        break;
      }
      default: break;
    }
    return v;
  }

  std::size_t vars() const { return count_; }

  Interpretation decode(const std::vector<std::int8_t>& value,
                        const std::map<Name, std::size_t>& individuals) const {
    Interpretation m;
    m.domain = n_;
    m.individuals = individuals;
    for (const auto& [key, v] : named_) {
      const auto& [sym, x, y] = key;
      bool on = value[v - 1] > 0;
      if (sym[0] == 'A') {
        auto& ext = m.atoms[sym.substr(2)];
        if (on) ext.insert(x);
      } else {
        auto& ext = m.roles[sym.substr(2)];
        if (on) ext.insert({x, y});
      }
    }
    return m;
  }

  std::vector<Clause> clauses;

 private:
  using Key = std::tuple<std::string, std::size_t, std::size_t>;

  int fresh() { return static_cast<int>(++count_); }

  int var(const Key& k) {
    if (auto it = named_.find(k); it != named_.end()) return it->second;
    int v = fresh();
    named_.emplace(k, v);
    return v;
  }

  int truth() {
    if (truth_ == 0) {
      truth_ = fresh();
      clauses.push_back({truth_});
    }
    return truth_;
  }

  std::size_t n_;
  std::size_t count_ = 0;
  int truth_ = 0;
  std::map<Key, int> named_;
  std::map<std::pair<Concept, std::size_t>, int> compound_;
};

class Dpll {
 public:
  Dpll(const std::vector<Clause>& clauses, std::size_t vars)
      : clauses_(clauses), value_(vars, 0) {}

  bool solve() { return search(); }
  const std::vector<std::int8_t>& value() const { return value_; }

 private:
  std::int8_t eval(int lit) const {
    std::int8_t v = value_[std::abs(lit) - 1];
    return lit > 0 ? v : static_cast<std::int8_t>(-v);
  }

  void set(int lit) { value_[std::abs(lit) - 1] = lit > 0 ? 1 : -1; }

  // Unit propagation to a fixpoint; false on conflict.
  bool propagate() {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& cl : clauses_) {
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int l : cl) {
          auto v = eval(l);
          if (v > 0) {
            sat = true;
            break;
          }
          if (v == 0) {
            ++unassigned;
            last = l;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          set(last);
          changed = true;
        }
      }
    }
    return true;
  }

  bool search() {
    auto saved = value_;
    if (!propagate()) {
      value_ = std::move(saved);
      return false;
    }
    std::size_t pick = value_.size();
    for (std::size_t i = 0; i < value_.size(); ++i) {
      if (value_[i] == 0) {
        pick = i;
        break;
      }
    }
    if (pick == value_.size()) return true;
    auto before = value_;
    for (int sign : {1, -1}) {
      set(sign * static_cast<int>(pick + 1));
      if (search()) return true;
      value_ = before;
    }
    value_ = std::move(saved);
    return false;
  }

  const std::vector<Clause>& clauses_;
  std::vector<std::int8_t> value_;
};

// Restricted-growth assignments of k individuals to at most n elements; every
// other assignment is a permutation of one of these.
void partitions(std::size_t k, std::size_t n, std::vector<std::size_t>& cur,
                std::vector<std::vector<std::size_t>>& out) {
  if (cur.size() == k) {
    out.push_back(cur);
    return;
  }
  std::size_t used = 0;
  for (auto b : cur) used = std::max(used, b + 1);
  for (std::size_t b = 0; b <= used && b < n; ++b) {
    cur.push_back(b);
    partitions(k, n, cur, out);
    cur.pop_back();
  }
}

template <class Encode>
std::optional<Interpretation> search_models(const std::vector<Name>& inds, std::size_t max_domain,
                                            Encode encode) {
  for (std::size_t n = 1; n <= max_domain; ++n) {
    std::vector<std::vector<std::size_t>> maps;
    std::vector<std::size_t> cur;
    partitions(inds.size(), n, cur, maps);
    for (const auto& m : maps) {
      std::map<Name, std::size_t> iota;
      for (std::size_t i = 0; i < inds.size(); ++i) iota[inds[i]] = m[i];
      Grounding g(n);
      encode(g, iota, n);
      Dpll solver(g.clauses, g.vars());
      if (solver.solve()) return g.decode(solver.value(), iota);
    }
  }
  return std::nullopt;
}

void encode_tbox(Grounding& g, const TBox& tbox, std::size_t n) {
  for (const auto& ax : tbox) {
    for (std::size_t x = 0; x < n; ++x) g.clauses.push_back({-g.lit(ax.lhs, x), g.lit(ax.rhs, x)});
  }
}

int assertion_lit(Grounding& g, const Assertion& a, const std::map<Name, std::size_t>& iota) {
  if (a.is_concept()) return g.lit(a.term, iota.at(a.individual));
  return g.role(a.role, iota.at(a.individual), iota.at(a.other));
}

}  // namespace

std::optional<Interpretation> find_countermodel(const TBox& tbox, const ABox& base,
                                                const Assertion& goal, std::size_t max_domain) {
  std::set<Name> names{goal.individual};
  if (goal.is_role()) names.insert(goal.other);
  for (const auto& a : base) {
    names.insert(a.individual);
    if (a.is_role()) names.insert(a.other);
  }
  std::vector<Name> inds(names.begin(), names.end());
  auto model = search_models(inds, max_domain, [&](Grounding& g, const auto& iota, std::size_t n) {
    encode_tbox(g, tbox, n);
    for (const auto& a : base) g.clauses.push_back({assertion_lit(g, a, iota)});
    g.clauses.push_back({-assertion_lit(g, goal, iota)});
  });
  if (model && (!model->satisfies(tbox) || !model->satisfies(base) || model->holds(goal))) {
    throw std::logic_error("finite-model search produced a non-model");
  }
  return model;
}

std::optional<Interpretation> find_subsumption_countermodel(const TBox& tbox, const Concept& c,
                                                            const Concept& d,
                                                            std::size_t max_domain) {
  // A countermodel always has a witness element; name it element 0.
  std::optional<Interpretation> model;
  for (std::size_t n = 1; n <= max_domain && !model; ++n) {
    Grounding g(n);
    encode_tbox(g, tbox, n);
    g.clauses.push_back({g.lit(c, 0)});
    g.clauses.push_back({-g.lit(d, 0)});
    Dpll solver(g.clauses, g.vars());
    if (solver.solve()) model = g.decode(solver.value(), {});
  }
  if (model && (!model->satisfies(tbox) || !model->member(c, 0) || model->member(d, 0))) {
    throw std::logic_error("finite-model search produced a non-model");
  }
  return model;
}

}  // namespace tapo

#pragma once

// Core data model: ALC concepts, context-tagged assertions, TBox axioms, the
// context poset and localized knowledge states. All values are immutable
// after construction and compare structurally.

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tapo {

using Name = std::string;

enum class ConceptKind : std::uint8_t { Top, Bottom, Atom, And, Or, Not, Exists, Forall };

class Concept {
 public:
  // Default-constructed concept is Top.
  Concept();

  static Concept top();
  static Concept bottom();
  static Concept atom(Name name);
  static Concept conj(Concept lhs, Concept rhs);
  static Concept disj(Concept lhs, Concept rhs);
  static Concept negation(Concept body);
  static Concept exists(Name role, Concept body);
  static Concept forall(Name role, Concept body);

  ConceptKind kind() const { return node_->kind; }
  bool is(ConceptKind k) const { return node_->kind == k; }

  // Atom name for Atom, role name for Exists/Forall, empty otherwise.
  const Name& name() const { return node_->name; }

  // Operands. lhs/rhs for And/Or; body for Not/Exists/Forall.
  const Concept& lhs() const;
  const Concept& rhs() const;
  const Concept& body() const;

  std::size_t size() const;
  std::size_t depth() const;

  friend bool operator==(const Concept& a, const Concept& b);
  friend std::strong_ordering operator<=>(const Concept& a, const Concept& b);

 private:
  struct Node {
    ConceptKind kind;
    Name name;
    std::vector<Concept> args;
  };

  explicit Concept(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

std::string to_string(const Concept& c);

// Every subconcept of c, including c itself.
void collect_subconcepts(const Concept& c, std::set<Concept>& out);
void collect_atoms(const Concept& c, std::set<Name>& out);
void collect_roles(const Concept& c, std::set<Name>& out);

// a:C@U or (a,b):r@U.
struct Assertion {
  enum class Kind : std::uint8_t { Concept, Role };

  Kind kind = Kind::Concept;
  Name individual;
  Name other;  // second individual of a role assertion
  Name role;
  Concept term;  // concept of a concept assertion
  Name context;

  static Assertion member(Name individual, Concept term, Name context);
  static Assertion related(Name individual, Name other, Name role, Name context);

  bool is_concept() const { return kind == Kind::Concept; }
  bool is_role() const { return kind == Kind::Role; }

  // Same assertion relabeled to another context.
  Assertion at(Name ctx) const;

  friend bool operator==(const Assertion& a, const Assertion& b);
  friend std::strong_ordering operator<=>(const Assertion& a, const Assertion& b);
};

std::string to_string(const Assertion& a);

using ABox = std::set<Assertion>;

struct TBoxAxiom {
  Concept lhs;
  Concept rhs;

  friend bool operator==(const TBoxAxiom&, const TBoxAxiom&) = default;
  friend std::strong_ordering operator<=>(const TBoxAxiom& a, const TBoxAxiom& b);
};

std::string to_string(const TBoxAxiom& ax);

using TBox = std::vector<TBoxAxiom>;

// Contexts with declared refinement edges (v, u) meaning v <= u. Only the
// edges are stored; order queries compute the reflexive-transitive closure.
class ContextPoset {
 public:
  ContextPoset() = default;

  void add_context(const Name& c);
  void add_refinement(const Name& finer, const Name& coarser);

  const std::set<Name>& elements() const { return elements_; }
  const std::set<std::pair<Name, Name>>& refinements() const { return refinements_; }
  bool contains(const Name& c) const { return elements_.count(c) > 0; }

  // Throws ContextError for unknown contexts.
  bool leq(const Name& v, const Name& u) const;

  // Greatest lower bound, if one exists.
  std::optional<Name> meet(const Name& a, const Name& b) const;

  // Contexts w with w <= u.
  std::set<Name> down_set(const Name& u) const;

  // Throws ConfigError if two distinct contexts refine each other.
  void validate() const;

  friend bool operator==(const ContextPoset&, const ContextPoset&) = default;

 private:
  void require(const Name& c) const;

  std::set<Name> elements_;
  std::set<std::pair<Name, Name>> refinements_;
};

bool context_leq(const ContextPoset& poset, const Name& v, const Name& u);

struct Signature {
  std::set<Name> concept_names;
  std::set<Name> role_names;
  std::set<Name> individual_names;
  ContextPoset contexts;

  bool has_concept(const Name& n) const { return concept_names.count(n) > 0; }
  bool has_role(const Name& n) const { return role_names.count(n) > 0; }
  bool has_individual(const Name& n) const { return individual_names.count(n) > 0; }
  bool has_context(const Name& n) const { return contexts.contains(n); }

  // Pairwise disjointness of name sets plus poset antisymmetry.
  void validate() const;

  // Throws UnknownNameError when a concept or assertion uses undeclared names.
  void check(const Concept& c) const;
  void check(const Assertion& a) const;
};

// Localized knowledge state (T, A_U) over a context U.
struct KnowledgeState {
  TBox tbox;
  ABox abox;
  Name context;

  bool contains(const Assertion& a) const { return abox.count(a) > 0; }

  // Every assertion must carry this state's context tag.
  void validate() const;

  friend bool operator==(const KnowledgeState&, const KnowledgeState&) = default;
};

// Canonical multi-line serialization used for digests and diffs.
std::string to_string(const KnowledgeState& s);

// Stable 64-bit FNV-1a digest of the canonical serialization, as 16 hex digits.
std::string digest(const KnowledgeState& s);

bool is_identifier(const std::string& s);

}  // namespace tapo

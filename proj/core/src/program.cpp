#include "tapo/program.hpp"

#include "tapo/error.hpp"

namespace tapo {

Program::Program() = default;

Program Program::skip() { return Program(); }

Program Program::add(Assertion a) {
  Program p;
  p.kind_ = ProgramKind::Add;
  p.assertion_ = std::make_shared<const Assertion>(std::move(a));
  return p;
}

Program Program::del(Assertion a) {
  Program p;
  p.kind_ = ProgramKind::Del;
  p.assertion_ = std::make_shared<const Assertion>(std::move(a));
  return p;
}

Program Program::seq(Program first, Program second) {
  Program p;
  p.kind_ = ProgramKind::Seq;
  p.args_ = {std::move(first), std::move(second)};
  return p;
}

Program Program::branch(GuardExpr guard, Program then_branch, Program else_branch) {
  Program p;
  p.kind_ = ProgramKind::If;
  p.guard_ = std::move(guard);
  p.args_ = {std::move(then_branch), std::move(else_branch)};
  return p;
}

Program Program::loop(GuardExpr guard, Program body) {
  Program p;
  p.kind_ = ProgramKind::While;
  p.guard_ = std::move(guard);
  p.args_ = {std::move(body)};
  return p;
}

Program Program::consult(Name query) {
  Program p;
  p.kind_ = ProgramKind::Consult;
  p.query_ = std::move(query);
  return p;
}

std::size_t Program::depth() const {
  std::size_t d = 0;
  for (const auto& a : args_) d = std::max(d, a.depth());
  return d + 1;
}

std::size_t Program::size() const {
  std::size_t n = 1;
  for (const auto& a : args_) n += a.size();
  return n;
}

bool operator==(const Program& a, const Program& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case ProgramKind::Skip: return true;
    case ProgramKind::Add:
    case ProgramKind::Del: return *a.assertion_ == *b.assertion_;
    case ProgramKind::Consult: return a.query_ == b.query_;
    case ProgramKind::Seq: return a.args_ == b.args_;
    case ProgramKind::If:
    case ProgramKind::While: return a.guard_ == b.guard_ && a.args_ == b.args_;
  }
  return false;
}

namespace {

void print(const Program& p, std::string& out) {
  switch (p.kind()) {
    case ProgramKind::Skip: out += "skip"; return;
    case ProgramKind::Add: out += "add " + to_string(p.assertion()); return;
    case ProgramKind::Del: out += "del " + to_string(p.assertion()); return;
    case ProgramKind::Consult: out += "consult " + p.query(); return;
    case ProgramKind::Seq:
      if (p.first().is(ProgramKind::Seq)) {
        out += "{ ";
        print(p.first(), out);
        out += " }";
      } else {
        print(p.first(), out);
      }
      out += " ; ";
      print(p.second(), out);
      return;
    case ProgramKind::If:
      out += "if " + to_string(p.guard()) + " then { ";
      print(p.then_branch(), out);
      out += " } else { ";
      print(p.else_branch(), out);
      out += " }";
      return;
    case ProgramKind::While:
      out += "while " + to_string(p.guard()) + " do { ";
      print(p.body(), out);
      out += " }";
      return;
  }
}

}  // namespace

std::string to_string(const Program& p) {
  std::string out;
  print(p, out);
  return out;
}

void collect_assertions(const Program& p, std::vector<Assertion>& out) {
  switch (p.kind()) {
    case ProgramKind::Add:
    case ProgramKind::Del: out.push_back(p.assertion()); break;
    case ProgramKind::Seq:
      collect_assertions(p.first(), out);
      collect_assertions(p.second(), out);
      break;
    case ProgramKind::If:
      collect_assertions(p.then_branch(), out);
      collect_assertions(p.else_branch(), out);
      break;
    case ProgramKind::While: collect_assertions(p.body(), out); break;
    default: break;
  }
}

void collect_guard_atoms(const Program& p, std::set<GuardAtom>& out) {
  switch (p.kind()) {
    case ProgramKind::Seq:
      collect_guard_atoms(p.first(), out);
      collect_guard_atoms(p.second(), out);
      break;
    case ProgramKind::If:
      collect_atoms(p.guard(), out);
      collect_guard_atoms(p.then_branch(), out);
      collect_guard_atoms(p.else_branch(), out);
      break;
    case ProgramKind::While:
      collect_atoms(p.guard(), out);
      collect_guard_atoms(p.body(), out);
      break;
    default: break;
  }
}

const KnowledgeState& Outcome::state() const {
  if (const auto* f = std::get_if<Final>(&result)) return f->state;
  if (const auto* o = std::get_if<OutOfFuel>(&result)) return o->state;
  throw Error("failed outcome carries no state: " + std::get<Failed>(result).error);
}

const std::string& Outcome::error() const {
  static const std::string none;
  if (const auto* f = std::get_if<Failed>(&result)) return f->error;
  return none;
}

std::string describe(const Outcome& o) {
  if (o.is_final()) return "final";
  if (const auto* f = std::get_if<OutOfFuel>(&o.result)) {
    return "out-of-fuel after " + std::to_string(f->steps) + " steps";
  }
  return "failed: " + o.error();
}

namespace {

struct FuelExhausted {
  KnowledgeState state;
};

class Interpreter {
 public:
  Interpreter(GuardProvider& provider, std::size_t fuel, EvalHooks hooks)
      : provider_(provider), fuel_(fuel), hooks_(hooks) {}

  std::size_t used() const { return used_; }

  KnowledgeState run(const Program& p, KnowledgeState s) {
    switch (p.kind()) {
      case ProgramKind::Skip:
        notify(Rule::Skip, p, s, s);
        return s;
      case ProgramKind::Add: {
        KnowledgeState next = s;
        next.abox.insert(p.assertion());
        notify(Rule::Add, p, s, next);
        return next;
      }
      case ProgramKind::Del: {
        KnowledgeState next = s;
        next.abox.erase(p.assertion());
        notify(Rule::Del, p, s, next);
        return next;
      }
      case ProgramKind::Seq: {
        KnowledgeState mid = run(p.first(), s);
        return run(p.second(), std::move(mid));
      }
      case ProgramKind::If: {
        bool taken = guard(p.guard(), s);
        notify(taken ? Rule::IfT : Rule::IfF, p, s, s);
        return run(taken ? p.then_branch() : p.else_branch(), s);
      }
      case ProgramKind::While: {
        // Iterative unfolding of While-T until While-F applies.
        KnowledgeState cur = s;
        while (guard(p.guard(), cur)) {
          spend(cur);
          notify(Rule::WhileT, p, cur, cur);
          cur = run(p.body(), std::move(cur));
        }
        notify(Rule::WhileF, p, cur, cur);
        return cur;
      }
      case ProgramKind::Consult: {
        if (hooks_.consult == nullptr) {
          throw Error("no consult handler for 'consult " + p.query() + "'");
        }
        spend(s);
        KnowledgeState out = hooks_.consult->consult(s, p.query());
        notify(Rule::Consult, p, s, out);
        return out;
      }
    }
    return s;
  }

 private:
  bool guard(const GuardExpr& g, const KnowledgeState& s) {
    bool v = eval_guard(provider_, g, s);
    if (hooks_.observer) hooks_.observer->on_guard(g, v, s);
    return v;
  }

  void spend(const KnowledgeState& s) {
    if (used_ == fuel_) throw FuelExhausted{s};
    ++used_;
  }

  void notify(Rule r, const Program& p, const KnowledgeState& before,
              const KnowledgeState& after) {
    if (hooks_.observer) hooks_.observer->on_rule(r, p, before, after);
  }

  GuardProvider& provider_;
  std::size_t fuel_;
  std::size_t used_ = 0;
  EvalHooks hooks_;
};

}  // namespace

Outcome eval_program(const KnowledgeState& state, const Program& prog, GuardProvider& provider,
                     std::size_t fuel, EvalHooks hooks) {
  std::vector<Assertion> embedded;
  collect_assertions(prog, embedded);
  for (const auto& a : embedded) {
    if (a.context != state.context) {
      return Outcome{Failed{"context mismatch: '" + to_string(a) + "' in a program run over '" +
                            state.context + "'"}};
    }
  }
  std::set<GuardAtom> atoms;
  collect_guard_atoms(prog, atoms);
  for (const auto& a : atoms) {
    if (a.is_assertion() && a.assertion.context != state.context) {
      return Outcome{Failed{"context mismatch: guard atom '" + to_string(a) +
                            "' in a program run over '" + state.context + "'"}};
    }
  }

  Interpreter interp(provider, fuel, hooks);
  try {
    return Outcome{Final{interp.run(prog, state)}};
  } catch (FuelExhausted& e) {
    return Outcome{OutOfFuel{std::move(e.state), interp.used()}};
  } catch (const Error& e) {
    return Outcome{Failed{e.what()}};
  }
}

std::optional<KnowledgeState> Denotation::operator()(const KnowledgeState& s) const {
  provider_->reset();
  auto out = eval_program(s, prog_, *provider_, fuel_, EvalHooks{consult_, nullptr});
  if (!out.is_final()) return std::nullopt;
  return std::get<Final>(out.result).state;
}

Denotation denotation(Program prog, std::shared_ptr<GuardProvider> provider, std::size_t fuel) {
  return Denotation(std::move(prog), std::move(provider), fuel);
}

namespace {

GuardExpr restrict_guard(const GuardExpr& g, const Restriction& r, const Program& node) {
  switch (g.kind()) {
    case GuardKind::Atom: {
      auto mapped = r.apply(g.atom());
      if (!mapped) throw RestrictionFailure(to_string(node), "guard atom '" + to_string(g.atom()) + "'");
      return GuardExpr::atom(*mapped);
    }
    case GuardKind::And:
      return GuardExpr::conj(restrict_guard(g.lhs(), r, node), restrict_guard(g.rhs(), r, node));
    case GuardKind::Or:
      return GuardExpr::disj(restrict_guard(g.lhs(), r, node), restrict_guard(g.rhs(), r, node));
    case GuardKind::Not: return GuardExpr::negation(restrict_guard(g.body(), r, node));
    default: return g;
  }
}

}  // namespace

Program restrict_program(const Program& prog, const Restriction& r) {
  switch (prog.kind()) {
    case ProgramKind::Skip:
    case ProgramKind::Consult: return prog;
    case ProgramKind::Add:
    case ProgramKind::Del: {
      auto mapped = r.apply(prog.assertion());
      if (!mapped) {
        throw RestrictionFailure(to_string(prog), "assertion '" + to_string(prog.assertion()) + "'");
      }
      return prog.is(ProgramKind::Add) ? Program::add(*mapped) : Program::del(*mapped);
    }
    case ProgramKind::Seq:
      return Program::seq(restrict_program(prog.first(), r), restrict_program(prog.second(), r));
    case ProgramKind::If:
      return Program::branch(restrict_guard(prog.guard(), r, prog),
                             restrict_program(prog.then_branch(), r),
                             restrict_program(prog.else_branch(), r));
    case ProgramKind::While:
      return Program::loop(restrict_guard(prog.guard(), r, prog), restrict_program(prog.body(), r));
  }
  return prog;
}

}  // namespace tapo

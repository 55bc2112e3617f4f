#include "lcstrs/solver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <mutex>
#include <random>
#include <set>

namespace lcstrs {

const char* verdict_str(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return "yes";
    case Verdict::No:
      return "no";
    default:
      return "unknown";
  }
}

namespace {

std::atomic<int> g_enum_bound{64};
std::mutex g_smt_mu;
std::string g_smt_path;
bool g_smt_init = false;

// Boolean skeleton in negation normal form; atoms are linear after
// abstraction of nonlinear monomials.
struct Node {
  enum Kind { True, False, And, Or, Lin, BoolLit } kind = True;
  std::vector<Node> kids;
  LinearConstraint lin;
  std::string bvar;
  bool pol = true;
};

struct Abstraction {
  std::map<Monomial, std::string> names;
  std::vector<LinearConstraint> side;  // nonnegativity of even monomials
  bool used = false;
};

LinearConstraint linearize(const Polynomial& p, Abstraction& abs) {
  LinearConstraint lc;
  for (const auto& [m, c] : p.terms) {
    if (m.empty()) {
      lc.c += c;
    } else if (m.size() == 1 && m[0].second == 1) {
      lc.coef[m[0].first] += c;
    } else {
      abs.used = true;
      auto it = abs.names.find(m);
      if (it == abs.names.end()) {
        std::string n = "$m" + std::to_string(abs.names.size());
        it = abs.names.emplace(m, n).first;
        bool even = std::all_of(m.begin(), m.end(), [](const auto& f) { return f.second % 2 == 0; });
        if (even) {
          LinearConstraint nonneg;
          nonneg.coef[n] = 1;
          abs.side.push_back(nonneg);
        }
      }
      lc.coef[it->second] += c;
    }
  }
  return lc;
}

Node leaf(const LinearConstraint& lc) {
  Node n;
  n.kind = Node::Lin;
  n.lin = lc;
  return n;
}

LinearConstraint scaled(const LinearConstraint& lc, const Int& f, const Int& add) {
  LinearConstraint r;
  for (const auto& [v, a] : lc.coef) r.coef[v] = a * f;
  r.c = lc.c * f + add;
  return r;
}

Node mk_node(Node::Kind k, std::vector<Node> kids) {
  Node n;
  n.kind = k;
  n.kids = std::move(kids);
  return n;
}

Node to_nnf(const Term& t, bool pol, Abstraction& abs) {
  if (is_bool_lit(t)) return mk_node(bool_value(t) == pol ? Node::True : Node::False, {});
  if (t->kind == TermKind::Var) {
    Node n;
    n.kind = Node::BoolLit;
    n.bvar = t->name;
    n.pol = pol;
    return n;
  }
  Term h = head(t);
  auto as = args(t);
  if (h->kind != TermKind::Sym || !h->theory) throw TheoryError(to_string(t) + " is not a constraint");
  const std::string& op = h->name;
  if (op == "not") return to_nnf(as[0], !pol, abs);
  if (op == "/\\" || op == "\\/") {
    bool conj = (op == "/\\") == pol;
    return mk_node(conj ? Node::And : Node::Or, {to_nnf(as[0], pol, abs), to_nnf(as[1], pol, abs)});
  }
  if ((op == "=" || op == "!=") && as[0]->type->sort == "Bool") {
    bool equal = (op == "=") == pol;
    Node a = to_nnf(as[0], true, abs), na = to_nnf(as[0], false, abs);
    Node b = to_nnf(as[1], true, abs), nb = to_nnf(as[1], false, abs);
    if (equal) return mk_node(Node::Or, {mk_node(Node::And, {a, b}), mk_node(Node::And, {na, nb})});
    return mk_node(Node::Or, {mk_node(Node::And, {a, nb}), mk_node(Node::And, {na, b})});
  }
  static const std::map<std::string, std::string> flip = {{"<", ">="}, {">=", "<"}, {"<=", ">"},
                                                          {">", "<="}, {"=", "!="}, {"!=", "="}};
  std::string eff = op;
  if (!pol) {
    auto it = flip.find(op);
    if (it == flip.end()) throw TheoryError("unexpected operator " + op);
    eff = it->second;
  }
  LinearConstraint d = linearize(poly_normal_form(as[0]) - poly_normal_form(as[1]), abs);
  if (eff == ">=") return leaf(d);
  if (eff == ">") return leaf(scaled(d, 1, -1));
  if (eff == "<=") return leaf(scaled(d, -1, 0));
  if (eff == "<") return leaf(scaled(d, -1, -1));
  if (eff == "=") {
    d.eq = true;
    return leaf(d);
  }
  if (eff == "!=") return mk_node(Node::Or, {leaf(scaled(d, 1, -1)), leaf(scaled(d, -1, -1))});
  throw TheoryError("unexpected operator " + op);
}

struct Search {
  bool unknown = false;
  std::map<std::string, Int> model;
  std::map<std::string, bool> bools;

  bool run(std::vector<const Node*> todo, std::vector<LinearConstraint> acc, std::map<std::string, bool> bs) {
    while (!todo.empty()) {
      const Node* n = todo.back();
      todo.pop_back();
      switch (n->kind) {
        case Node::True:
          break;
        case Node::False:
          return false;
        case Node::And:
          for (auto it = n->kids.rbegin(); it != n->kids.rend(); ++it) todo.push_back(&*it);
          break;
        case Node::Lin:
          acc.push_back(n->lin);
          break;
        case Node::BoolLit: {
          auto it = bs.find(n->bvar);
          if (it != bs.end() && it->second != n->pol) return false;
          bs[n->bvar] = n->pol;
          break;
        }
        case Node::Or: {
          // Prune before branching.
          Feasibility f = omega_feasible(acc, nullptr);
          if (f == Feasibility::Unsat) return false;
          for (const auto& k : n->kids) {
            auto next = todo;
            next.push_back(&k);
            if (run(next, acc, bs)) return true;
          }
          return false;
        }
      }
    }
    std::map<std::string, Int> m;
    Feasibility f = omega_feasible(acc, &m);
    if (f == Feasibility::Unknown) {
      unknown = true;
      return false;
    }
    if (f == Feasibility::Unsat) return false;
    model = std::move(m);
    bools = std::move(bs);
    return true;
  }
};

std::map<std::string, Value> complete_model(const Term& t, const std::map<std::string, Int>& ints,
                                            const std::map<std::string, bool>& bools) {
  std::map<std::string, Value> out;
  for (const auto& v : vars_of(t)) {
    if (v->type->sort == "Bool") {
      auto it = bools.find(v->name);
      out[v->name] = Value::of_bool(it != bools.end() && it->second);
    } else {
      auto it = ints.find(v->name);
      out[v->name] = Value::of_int(it != ints.end() ? it->second : Int(0));
    }
  }
  return out;
}

bool holds(const Term& t, const std::map<std::string, Value>& env) {
  try {
    return eval_under(t, env).b;
  } catch (const TheoryError&) {
    return false;
  }
}

// Small assignments first: each variable ranges over 0, 1, -1, 2, -2 and
// tuples are visited by growing radius, first variable slowest.
std::optional<std::map<std::string, Value>> nice_witness(const Term& t) {
  auto vs = vars_of(t);
  std::size_t n = vs.size();
  if (n > 4) return std::nullopt;
  static const int seq[] = {0, 1, -1, 2, -2};
  std::map<std::string, Value> env;
  for (int r = 0; r < 5; ++r) {
    std::vector<int> idx(n, 0);
    for (;;) {
      if (n == 0 || *std::max_element(idx.begin(), idx.end()) == r) {
        for (std::size_t i = 0; i < n; ++i) {
          int v = seq[idx[i]];
          env[vs[i]->name] = vs[i]->type->sort == "Bool" ? Value::of_bool(v != 0) : Value::of_int(v);
        }
        if (holds(t, env)) return env;
      }
      bool done = true;
      for (std::size_t k = n; k-- > 0;) {
        if (idx[k] < r) {
          ++idx[k];
          done = false;
          break;
        }
        idx[k] = 0;
      }
      if (done) break;
    }
    if (n == 0) break;
  }
  return std::nullopt;
}

// Searches the box for an assignment making `t` true. Small boxes are
// exhausted; larger ones are sampled with a fixed seed.
std::optional<std::map<std::string, Value>> box_search(const Term& t, int bound, bool small_first) {
  auto vs = vars_of(t);
  std::size_t n = vs.size();
  std::map<std::string, Value> env;
  auto assign = [&](const std::vector<Int>& vals) {
    for (std::size_t i = 0; i < n; ++i) {
      if (vs[i]->type->sort == "Bool")
        env[vs[i]->name] = Value::of_bool(vals[i] != 0);
      else
        env[vs[i]->name] = Value::of_int(vals[i]);
    }
  };
  if (n == 0) {
    if (holds(t, env)) return env;
    return std::nullopt;
  }
  if (small_first) {
    if (auto w = nice_witness(t)) return w;
  }
  long total = 1;
  bool full = true;
  for (std::size_t i = 0; i < n; ++i) {
    total *= 2L * bound + 1;
    if (total > 40000) {
      full = false;
      break;
    }
  }
  if (full) {
    std::vector<Int> vals(n, -bound);
    for (;;) {
      assign(vals);
      if (holds(t, env)) return env;
      std::size_t k = 0;
      while (k < n && vals[k] == bound) vals[k++] = -bound;
      if (k == n) break;
      vals[k] += 1;
    }
    return std::nullopt;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int> dist(-bound, bound);
  for (int s = 0; s < 40000; ++s) {
    std::vector<Int> vals;
    for (std::size_t i = 0; i < n; ++i) vals.emplace_back(dist(rng));
    assign(vals);
    if (holds(t, env)) return env;
  }
  return std::nullopt;
}

}  // namespace

void set_enumeration_bound(int b) { g_enum_bound = b; }
int enumeration_bound() { return g_enum_bound; }

void set_smt_solver(const std::string& path) {
  std::lock_guard<std::mutex> lk(g_smt_mu);
  g_smt_path = path;
  g_smt_init = true;
}

std::string smt_solver() {
  std::lock_guard<std::mutex> lk(g_smt_mu);
  if (!g_smt_init) {
    const char* env = std::getenv("LCSTRS_SMT");
    g_smt_path = env ? env : "";
    g_smt_init = true;
  }
  return g_smt_path;
}

namespace {

// Top-level conjuncts v = e (v an Int variable not in e) are substituted
// away. Returns the eliminations in order; evaluating them in reverse
// recovers a model of the original formula.
Term eliminate_definitions(Term phi, std::vector<std::pair<Term, Term>>& defs) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& c : conjuncts(phi)) {
      Term h = head(c);
      auto as = args(c);
      if (!(h->kind == TermKind::Sym && h->theory && h->name == "=" && as.size() == 2)) continue;
      if (as[0]->type->sort != "Int") continue;
      for (int side = 0; side < 2 && !changed; ++side) {
        const Term& v = as[side];
        const Term& e = as[1 - side];
        if (is_var(v) && !occurs_var(v->name, e)) {
          defs.emplace_back(v, e);
          phi = apply_subst(phi, {{v->name, e}});
          changed = true;
        }
      }
      if (changed) break;
    }
  }
  return phi;
}

SolverResult sat_core(const Term& phi);

// Collects the Cauchy root bound of every univariate comparison atom.
// Returns false if some atom is not a polynomial in `x` alone.
bool root_bound(const Term& t, const std::string& x, Int& bound) {
  Term h = head(t);
  auto as = args(t);
  if (is_bool_lit(t)) return true;
  if (h->kind != TermKind::Sym || !h->theory) return false;
  static const std::set<std::string> cmp = {"<", "<=", ">", ">=", "=", "!="};
  if (cmp.count(h->name) && as.size() == 2 && as[0]->type->sort == "Int") {
    Polynomial p = poly_normal_form(as[0]) - poly_normal_form(as[1]);
    int deg = 0;
    for (const auto& [m, c] : p.terms) {
      if (m.size() > 1 || (m.size() == 1 && m[0].first != x)) return false;
      if (m.size() == 1) deg = std::max(deg, m[0].second);
    }
    if (deg == 0) return true;
    Int lead = 0, top = 0;
    for (const auto& [m, c] : p.terms) {
      int e = m.empty() ? 0 : m[0].second;
      if (e == deg) lead = abs(c);
      else top = std::max(top, Int(abs(c)));
    }
    Int r = 1 + (top + lead - 1) / lead;
    bound = std::max(bound, r);
    return true;
  }
  for (const auto& a : as)
    if (!root_bound(a, x, bound)) return false;
  return true;
}

// Formulas over a single integer variable are decided exactly: beyond the
// largest root bound every atom has constant sign.
std::optional<SolverResult> univariate(const Term& phi) {
  auto vs = vars_of(phi);
  if (vs.size() != 1 || vs[0]->type->sort != "Int") return std::nullopt;
  const std::string& x = vs[0]->name;
  Int r = 0;
  if (!root_bound(phi, x, r) || r > 100000) return std::nullopt;
  SolverResult res;
  res.via = "enumeration";
  for (Int k = -r - 1; k <= r + 1; ++k) {
    std::map<std::string, Value> env{{x, Value::of_int(k)}};
    if (holds(phi, env)) {
      res.verdict = Verdict::Yes;
      res.model = env;
      return res;
    }
  }
  res.verdict = Verdict::No;
  return res;
}

}  // namespace

SolverResult is_satisfiable(const Term& phi) {
  if (!is_constraint(phi)) throw TheoryError(to_string(phi) + " is not a constraint");
  SolverResult res = sat_core(phi);
  if (res.verdict != Verdict::Unknown) return res;
  if (auto u = univariate(phi)) return *u;
  // Substituting definitions can turn nonlinear monomials linear.
  std::vector<std::pair<Term, Term>> defs;
  Term reduced = eliminate_definitions(phi, defs);
  if (defs.empty()) return res;
  SolverResult r2 = sat_core(reduced);
  if (r2.verdict == Verdict::Yes) {
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
      std::map<std::string, Value> env = r2.model;
      for (const auto& v : vars_of(it->second))
        if (!env.count(v->name)) env[v->name] = v->type->sort == "Bool" ? Value::of_bool(false) : Value::of_int(0);
      r2.model = env;
      r2.model[it->first->name] = eval_under(it->second, env);
    }
    r2.model = complete_model(phi, [&] {
      std::map<std::string, Int> ints;
      for (const auto& [n, v] : r2.model)
        if (!v.is_bool) ints[n] = v.i;
      return ints;
    }(), [&] {
      std::map<std::string, bool> bs;
      for (const auto& [n, v] : r2.model)
        if (v.is_bool) bs[n] = v.b;
      return bs;
    }());
  }
  return r2;
}

namespace {

SolverResult sat_core(const Term& phi) {
  SolverResult res;
  Abstraction abs;
  Node root = to_nnf(phi, true, abs);
  Search s;
  std::vector<LinearConstraint> side = abs.side;
  bool found = s.run({&root}, side, {});
  if (!found && !s.unknown) {
    res.verdict = Verdict::No;
    res.via = abs.used ? "nonlinear-abstraction" : "linear";
    return res;
  }
  if (found) {
    auto m = complete_model(phi, s.model, s.bools);
    if (!abs.used || holds(phi, m)) {
      res.verdict = Verdict::Yes;
      res.model = std::move(m);
      res.via = "linear";
      return res;
    }
  }
  // Abstraction model is spurious or the linear layer gave up.
  if (auto m = box_search(phi, enumeration_bound(), true)) {
    res.verdict = Verdict::Yes;
    res.model = std::move(*m);
    res.via = "enumeration";
    return res;
  }
  if (!smt_solver().empty()) {
    SolverResult ext = smt_roundtrip(negate(phi));
    // Validity of not-phi answers satisfiability of phi.
    if (ext.verdict == Verdict::Yes) {
      res.verdict = Verdict::No;
      res.via = "smt";
      return res;
    }
    if (ext.verdict == Verdict::No) {
      res.verdict = Verdict::Yes;
      res.model = ext.model;
      res.via = "smt";
      return res;
    }
  }
  return res;
}

}  // namespace

SolverResult is_valid(const Term& phi) {
  SolverResult sat = is_satisfiable(negate(phi));
  SolverResult res;
  res.via = sat.via;
  if (sat.verdict == Verdict::No) {
    res.verdict = Verdict::Yes;
  } else if (sat.verdict == Verdict::Yes) {
    res.verdict = Verdict::No;
    // Prefer a small witness when one exists.
    auto nice = nice_witness(negate(phi));
    res.model = nice ? *nice : sat.model;
  }
  return res;
}

SolverResult entails(const Term& phi, const Term& psi) {
  return is_valid(mk_or(negate(phi), psi));
}

}  // namespace lcstrs

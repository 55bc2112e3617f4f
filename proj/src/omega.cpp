// Integer feasibility of linear constraint conjunctions (Omega test).
#include "lcstrs/solver.hpp"

#include <algorithm>

namespace lcstrs {

namespace {

struct Con {
  std::map<int, Int> a;  // var -> nonzero coefficient
  Int c = 0;
  bool eq = false;
};

using Model = std::map<int, Int>;

struct OutOfBudget {};

Int floor_div(const Int& a, const Int& b) {
  // b > 0
  Int q = a / b;
  if (a % b != 0 && a < 0) q -= 1;
  return q;
}

Int ceil_div(const Int& a, const Int& b) { return -floor_div(-a, b); }

Int abs_int(const Int& v) { return v < 0 ? Int(-v) : v; }

Int gcd_int(Int a, Int b) {
  a = abs_int(a);
  b = abs_int(b);
  while (b != 0) {
    Int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// a - m * floor(a/m + 1/2)
Int mod_hat(const Int& a, const Int& m) { return a - m * floor_div(2 * a + m, 2 * m); }

Int value_of(const Model& m, int v) {
  auto it = m.find(v);
  return it == m.end() ? Int(0) : it->second;
}

// Evaluates sum(a*x) + c, skipping `skip`.
Int eval_rest(const Con& k, const Model& m, int skip) {
  Int s = k.c;
  for (const auto& [v, a] : k.a)
    if (v != skip) s += a * value_of(m, v);
  return s;
}

// Linear expression used for substitutions: x := sum(coef*var) + c.
struct Expr {
  std::map<int, Int> a;
  Int c = 0;
};

Con substitute(const Con& k, int x, const Expr& e) {
  auto it = k.a.find(x);
  if (it == k.a.end()) return k;
  Int f = it->second;
  Con r;
  r.eq = k.eq;
  r.a = k.a;
  r.a.erase(x);
  r.c = k.c + f * e.c;
  for (const auto& [v, a] : e.a) {
    Int& slot = r.a[v];
    slot += f * a;
    if (slot == 0) r.a.erase(v);
  }
  return r;
}

class Omega {
 public:
  explicit Omega(int nvars) : next_var_(nvars) {}

  bool solve(std::vector<Con> cs, Model& model) {
    if (++calls_ > 20000) throw OutOfBudget{};
    for (;;) {
      // Normalize, drop trivial constraints, detect trivial conflicts.
      std::vector<Con> norm;
      for (auto& k : cs) {
        if (k.a.empty()) {
          if (k.eq ? k.c != 0 : k.c < 0) return false;
          continue;
        }
        Int g = 0;
        for (const auto& [_, a] : k.a) g = gcd_int(g, a);
        if (g > 1) {
          if (k.eq) {
            if (k.c % g != 0) return false;
            k.c /= g;
          } else {
            k.c = floor_div(k.c, g);
          }
          for (auto& [_, a] : k.a) a /= g;
        }
        norm.push_back(std::move(k));
      }
      cs = std::move(norm);

      auto eq_it = std::find_if(cs.begin(), cs.end(), [](const Con& k) { return k.eq; });
      if (eq_it != cs.end()) return solve_equality(cs, eq_it - cs.begin(), model);

      // Pairs with opposite coefficient vectors: contradiction or equality.
      bool restart = false;
      std::map<std::map<int, Int>, std::size_t> by_coef;
      std::vector<Con> dedup;
      for (auto& k : cs) {
        auto it = by_coef.find(k.a);
        if (it != by_coef.end()) {
          if (k.c < dedup[it->second].c) dedup[it->second].c = k.c;
          continue;
        }
        by_coef.emplace(k.a, dedup.size());
        dedup.push_back(std::move(k));
      }
      cs = std::move(dedup);
      for (std::size_t i = 0; i < cs.size() && !restart; ++i) {
        std::map<int, Int> neg = cs[i].a;
        for (auto& [_, a] : neg) a = -a;
        auto it = by_coef.find(neg);
        if (it == by_coef.end()) continue;
        Int sum = cs[i].c + cs[it->second].c;
        if (sum < 0) return false;
        if (sum == 0) {
          cs[i].eq = true;
          cs.erase(cs.begin() + static_cast<long>(it->second));
          restart = true;
        }
      }
      if (restart) continue;
      break;
    }
    if (cs.empty()) return true;
    return eliminate(cs, model);
  }

 private:
  int next_var_;
  long calls_ = 0;

  bool solve_equality(std::vector<Con> cs, std::size_t idx, Model& model) {
    Con e = cs[idx];
    int k = -1;
    for (const auto& [v, a] : e.a)
      if (abs_int(a) == 1) {
        k = v;
        break;
      }
    if (k >= 0) {
      // x_k = -a_k * (rest + c)
      Int ak = e.a.at(k);
      Expr ex;
      ex.c = -ak * e.c;
      for (const auto& [v, a] : e.a)
        if (v != k) ex.a[v] = -ak * a;
      std::vector<Con> rest;
      for (std::size_t i = 0; i < cs.size(); ++i)
        if (i != idx) rest.push_back(substitute(cs[i], k, ex));
      Model m = model;
      if (!solve(std::move(rest), m)) return false;
      Int val = ex.c;
      for (const auto& [v, a] : ex.a) val += a * value_of(m, v);
      m[k] = val;
      model = std::move(m);
      return true;
    }
    // No unit coefficient: introduce sigma with the symmetric modulus.
    int kmin = -1;
    for (const auto& [v, a] : e.a)
      if (kmin < 0 || abs_int(a) < abs_int(e.a.at(kmin))) kmin = v;
    Int ak = e.a.at(kmin);
    Int m = abs_int(ak) + 1;
    Int sign = ak > 0 ? 1 : -1;
    int sigma = next_var_++;
    Expr ex;
    ex.c = sign * mod_hat(e.c, m);
    for (const auto& [v, a] : e.a)
      if (v != kmin) {
        Int h = mod_hat(a, m);
        if (h != 0) ex.a[v] = sign * h;
      }
    ex.a[sigma] = -sign * m;
    std::vector<Con> next;
    for (const auto& c : cs) next.push_back(substitute(c, kmin, ex));
    Model mm = model;
    if (!solve(std::move(next), mm)) return false;
    Int val = ex.c;
    for (const auto& [v, a] : ex.a) val += a * value_of(mm, v);
    mm[kmin] = val;
    model = std::move(mm);
    return true;
  }

  // Range for x implied by the bounds given the model for the other vars.
  static std::pair<std::optional<Int>, std::optional<Int>> bounds(const std::vector<Con>& cs, int x,
                                                                  const Model& m) {
    std::optional<Int> lo, hi;
    for (const auto& k : cs) {
      auto it = k.a.find(x);
      if (it == k.a.end()) continue;
      Int a = it->second;
      Int rest = eval_rest(k, m, x);
      if (a > 0) {
        Int b = ceil_div(-rest, a);
        if (!lo || b > *lo) lo = b;
      } else {
        Int b = floor_div(rest, -a);
        if (!hi || b < *hi) hi = b;
      }
    }
    return {lo, hi};
  }

  bool eliminate(const std::vector<Con>& cs, Model& model) {
    std::map<int, std::pair<int, int>> counts;  // var -> (#lower, #upper)
    std::map<int, std::pair<bool, bool>> unit;  // all lower unit, all upper unit
    for (const auto& k : cs)
      for (const auto& [v, a] : k.a) {
        auto& c = counts[v];
        auto& u = unit.try_emplace(v, true, true).first->second;
        if (a > 0) {
          ++c.first;
          if (a != 1) u.first = false;
        } else {
          ++c.second;
          if (a != -1) u.second = false;
        }
      }
    // Unbounded direction: drop every constraint on that variable.
    for (const auto& [v, c] : counts) {
      if (c.first && c.second) continue;
      std::vector<Con> rest;
      for (const auto& k : cs)
        if (!k.a.count(v)) rest.push_back(k);
      Model m = model;
      if (!solve(std::move(rest), m)) return false;
      auto [lo, hi] = bounds(cs, v, m);
      m[v] = lo ? *lo : (hi ? *hi : Int(0));
      model = std::move(m);
      return true;
    }
    int best = -1;
    bool best_exact = false;
    long best_cost = 0;
    for (const auto& [v, c] : counts) {
      bool exact = unit[v].first || unit[v].second;
      long cost = static_cast<long>(c.first) * c.second;
      if (best < 0 || (exact && !best_exact) || (exact == best_exact && cost < best_cost)) {
        best = v;
        best_exact = exact;
        best_cost = cost;
      }
    }
    int x = best;
    std::vector<Con> rest, lower, upper;
    for (const auto& k : cs) {
      auto it = k.a.find(x);
      if (it == k.a.end())
        rest.push_back(k);
      else if (it->second > 0)
        lower.push_back(k);
      else
        upper.push_back(k);
    }
    auto combine = [&](bool dark) {
      std::vector<Con> out = rest;
      for (const auto& l : lower)
        for (const auto& u : upper) {
          Int a = l.a.at(x), b = -u.a.at(x);
          Con r;
          r.c = b * l.c + a * u.c;
          for (const auto& [v, c] : l.a)
            if (v != x) r.a[v] += b * c;
          for (const auto& [v, c] : u.a)
            if (v != x) r.a[v] += a * c;
          for (auto it = r.a.begin(); it != r.a.end();)
            it = it->second == 0 ? r.a.erase(it) : std::next(it);
          if (dark) r.c -= (a - 1) * (b - 1);
          out.push_back(std::move(r));
        }
      return out;
    };
    auto pick = [&](Model& m) {
      auto [lo, hi] = bounds(cs, x, m);
      m[x] = lo ? *lo : (hi ? *hi : Int(0));
    };
    if (best_exact) {
      Model m = model;
      if (!solve(combine(false), m)) return false;
      pick(m);
      model = std::move(m);
      return true;
    }
    {
      Model m = model;
      if (solve(combine(true), m)) {
        pick(m);
        model = std::move(m);
        return true;
      }
    }
    {
      Model m = model;
      if (!solve(combine(false), m)) return false;
    }
    Int bmax = 0;
    for (const auto& u : upper) bmax = std::max(bmax, Int(-u.a.at(x)));
    for (const auto& l : lower) {
      Int a = l.a.at(x);
      Int jmax = floor_div(a * bmax - a - bmax, bmax);
      for (Int j = 0; j <= jmax; ++j) {
        std::vector<Con> next = cs;
        Con e = l;
        e.eq = true;
        e.c -= j;
        next.push_back(std::move(e));
        Model m = model;
        if (solve(std::move(next), m)) {
          model = std::move(m);
          return true;
        }
      }
    }
    return false;
  }
};

}  // namespace

Feasibility omega_feasible(const std::vector<LinearConstraint>& in, std::map<std::string, Int>* model) {
  std::map<std::string, int> ids;
  std::vector<std::string> names;
  std::vector<Con> cs;
  for (const auto& lc : in) {
    Con k;
    k.c = lc.c;
    k.eq = lc.eq;
    for (const auto& [n, a] : lc.coef) {
      if (a == 0) continue;
      auto [it, fresh] = ids.emplace(n, static_cast<int>(names.size()));
      if (fresh) names.push_back(n);
      k.a[it->second] += a;
      if (k.a[it->second] == 0) k.a.erase(it->second);
    }
    cs.push_back(std::move(k));
  }
  Omega om(static_cast<int>(names.size()));
  Model m;
  try {
    if (!om.solve(cs, m)) return Feasibility::Unsat;
  } catch (const OutOfBudget&) {
    return Feasibility::Unknown;
  }
  if (model) {
    model->clear();
    for (std::size_t i = 0; i < names.size(); ++i) (*model)[names[i]] = value_of(m, static_cast<int>(i));
  }
  return Feasibility::Sat;
}

}  // namespace lcstrs

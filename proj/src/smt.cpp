// Bridge to an external SMT-LIB 2 solver process.
#include "lcstrs/solver.hpp"

#include <unistd.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

namespace lcstrs {

namespace {

std::string smt_term(const Term& t) {
  if (t->kind == TermKind::Var) return "|" + t->name + "|";
  if (is_int_lit(t)) {
    Int v = int_value(t);
    return v < 0 ? "(- " + int_str(-v) + ")" : int_str(v);
  }
  if (is_bool_lit(t)) return t->name;
  Term h = head(t);
  auto as = args(t);
  static const std::map<std::string, std::string> ops = {
      {"+", "+"},  {"-", "-"},   {"*", "*"},  {"=", "="},   {"!=", "distinct"}, {"<", "<"},
      {"<=", "<="}, {">", ">"}, {">=", ">="}, {"/\\", "and"}, {"\\/", "or"},     {"not", "not"}};
  auto it = ops.find(h->name);
  if (h->kind != TermKind::Sym || !h->theory || it == ops.end())
    throw TheoryError("cannot serialize " + to_string(t));
  std::string out = "(" + it->second;
  for (const auto& a : as) out += " " + smt_term(a);
  return out + ")";
}

// Minimal s-expression reader for (model (define-fun x () Int v) ...).
struct SExp {
  std::string atom;
  std::vector<SExp> list;
  bool is_list = false;
};

bool read_sexp(const std::string& s, std::size_t& i, SExp& out) {
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  if (i >= s.size()) return false;
  if (s[i] == '(') {
    ++i;
    out.is_list = true;
    for (;;) {
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i >= s.size()) return false;
      if (s[i] == ')') {
        ++i;
        return true;
      }
      SExp e;
      if (!read_sexp(s, i, e)) return false;
      out.list.push_back(std::move(e));
    }
  }
  if (s[i] == ')') return false;
  if (s[i] == '|') {
    std::size_t j = s.find('|', i + 1);
    if (j == std::string::npos) return false;
    out.atom = s.substr(i + 1, j - i - 1);
    i = j + 1;
    return true;
  }
  std::size_t j = i;
  while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != '(' && s[j] != ')') ++j;
  out.atom = s.substr(i, j - i);
  i = j;
  return true;
}

std::optional<Value> decode_value(const SExp& e) {
  if (!e.is_list) {
    if (e.atom == "true") return Value::of_bool(true);
    if (e.atom == "false") return Value::of_bool(false);
    try {
      return Value::of_int(Int(e.atom));
    } catch (...) {
      return std::nullopt;
    }
  }
  if (e.list.size() == 2 && !e.list[0].is_list && e.list[0].atom == "-") {
    auto v = decode_value(e.list[1]);
    if (v && !v->is_bool) return Value::of_int(-v->i);
  }
  return std::nullopt;
}

std::mutex& binary_mutex(const std::string& path) {
  static std::mutex table_mu;
  static std::map<std::string, std::unique_ptr<std::mutex>> table;
  std::lock_guard<std::mutex> lk(table_mu);
  auto& slot = table[path];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string shell_quote(const std::string& s) {
  std::string r = "'";
  for (char c : s) {
    if (c == '\'')
      r += "'\\''";
    else
      r += c;
  }
  return r + "'";
}

}  // namespace

std::string smtlib_query(const Term& phi) {
  std::ostringstream out;
  out << "(set-logic QF_NIA)\n";
  for (const auto& v : vars_of(phi))
    out << "(declare-const |" << v->name << "| " << (v->type->sort == "Bool" ? "Bool" : "Int") << ")\n";
  out << "(assert (not " << smt_term(phi) << "))\n";
  out << "(check-sat)\n(get-model)\n";
  return out.str();
}

SolverResult smt_roundtrip(const Term& phi, const std::string& solver_path) {
  SolverResult res;
  res.via = "smt";
  std::string path = solver_path.empty() ? smt_solver() : solver_path;
  if (path.empty()) return res;
  std::string script;
  try {
    script = smtlib_query(phi);
  } catch (const TheoryError&) {
    return res;
  }
  std::lock_guard<std::mutex> lk(binary_mutex(path));
  char tmpl[] = "/tmp/lcstrs-smt-XXXXXX";
  int fd = mkstemp(tmpl);
  if (fd < 0) return res;
  {
    std::string data = script;
    ssize_t off = 0;
    while (off < static_cast<ssize_t>(data.size())) {
      ssize_t n = write(fd, data.data() + off, data.size() - off);
      if (n <= 0) break;
      off += n;
    }
    close(fd);
  }
  std::string cmd = "timeout 20 " + shell_quote(path) + " " + shell_quote(tmpl) + " 2>/dev/null";
  std::string output;
  if (FILE* p = popen(cmd.c_str(), "r")) {
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) output.append(buf.data(), n);
    pclose(p);
  }
  unlink(tmpl);

  std::size_t i = 0;
  SExp first;
  if (!read_sexp(output, i, first) || first.is_list) return res;
  if (first.atom == "unsat") {
    res.verdict = Verdict::Yes;
    return res;
  }
  if (first.atom != "sat") return res;
  std::map<std::string, Value> model;
  SExp m;
  if (read_sexp(output, i, m) && m.is_list) {
    for (const auto& d : m.list) {
      if (!d.is_list || d.list.size() != 5 || d.list[0].atom != "define-fun") continue;
      if (auto v = decode_value(d.list[4])) model[d.list[1].atom] = *v;
    }
  }
  // Only report a counterexample that checks out.
  for (const auto& v : vars_of(phi))
    if (!model.count(v->name))
      model[v->name] = v->type->sort == "Bool" ? Value::of_bool(false) : Value::of_int(0);
  try {
    if (eval_under(phi, model).b) return res;
  } catch (const TheoryError&) {
    return res;
  }
  res.verdict = Verdict::No;
  res.model = std::move(model);
  return res;
}

}  // namespace lcstrs

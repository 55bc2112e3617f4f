#include "lcstrs/service.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace lcstrs {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string now_utc() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

HttpResponse error(int status, const std::string& code, const std::string& msg) {
  return {status, {{"error", {{"code", code}, {"message", msg}}}}};
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/'))
    if (!part.empty()) out.push_back(part);
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& p, const std::string& text) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

json context_json(const EquationContext& c) {
  std::string display = to_string(c.bound_left) + " |- " + equation_str(c.eq) + " -| " + to_string(c.bound_right);
  return {{"id", c.id},
          {"left_bound", to_string(c.bound_left)},
          {"lhs", to_string(c.eq.lhs)},
          {"rhs", to_string(c.eq.rhs)},
          {"constraint", to_string(c.eq.constraint)},
          {"right_bound", to_string(c.bound_right)},
          {"display", display}};
}

std::vector<TemplateMatch> find_templates(const Program& p) {
  std::vector<TemplateMatch> out;
  for (const auto& s : p.symbols) {
    if (s.role != SymbolRole::User || !p.is_defined(s.name)) continue;
    for (auto& m : match_template(p, s.name)) out.push_back(std::move(m));
  }
  return out;
}

bool templatable(const Program& p, const Term& t) {
  Term h = head(t);
  if (!is_sym(h) || h->theory) return false;
  const SymbolInfo* s = p.find_symbol(h->name);
  if (!s) return false;
  return s->role == SymbolRole::Recursor || !match_template(p, h->name).empty();
}

long body_version(const json& req) { return req.is_object() && req.contains("version") ? req["version"].get<long>() : -1; }

}  // namespace

std::vector<Equation> goal_queue(const Program& p) {
  std::vector<Equation> q = p.lemmas;
  q.insert(q.end(), p.goals.begin(), p.goals.end());
  return q;
}

json template_json(const TemplateMatch& m, const Program& p) {
  json j = {{"symbol", m.symbol},
            {"kind", template_kind_str(m.kind)},
            {"recursor", template_recursor(m.kind)},
            {"context_function", to_string(m.F)},
            {"bound", to_string(m.bound)},
            {"function", to_string(m.fn)},
            {"synthesized", m.synth ? json(m.synth->name) : json(nullptr)}};
  if (m.base) j["base"] = to_string(m.base);
  try {
    j["lemma"] = emit_template_recursor_lemma(m, p).equation;
  } catch (const std::exception& e) {
    j["lemma"] = nullptr;
  }
  return j;
}

json state_json(const Session& s) {
  const Kernel& k = *s.kernel;
  json j;
  j["id"] = s.id;
  j["version"] = s.version;
  j["created"] = s.created;
  j["updated"] = s.updated;
  j["goal_index"] = s.goal_index;
  j["goal"] = equation_str(k.goal());
  j["verdict"] = proof_verdict_str(k.verdict());
  j["contexts"] = json::array();
  for (const auto& c : k.state().E) j["contexts"].push_back(context_json(c));
  j["hypotheses"] = json::array();
  for (const auto& h : k.state().H) j["hypotheses"].push_back({{"id", h.id}, {"equation", equation_str(h.eq)}});
  j["axioms"] = json::array();
  for (const auto& a : k.state().A)
    j["axioms"].push_back({{"id", a.id},
                           {"equation", equation_str(a.eq)},
                           {"justification", a.justification},
                           {"open", a.justification.empty()}});
  json obl = json::array();
  for (const auto& [i, r] : k.state().requirements)
    obl.push_back({{"step", i},
                   {"requirement", requirement_str(r)},
                   {"status", k.ordering().satisfied(r) ? "satisfied" : "unknown"}});
  j["obligations"] = obl;
  j["bound_violations"] = k.bound_violations();
  j["trace_length"] = k.trace().size();
  return j;
}

json suggestions_json(const Session& s) {
  const Kernel& k = *s.kernel;
  json j;
  j["version"] = s.version;
  j["steps"] = json::array();
  j["tactics"] = json::array();
  for (const auto& c : k.state().E) {
    int shown = 0;
    for (const auto& st : enumerate_steps(k, c.id)) {
      if (++shown > 40) break;
      j["steps"].push_back(st.to_json());
    }
    Kernel scratch = k;
    try {
      expose_heads(scratch, c.id);
    } catch (const std::exception&) {
    }
    const EquationContext* e = scratch.find(c.id);
    bool l = templatable(scratch.program(), e->eq.lhs), r = templatable(scratch.program(), e->eq.rhs);
    if (l && r) j["tactics"].push_back({{"tactic", "two-sided"}, {"target", c.id}});
    if (l) j["tactics"].push_back({{"tactic", "one-sided"}, {"target", c.id}, {"side", "left"}});
    if (r) j["tactics"].push_back({{"tactic", "one-sided"}, {"target", c.id}, {"side", "right"}});
    j["tactics"].push_back({{"tactic", "search"}, {"target", c.id}});
  }
  if (k.trace().empty() && !k.state().E.empty()) j["tactics"].push_back({{"tactic", "auto"}});
  j["templates"] = json::array();
  for (const auto& m : s.templates) j["templates"].push_back(template_json(m, k.program()));
  return j;
}

// --- store ------------------------------------------------------------------

SessionStore::SessionStore(std::string trace_dir) : dir_(std::move(trace_dir)) {
  if (!dir_.empty()) fs::create_directories(dir_);
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(mu_);
  return sessions_.size();
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::string SessionStore::fresh_id() {
  static std::mt19937_64 rng{std::random_device{}()};
  static std::mutex rng_mu;
  std::lock_guard lock(rng_mu);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
  return buf;
}

void SessionStore::persist(const Session& s) const {
  if (dir_.empty()) return;
  fs::path base = fs::path(dir_) / s.id;
  write_atomic(base.string() + ".lcstrs", s.program_text);
  write_atomic(base.string() + ".trace.json", s.kernel->trace_json(s.program_text).dump(2) + "\n");
  json meta = {{"id", s.id}, {"goal_index", s.goal_index}, {"created", s.created}, {"updated", s.updated},
               {"version", s.version}};
  write_atomic(base.string() + ".session.json", meta.dump(2) + "\n");
}

void SessionStore::unpersist(const std::string& id) const {
  if (dir_.empty()) return;
  for (const char* ext : {".lcstrs", ".trace.json", ".session.json"}) fs::remove(fs::path(dir_) / (id + ext));
}

void SessionStore::load(const std::string& id) {
  fs::path base = fs::path(dir_) / id;
  std::string program = read_file(base.string() + ".lcstrs");
  json trace;
  try {
    trace = json::parse(read_file(base.string() + ".trace.json"));
  } catch (const json::exception& e) {
    throw StepRejected(reason::kReplay, id + ": trace is not valid JSON: " + e.what());
  }
  json meta = json::object();
  if (fs::exists(base.string() + ".session.json")) meta = json::parse(read_file(base.string() + ".session.json"));
  ReplayResult rr;
  try {
    rr = replay_trace(trace, program);
  } catch (const StepRejected& e) {
    throw StepRejected(reason::kReplay, id + ": " + e.what());
  }
  auto s = std::make_shared<Session>();
  s->id = id;
  s->program_text = program;
  s->goal_index = meta.value("goal_index", 0);
  s->created = meta.value("created", now_utc());
  s->updated = meta.value("updated", s->created);
  s->version = meta.value("version", 0L);
  s->templates = find_templates(rr.kernel->program());
  s->kernel = std::move(rr.kernel);
  std::unique_lock lock(mu_);
  sessions_[id] = std::move(s);
}

std::vector<std::string> SessionStore::load_all() {
  std::vector<std::string> failures;
  if (dir_.empty()) return failures;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    std::string name = entry.path().filename().string();
    const std::string suffix = ".trace.json";
    if (name.size() <= suffix.size() || name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
      continue;
    try {
      load(name.substr(0, name.size() - suffix.size()));
    } catch (const std::exception& e) {
      failures.push_back(e.what());
    }
  }
  return failures;
}

HttpResponse SessionStore::create(const json& req) {
  if (!req.is_object() || !req.contains("program") || !req["program"].is_string())
    return error(400, reason::kBadRequest, "body needs a \"program\" string");
  auto s = std::make_shared<Session>();
  s->program_text = req["program"].get<std::string>();
  Program p;
  try {
    p = parse_program(s->program_text);
  } catch (const std::exception& e) {
    return error(422, reason::kParse, e.what());
  }
  Equation goal;
  try {
    if (req.contains("equation")) {
      std::map<std::string, Type> vars;
      goal = parse_equation(req["equation"].get<std::string>(), p, vars);
      s->goal_index = goal_queue(p).size();
    } else {
      auto q = goal_queue(p);
      s->goal_index = req.value("goal", 0);
      if (s->goal_index >= q.size()) return error(422, reason::kBadRequest, "the program has no goal " + std::to_string(s->goal_index));
      goal = q[s->goal_index];
    }
  } catch (const json::exception& e) {
    return error(400, reason::kBadRequest, e.what());
  } catch (const std::exception& e) {
    return error(422, reason::kParse, e.what());
  }
  s->templates = find_templates(p);
  s->kernel = std::make_unique<Kernel>(std::move(p), goal);
  s->id = fresh_id();
  s->created = s->updated = now_utc();
  persist(*s);
  json out = state_json(*s);
  {
    std::unique_lock lock(mu_);
    sessions_[s->id] = s;
  }
  return {201, out};
}

HttpResponse SessionStore::import_trace(const json& req) {
  if (!req.is_object() || !req.contains("program") || !req.contains("trace"))
    return error(400, reason::kBadRequest, "body needs \"program\" and \"trace\"");
  ReplayResult rr;
  try {
    rr = replay_trace(req["trace"], req["program"].get<std::string>());
  } catch (const StepRejected& e) {
    return error(422, reason::kReplay, e.what());
  } catch (const std::exception& e) {
    return error(422, reason::kReplay, e.what());
  }
  auto s = std::make_shared<Session>();
  s->program_text = req["program"].get<std::string>();
  s->templates = find_templates(rr.kernel->program());
  s->kernel = std::move(rr.kernel);
  s->id = fresh_id();
  s->created = s->updated = now_utc();
  persist(*s);
  json out = state_json(*s);
  {
    std::unique_lock lock(mu_);
    sessions_[s->id] = s;
  }
  return {201, out};
}

HttpResponse SessionStore::apply_step(Session& s, const json& req) {
  if (!req.is_object() || !req.contains("step")) return error(400, reason::kBadRequest, "body needs a \"step\" object");
  ProofStep st;
  try {
    st = ProofStep::from_json(req["step"]);
  } catch (const StepRejected& e) {
    return error(422, e.code, e.what());
  }
  try {
    s.kernel->apply(st);
  } catch (const StepRejected& e) {
    return error(422, e.code, e.what());
  } catch (const std::exception& e) {
    return error(422, reason::kBadStep, e.what());
  }
  return {200, {}};
}

HttpResponse SessionStore::apply_tactic(Session& s, const json& req) {
  std::string tactic = req.value("tactic", "");
  int target = req.value("target", s.kernel->state().E.empty() ? -1 : s.kernel->state().E.front().id);
  if (tactic != "auto" && !s.kernel->find(target))
    return error(422, reason::kUnknownTarget, "no open context " + std::to_string(target));
  if (tactic == "two-sided" || tactic == "one-sided") {
    TacticResult r = tactic == "two-sided" ? tactic_two_sided(*s.kernel, target, req.value("prove_bridges", false))
                                           : tactic_one_sided(*s.kernel, target, req.value("side", "left"));
    if (!r.ok) {
      HttpResponse e = error(422, reason::kTactic, r.message);
      if (!r.bridges.empty()) e.body["error"]["bridges"] = r.bridges;
      return e;
    }
    return {200, {{"message", r.message}, {"steps_before", r.steps_before}}};
  }
  if (tactic == "search") {
    long budget = req.value("budget", 2000L);
    Kernel k = *s.kernel;
    // The search works on one context: the others are left as they are.
    if (!generic_search(k, req.value("depth", 7), budget)) return error(422, reason::kTactic, "search exhausted its budget");
    std::size_t before = s.kernel->trace().size();
    *s.kernel = std::move(k);
    return {200, {{"message", "closed by search"}, {"steps_before", before}}};
  }
  if (tactic == "auto") {
    if (!s.kernel->trace().empty()) return error(422, reason::kTactic, "auto needs a session without steps");
    AutoOptions opt;
    opt.budget = req.value("budget", opt.budget);
    AutoResult r = auto_prove(s.kernel->program(), s.kernel->goal(), opt);
    if (r.verdict == ProofVerdict::Open) {
      HttpResponse e = error(422, reason::kTactic, "no strategy closed the goal");
      e.body["error"]["log"] = r.log;
      return e;
    }
    s.kernel = std::move(r.kernel);
    return {200, {{"message", "proved by " + r.strategy}, {"log", r.log}, {"steps_before", 0}}};
  }
  return error(400, reason::kBadRequest, "unknown tactic '" + tactic + "'");
}

HttpResponse SessionStore::undo(Session& s, const json& req) {
  std::size_t n = s.kernel->trace().size();
  std::size_t to = n == 0 ? 0 : n - 1;
  if (req.is_object() && req.contains("to")) to = req["to"].get<std::size_t>();
  if (req.is_object() && req.contains("steps")) to = n - std::min(n, req["steps"].get<std::size_t>());
  if (to > n) return error(422, reason::kBadRequest, "cannot undo forward");
  s.kernel->undo_to(to);
  return {200, {}};
}

HttpResponse SessionStore::handle(const std::string& method, const std::string& path, const std::string& body) {
  auto parts = split_path(path);
  if (parts.empty() || parts[0] != "v1") return error(404, reason::kNotFound, "no such endpoint " + path);
  json req = json::object();
  if (!body.empty()) {
    try {
      req = json::parse(body);
    } catch (const json::exception& e) {
      return error(400, reason::kBadRequest, std::string("body is not JSON: ") + e.what());
    }
  }
  try {
    if (parts.size() == 2 && parts[1] == "health" && method == "GET") return {200, {{"ok", true}}};
    if (parts.size() < 2 || parts[1] != "sessions") return error(404, reason::kNotFound, "no such endpoint " + path);
    if (parts.size() == 2) {
      if (method == "POST") return create(req);
      if (method == "GET") {
        json list = json::array();
        std::shared_lock lock(mu_);
        for (const auto& [id, s] : sessions_) {
          std::lock_guard sl(s->mu);
          list.push_back({{"id", id},
                          {"goal", equation_str(s->kernel->goal())},
                          {"verdict", proof_verdict_str(s->kernel->verdict())},
                          {"version", s->version},
                          {"updated", s->updated}});
        }
        return {200, {{"sessions", list}}};
      }
      return error(405, reason::kBadRequest, "method not allowed");
    }
    if (parts.size() == 3 && parts[2] == "import" && method == "POST") return import_trace(req);

    auto s = find(parts[2]);
    if (!s) return error(404, reason::kUnknownSession, "unknown session " + parts[2]);
    std::string sub = parts.size() > 3 ? parts[3] : "";
    if (parts.size() > 4) return error(404, reason::kNotFound, "no such endpoint " + path);

    if (method == "GET") {
      std::lock_guard lock(s->mu);
      if (sub.empty()) return {200, state_json(*s)};
      if (sub == "suggestions") return {200, suggestions_json(*s)};
      if (sub == "trace") return {200, s->kernel->trace_json(s->program_text)};
      return error(404, reason::kNotFound, "no such endpoint " + path);
    }
    if (method == "DELETE" && sub.empty()) {
      {
        std::unique_lock lock(mu_);
        sessions_.erase(s->id);
      }
      unpersist(s->id);
      return {200, {{"deleted", s->id}}};
    }
    if (method == "POST" && (sub == "steps" || sub == "tactics" || sub == "undo")) {
      std::unique_lock lock(s->mu, std::try_to_lock);
      if (!lock.owns_lock()) return error(409, reason::kConflict, "another request is modifying the session");
      long v = body_version(req);
      if (v >= 0 && v != s->version)
        return error(409, reason::kConflict,
                     "session is at version " + std::to_string(s->version) + ", request expected " + std::to_string(v));
      HttpResponse r = sub == "steps" ? apply_step(*s, req) : sub == "tactics" ? apply_tactic(*s, req) : undo(*s, req);
      if (r.status != 200) return r;
      ++s->version;
      s->updated = now_utc();
      persist(*s);
      json out = state_json(*s);
      for (const auto& [key, val] : r.body.items()) out[key] = val;
      return {200, out};
    }
    return error(405, reason::kBadRequest, "method not allowed");
  } catch (const json::exception& e) {
    return error(400, reason::kBadRequest, e.what());
  } catch (const StepRejected& e) {
    return error(422, e.code, e.what());
  }
}

}  // namespace lcstrs

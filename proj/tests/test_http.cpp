#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "lcstrs/service.hpp"

#include "httplib.h"

#include <fstream>
#include <future>
#include <sstream>
#include <thread>

using namespace lcstrs;
using nlohmann::json;

namespace {

std::string fac_text() {
  std::ifstream in(std::string(LCSTRS_SOURCE_DIR) + "/corpus/factorial.lcstrs");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs a server on a free port and hands the port to `body`.
void with_server(const std::function<void(int)>& body) {
  SessionStore store;
  std::promise<std::pair<int, std::function<void()>>> ready;
  std::thread t([&store, &ready] {
    bool bound = false;
    serve_http(store, "127.0.0.1", 0, [&](int port, std::function<void()> stop) {
      bound = true;
      ready.set_value({port, std::move(stop)});
    });
    if (!bound) ready.set_value({0, [] {}});
  });
  auto [port, stop] = ready.get_future().get();
  try {
    if (port > 0) body(port);
  } catch (...) {
    stop();
    t.join();
    throw;
  }
  stop();
  t.join();
  REQUIRE(port > 0);
}

}  // namespace

TEST_CASE("the /v1 API over a real socket") {
  with_server([](int port) {
    httplib::Client cli("127.0.0.1", port);
    auto health = cli.Get("/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(health->get_header_value("Content-Type") == "application/json");

    json req = {{"program", fac_text()}, {"goal", 0}};
    auto created = cli.Post("/v1/sessions", req.dump(), "application/json");
    REQUIRE(created);
    REQUIRE(created->status == 201);
    json state = json::parse(created->body);
    std::string id = state["id"];
    CHECK(state["verdict"] == "open");

    auto bad = cli.Post("/v1/sessions/" + id + "/steps", "{not json", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    CHECK(json::parse(bad->body)["error"]["code"] == "bad-request");

    json tactic = {{"tactic", "two-sided"}, {"prove_bridges", true}, {"version", state["version"]}};
    auto done = cli.Post("/v1/sessions/" + id + "/tactics", tactic.dump(), "application/json");
    REQUIRE(done);
    CHECK(done->status == 200);
    CHECK(json::parse(done->body)["verdict"] == "proved");

    auto stale = cli.Post("/v1/sessions/" + id + "/undo", tactic.dump(), "application/json");
    REQUIRE(stale);
    CHECK(stale->status == 409);

    auto trace = cli.Get("/v1/sessions/" + id + "/trace");
    REQUIRE(trace);
    CHECK(json::parse(trace->body)["steps"].size() > 0);

    auto gone = cli.Delete("/v1/sessions/" + id);
    REQUIRE(gone);
    CHECK(gone->status == 200);
    auto missing = cli.Get("/v1/sessions/" + id);
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["error"]["code"] == "unknown-session");
  });
}

#include <doctest.h>

#include <thread>

#include "fixtures.hpp"
#include "qrw/server.hpp"

// after the qrw headers: <resolv.h> defines a _res macro that breaks Eigen
#include <httplib.h>

using namespace qrw;

namespace {

struct Fixture {
  explicit Fixture(std::chrono::seconds idle = std::chrono::seconds(600))
      : server(std::make_shared<const Registry>(defaultRegistry()), {},
               {idle, ""}) {
    port = server.start();
    REQUIRE(port > 0);
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }

  std::pair<int, Json> post(const std::string& path, const Json& body) {
    auto r = client().Post(path, body.dump(), "application/json");
    REQUIRE(r);
    return {r->status, Json::parse(r->body)};
  }

  std::pair<int, Json> get(const std::string& path) {
    auto r = client().Get(path);
    REQUIRE(r);
    return {r->status, Json::parse(r->body)};
  }

  std::string open(const std::string& term) {
    auto [status, body] = post("/sessions", {{"term", term}});
    REQUIRE(status == 201);
    return body["sessionId"];
  }

  SessionServer server;
  int port = -1;
};

std::string row1() { return parseDerivation(fixture("table1.deriv")).initial; }

int indexOf(const Json& moves, const std::string& rule, const std::string& dir,
            const std::string& pos) {
  for (const Json& m : moves["moves"]) {
    if (m["ruleId"] == rule && m["direction"] == dir && m["position"] == pos) {
      return m["index"];
    }
  }
  return -1;
}

}  // namespace

TEST_CASE("creating a session") {
  Fixture f;
  auto [status, body] = f.post("/sessions", {{"term", row1()}});
  CHECK(status == 201);
  CHECK(body["sort"] == "vector[a]");
  CHECK(body["canonical"] == row1());
  CHECK(body["dirac"] == "|alpha⟩_a⟨alpha|_a (1/√2 (|beta⟩_a + (-1 |gamma⟩_a)))");
  CHECK(body["diracSpans"].size() == positionsOf(parseTerm(row1())).size());
  CHECK(body["stepCount"] == 0);
}

TEST_CASE("bad terms are rejected with typed errors") {
  Fixture f;
  auto [s1, parse] = f.post("/sessions", {{"term", "plusV(V:x@a"}});
  CHECK(s1 == 400);
  CHECK(parse["error"]["kind"] == "ParseError");
  CHECK(parse["error"].contains("span"));
  auto [s2, sort] = f.post("/sessions", {{"term", "ip(V:x@a, V:y@b)"}});
  CHECK(s2 == 400);
  CHECK(sort["error"]["kind"] == "SortError");
  CHECK(sort["error"]["span"]["end"] == 16);
  auto [s3, missing] = f.post("/sessions", Json::object());
  CHECK(s3 == 400);
  auto raw = f.client().Post("/sessions", "{not json", "application/json");
  REQUIRE(raw);
  CHECK(raw->status == 400);
}

TEST_CASE("moves, apply and undo follow table 1") {
  Fixture f;
  const std::string id = f.open(row1());
  auto [st, moves] = f.get("/sessions/" + id + "/moves");
  CHECK(st == 200);
  const int first = indexOf(moves, "multiplyRightApply", "fwd", "eps");
  REQUIRE(first >= 0);

  const DerivationDocument doc = parseDerivation(fixture("table1.deriv"));
  const Term row2 = replay(parseTerm(doc.initial), {doc.steps[0]}, defaultRegistry());
  CHECK(moves["moves"][first]["preview"] == renderDirac(row2));

  auto [s2, applied] = f.post("/sessions/" + id + "/apply",
                              {{"index", first}, {"version", moves["version"]}});
  CHECK(s2 == 200);
  CHECK(applied["dirac"] == renderDirac(row2));
  CHECK(applied["stepCount"] == 1);

  // the old list is stale now
  auto [s3, stale] = f.post("/sessions/" + id + "/apply",
                            {{"index", first}, {"version", moves["version"]}});
  CHECK(s3 == 409);
  CHECK(stale["error"]["kind"] == "StaleMoves");

  auto [s4, undone] = f.post("/sessions/" + id + "/undo", Json::object());
  CHECK(s4 == 200);
  CHECK(undone["canonical"] == row1());
  auto [s5, nothing] = f.post("/sessions/" + id + "/undo", Json::object());
  CHECK(s5 == 409);
}

TEST_CASE("out-of-range indices, unknown sessions and non-matching steps") {
  Fixture f;
  const std::string id = f.open(row1());
  auto [st, moves] = f.get("/sessions/" + id + "/moves");
  auto [s1, e1] = f.post("/sessions/" + id + "/apply",
                         {{"index", 10000}, {"version", moves["version"]}});
  CHECK(s1 == 409);
  auto [s2, e2] = f.get("/sessions/nope/moves");
  CHECK(s2 == 404);
  CHECK(e2["error"]["kind"] == "UnknownSession");
  auto [s3, e3] = f.post("/sessions/" + id + "/apply",
                         {{"ruleId", "commuteV"}, {"direction", "fwd"}, {"position", "eps"}});
  CHECK(s3 == 422);
  CHECK(e3["error"]["kind"] == "NoMatch");
  auto [s4, e4] = f.post("/sessions/" + id + "/apply",
                         {{"ruleId", "multiplyRightApply"}, {"direction", "fwd"},
                          {"position", "eps"}});
  CHECK(s4 == 200);
}

TEST_CASE("every listed move applies") {
  Fixture f;
  const std::string id = f.open(row1());
  auto [st, moves] = f.get("/sessions/" + id + "/moves");
  std::uint64_t version = moves["version"];
  for (std::size_t i = 0; i < moves["moves"].size(); ++i) {
    auto [s, body] = f.post("/sessions/" + id + "/apply",
                            {{"index", i}, {"version", version}});
    CHECK(s == 200);
    auto [u, undone] = f.post("/sessions/" + id + "/undo", Json::object());
    CHECK(u == 200);
    version = undone["version"];
  }
  const std::string bare = f.open("V:x@a");
  CHECK(f.get("/sessions/" + bare + "/moves").second["moves"].empty());
}

TEST_CASE("normalize and derivation export") {
  Fixture f;
  const std::string id = f.open(fixture("teleport.term"));
  auto [s1, n1] = f.post("/sessions/" + id + "/normalize", Json::object());
  CHECK(s1 == 200);
  const auto expected = normalize(parseTerm(fixture("teleport.term")), defaultRegistry());
  CHECK(n1["canonical"] == renderCanonical(expected.term));
  CHECK(n1["added"] == expected.derivation.steps.size());
  auto [s2, n2] = f.post("/sessions/" + id + "/normalize", Json::object());
  CHECK(n2["added"] == 0);

  auto [s3, d] = f.get("/sessions/" + id + "/derivation");
  CHECK(s3 == 200);
  const DerivationDocument doc = parseDerivation(d["document"].get<std::string>());
  CHECK(replay(parseTerm(doc.initial), doc.steps, defaultRegistry()) ==
        parseTerm(*doc.expect));
}

TEST_CASE("openapi document lists the routes") {
  Fixture f;
  auto [s, doc] = f.get("/openapi.json");
  CHECK(s == 200);
  CHECK(doc["paths"].contains("/sessions/{id}/moves"));
  CHECK(doc["paths"]["/sessions/{id}/apply"].contains("post"));
  CHECK(doc["paths"].size() == 8);
}

TEST_CASE("idle sessions expire") {
  Fixture f(std::chrono::seconds(1));
  const std::string id = f.open("V:x@a");
  CHECK(f.get("/sessions/" + id).first == 200);
  std::this_thread::sleep_for(std::chrono::milliseconds(2200));
  CHECK(f.get("/sessions/" + id).first == 404);
}

TEST_CASE("concurrent sessions stay isolated") {
  Fixture f;
  constexpr int kClients = 6;
  std::vector<std::thread> threads;
  std::vector<int> failures(kClients, 0);
  const std::string start = row1();
  for (int c = 0; c < kClients; ++c) {
    threads.emplace_back([&, c] {
      httplib::Client client("127.0.0.1", f.port);
      auto created = client.Post("/sessions", Json{{"term", start}}.dump(),
                                 "application/json");
      if (!created || created->status != 201) {
        ++failures[c];
        return;
      }
      const std::string id = Json::parse(created->body)["sessionId"];
      Session mirror(parseTerm(start),
                     std::make_shared<const Registry>(defaultRegistry()));
      std::mt19937 rng(c);
      for (int step = 0; step < 15; ++step) {
        auto listed = client.Get("/sessions/" + id + "/moves");
        const Json moves = Json::parse(listed->body);
        if (moves["moves"].empty()) break;
        const std::size_t k = rng() % moves["moves"].size();
        auto applied = client.Post(
            "/sessions/" + id + "/apply",
            Json{{"index", k}, {"version", moves["version"]}}.dump(),
            "application/json");
        mirror.apply(mirror.moves()[k]);
        if (!applied || applied->status != 200 ||
            Json::parse(applied->body)["canonical"] != renderCanonical(mirror.current())) {
          ++failures[c];
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int c = 0; c < kClients; ++c) CHECK(failures[c] == 0);
}

#include <doctest.h>
#include <httplib.h>

#include <thread>

#include "gate_support.hpp"
#include "sastbench/gate_http.hpp"

using namespace sastbench;
using namespace testsupport;
using json = nlohmann::json;

namespace {

struct Running {
  std::shared_ptr<Gate> gate;
  GateServer server;
  int port = 0;
  std::thread thread;

  explicit Running(GateConfig cfg) : gate(std::make_shared<Gate>(std::move(cfg))), server(gate) {
    port = server.bind("127.0.0.1", 0);
    thread = std::thread([this] { server.listen(); });
  }
  ~Running() {
    server.stop();
    thread.join();
    server.drain();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(10, 0);
    return c;
  }
};

// Polls until the submission leaves Scanning.
json wait_assessed(httplib::Client& c, const std::string& id) {
  for (int i = 0; i < 200; ++i) {
    auto res = c.Get("/submissions/" + id);
    auto j = json::parse(res->body);
    if (j.at("state") != "Scanning") return j;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  FAIL("assessment did not finish");
  return {};
}

}  // namespace

TEST_SUITE("gate-http") {

TEST_CASE("submit, assess, review and decide over HTTP") {
  TempDir dir;
  auto cfg = gate_config(dir / "store", default_mocks());
  cfg.moderator_token = "s3cret";
  Running srv(cfg);
  auto c = srv.client();

  auto health = c.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body).at("status") == "ok");

  httplib::MultipartFormDataItems items = {
      {"archive", read_text(fixture("gate/app.zip")), "app.zip", "application/zip"},
      {"submitter", "alice", "", ""}};
  auto created = c.Post("/submissions", items);
  REQUIRE(created);
  CHECK(created->status == 201);
  auto sub = json::parse(created->body);
  const std::string id = sub.at("id");
  CHECK(sub.at("state") == "Submitted");
  CHECK(sub.at("submitter") == "alice");
  CHECK(created->get_header_value("Location") == "/submissions/" + id);

  CHECK(c.Get("/submissions/" + id + "/report")->status == 409);

  auto started = c.Post("/submissions/" + id + "/assess");
  CHECK(started->status == 202);
  auto done = wait_assessed(c, id);
  CHECK(done.at("state") == "AwaitingReview");

  auto report = c.Get("/submissions/" + id + "/report");
  CHECK(report->status == 200);
  CHECK(report->body == srv.gate->get_report_json(id));
  auto rj = json::parse(report->body);
  CHECK(rj.at("findingCount") == 4);

  auto queue = c.Get("/submissions?state=AwaitingReview");
  auto qj = json::parse(queue->body);
  REQUIRE(qj.size() == 1);
  CHECK(qj[0].at("findingCount") == 4);
  CHECK(c.Get("/submissions?state=Bogus")->status == 400);

  const std::string body = R"({"moderator":"mod","verdict":"pass","rationale":"reviewed"})";
  CHECK(c.Post("/submissions/" + id + "/decision", body, "application/json")->status == 401);
  httplib::Headers auth = {{"X-Moderator-Token", "s3cret"}};
  auto decided = c.Post("/submissions/" + id + "/decision", auth, body, "application/json");
  CHECK(decided->status == 200);
  CHECK(json::parse(decided->body).at("state") == "Published");
  auto again = c.Post("/submissions/" + id + "/decision", auth, body, "application/json");
  CHECK(again->status == 409);
  CHECK(json::parse(again->body).at("error") == "already-decided");

  auto fetched = json::parse(c.Get("/submissions/" + id)->body);
  CHECK(fetched.at("decision").at("verdict") == "pass");
}

TEST_CASE("error mapping") {
  TempDir dir;
  auto cfg = gate_config(dir / "store", default_mocks());
  cfg.size_cap_bytes = 1000;
  Running srv(cfg);
  auto c = srv.client();

  CHECK(c.Get("/submissions/sub-missing")->status == 404);
  CHECK(c.Post("/submissions/sub-missing/assess")->status == 404);
  CHECK(c.Post("/submissions", "garbage", "application/octet-stream")->status == 400);
  CHECK(c.Post("/submissions", "", "application/octet-stream")->status == 400);
  CHECK(c.Post("/submissions", std::string(5000, 'x'), "application/octet-stream")->status == 413);

  httplib::Headers h = {{"X-Submitter", "bob"}};
  auto created = c.Post("/submissions", h, read_text(fixture("gate/app.tar.gz")), "application/gzip");
  REQUIRE(created->status == 201);
  const std::string id = json::parse(created->body).at("id");
  CHECK(json::parse(created->body).at("submitter") == "bob");

  auto premature = c.Post("/submissions/" + id + "/decision", R"({"moderator":"m","verdict":"pass","rationale":"r"})",
                          "application/json");
  CHECK(premature->status == 409);
  CHECK(json::parse(premature->body).at("error") == "invalid-transition");

  c.Post("/submissions/" + id + "/assess");
  wait_assessed(c, id);
  CHECK(c.Post("/submissions/" + id + "/assess")->status == 409);
  CHECK(c.Post("/submissions/" + id + "/decision", "{not json", "application/json")->status == 400);
  auto no_reason = c.Post("/submissions/" + id + "/decision", R"({"moderator":"m","verdict":"fail","rationale":""})",
                          "application/json");
  CHECK(no_reason->status == 400);
  CHECK(json::parse(no_reason->body).at("error") == "invalid-decision");

  auto opts = c.Options("/submissions");
  CHECK(opts->status == 204);
  CHECK(opts->has_header("Access-Control-Allow-Origin"));
}

TEST_CASE("binding a busy port fails") {
  TempDir dir;
  Running srv(gate_config(dir / "store", default_mocks()));
  GateServer second(srv.gate);
  CHECK_THROWS_AS(second.bind("127.0.0.1", srv.port), Error);
}

}  // TEST_SUITE

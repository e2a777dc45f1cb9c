#include "sastbench/gate_http.hpp"

#include <httplib.h>

#include <atomic>
#include <future>
#include <iostream>
#include <mutex>
#include <thread>

#include "sastbench/error.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

namespace sastbench {

namespace {

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_found: return 404;
    case ErrorKind::invalid_transition:
    case ErrorKind::already_decided:
    case ErrorKind::not_ready: return 409;
    case ErrorKind::rejected_input:
    case ErrorKind::invalid_decision: return 400;
    case ErrorKind::too_large: return 413;
    default: return 500;
  }
}

void send_json(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& msg) {
  ordered_json body;
  body["error"] = kind;
  body["message"] = msg;
  send_json(res, status, body);
}

ordered_json queue_entry_json(const QueueEntry& e) {
  auto j = e.submission.to_json();
  j["findingCount"] = e.finding_count;
  j["perClassCounts"] = e.per_class_counts;
  j["highestSeverity"] =
      e.highest_severity ? ordered_json(to_string(*e.highest_severity)) : ordered_json(nullptr);
  return j;
}

}  // namespace

struct GateServer::Impl {
  httplib::Server server;
  std::mutex jobs_mu;
  std::vector<std::future<void>> jobs;
  std::atomic<bool> listen_started{false};
  std::atomic<bool> stop_requested{false};
  std::atomic<bool> listen_done{false};
};

GateServer::GateServer(std::shared_ptr<Gate> gate)
    : gate_(std::move(gate)), impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;
  Gate& g = *gate_;
  const auto cap = g.config().size_cap_bytes;
  // Multipart framing adds a little; the gate enforces the exact cap.
  srv.set_payload_max_length(static_cast<std::size_t>(cap + (1u << 20)));
  // httplib's default adds SO_REUSEPORT, which lets a second gate bind the
  // same port silently.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });

  srv.set_post_routing_handler([](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Authorization, X-Moderator-Token");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      send_error(res, status_for(e.kind()), to_string(e.kind()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "rejected-input", std::string("malformed JSON: ") + e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  });
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, ordered_json{{"status", "ok"}});
  });

  srv.Post("/submissions", [&g, cap](const httplib::Request& req, httplib::Response& res) {
    std::string archive;
    std::string submitter;
    if (req.is_multipart_form_data()) {
      if (!req.has_file("archive")) {
        send_error(res, 400, "rejected-input", "multipart body needs an 'archive' field");
        return;
      }
      archive = req.get_file_value("archive").content;
      if (req.has_file("submitter")) submitter = req.get_file_value("submitter").content;
    } else {
      archive = req.body;
    }
    if (submitter.empty() && req.has_param("submitter")) submitter = req.get_param_value("submitter");
    if (submitter.empty()) submitter = req.get_header_value("X-Submitter");
    if (archive.size() > cap) {
      send_error(res, 413, "too-large", "archive exceeds the configured size cap");
      return;
    }
    auto sub = g.submit(archive, submitter);
    auto body = sub.to_json();
    res.set_header("Location", "/submissions/" + sub.id);
    send_json(res, 201, body);
  });

  srv.Get("/submissions", [&g](const httplib::Request& req, httplib::Response& res) {
    std::optional<SubmissionState> state;
    if (req.has_param("state")) {
      auto text = req.get_param_value("state");
      state = parse_submission_state(text);
      if (!state) {
        send_error(res, 400, "rejected-input", "unknown state '" + text + "'");
        return;
      }
    }
    ordered_json out = ordered_json::array();
    for (const auto& e : g.queue(state)) out.push_back(queue_entry_json(e));
    send_json(res, 200, out);
  });

  srv.Get(R"(/submissions/([^/]+))", [&g](const httplib::Request& req, httplib::Response& res) {
    const auto id = req.matches[1].str();
    auto j = g.get(id).to_json();
    if (auto d = g.get_decision(id)) j["decision"] = d->to_json();
    send_json(res, 200, j);
  });

  srv.Get(R"(/submissions/([^/]+)/report)", [&g](const httplib::Request& req, httplib::Response& res) {
    res.status = 200;
    res.set_content(g.get_report_json(req.matches[1].str()), "application/json");
  });

  srv.Post(R"(/submissions/([^/]+)/assess)", [this, &g](const httplib::Request& req, httplib::Response& res) {
    const auto id = req.matches[1].str();
    auto sub = g.begin_assess(id);
    {
      std::lock_guard lock(impl_->jobs_mu);
      impl_->jobs.push_back(std::async(std::launch::async, [&g, id]() {
        try {
          g.finish_assess(id);
        } catch (const std::exception& e) {
          std::cerr << "assessment of " << id << " aborted: " << e.what() << "\n";
        }
      }));
    }
    res.set_header("Location", "/submissions/" + id);
    send_json(res, 202, sub.to_json());
  });

  srv.Post(R"(/submissions/([^/]+)/decision)", [&g](const httplib::Request& req, httplib::Response& res) {
    const auto& token = g.config().moderator_token;
    if (!token.empty()) {
      auto presented = req.get_header_value("X-Moderator-Token");
      auto auth = req.get_header_value("Authorization");
      if (presented.empty() && auth.rfind("Bearer ", 0) == 0) presented = auth.substr(7);
      if (presented != token) {
        send_error(res, 401, "unauthorized", "moderator token required");
        return;
      }
    }
    const auto id = req.matches[1].str();
    auto decision = Decision::from_json(json::parse(req.body), id);
    auto sub = g.decide(id, std::move(decision));
    auto j = sub.to_json();
    if (auto d = g.get_decision(id)) j["decision"] = d->to_json();
    send_json(res, 200, j);
  });
}

GateServer::~GateServer() {
  stop();
  drain();
}

int GateServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  if (port == 0) {
    int bound = srv.bind_to_any_port(host);
    if (bound <= 0) throw Error(ErrorKind::io, "cannot bind " + host);
    return bound;
  }
  if (!srv.bind_to_port(host, port)) {
    throw Error(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void GateServer::listen() {
  impl_->listen_started = true;
  if (!impl_->stop_requested) impl_->server.listen_after_bind();
  impl_->listen_done = true;
}

void GateServer::stop() {
  // stop() may race a listen() that has not started accepting yet; the two
  // flags make sure one side sees the other.
  impl_->stop_requested = true;
  if (!impl_->listen_started) return;
  while (!impl_->server.is_running() && !impl_->listen_done) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  impl_->server.stop();
}

void GateServer::drain() {
  std::vector<std::future<void>> jobs;
  {
    std::lock_guard lock(impl_->jobs_mu);
    jobs.swap(impl_->jobs);
  }
  for (auto& j : jobs) j.wait();
}

}  // namespace sastbench

#include "stub_server.hpp"

#include <httplib.h>

#include <json.hpp>

namespace preguss::testing {

StubLlmServer::StubLlmServer() : server_(std::make_unique<httplib::Server>()) {
  server_->Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
    Reply r;
    {
      std::lock_guard<std::mutex> lock(mu_);
      Request rec{req.path, req.body, {}};
      for (const auto& [k, v] : req.headers) rec.headers[k] = v;
      requests_.push_back(std::move(rec));
      if (!replies_.empty()) {
        last_ = replies_.front();
        replies_.pop_front();
      }
      r = last_;
    }
    res.status = r.status;
    res.set_content(r.body, "application/json");
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

StubLlmServer::~StubLlmServer() {
  server_->stop();
  if (thread_.joinable()) thread_.join();
}

void StubLlmServer::script(std::vector<Reply> replies) {
  std::lock_guard<std::mutex> lock(mu_);
  replies_.assign(replies.begin(), replies.end());
  requests_.clear();
}

std::string StubLlmServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

std::vector<StubLlmServer::Request> StubLlmServer::requests() const {
  std::lock_guard<std::mutex> lock(mu_);
  return requests_;
}

std::string StubLlmServer::chat_body(const std::string& content, long prompt_tokens, long completion_tokens) {
  nlohmann::json j;
  j["id"] = "stub";
  j["choices"] = nlohmann::json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}});
  if (prompt_tokens >= 0) j["usage"] = {{"prompt_tokens", prompt_tokens}, {"completion_tokens", completion_tokens}};
  return j.dump();
}

}  // namespace preguss::testing

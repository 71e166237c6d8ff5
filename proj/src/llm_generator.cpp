#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "preguss/synthesis.hpp"

namespace preguss {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

long word_count(const std::string& s) {
  std::istringstream is(s);
  std::string w;
  long n = 0;
  while (is >> w) ++n;
  return n;
}

// drops // and /* */ comments
std::string strip_comments(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.compare(i, 2, "//") == 0) {
      while (i < s.size() && s[i] != '\n') ++i;
      out += '\n';
    } else if (s.compare(i, 2, "/*") == 0) {
      std::size_t e = s.find("*/", i + 2);
      i = e == std::string::npos ? s.size() : e + 1;
      out += ' ';
    } else {
      out += s[i];
    }
  }
  return out;
}

struct Anchor {
  NodeId function = -1;
  NodeId loop = -1;
  std::string fn;
};

std::optional<Anchor> resolve_anchor(const std::string& info, const TypedProgram& tp, const std::string& default_fn,
                                     std::string& why) {
  std::istringstream is(info);
  std::vector<std::string> words;
  for (std::string w; is >> w;) words.push_back(w);
  Anchor a;
  if (words.empty()) {
    if (default_fn.empty() || !tp.function(default_fn)) {
      why = "block has no anchor";
      return std::nullopt;
    }
    a.fn = default_fn;
  } else if (words[0] == "loop") {
    if (words.size() < 2) {
      why = "loop anchor without an id";
      return std::nullopt;
    }
    char* end = nullptr;
    long id = std::strtol(words[1].c_str(), &end, 10);
    const Stmt* s = *end == '\0' ? tp.stmt(static_cast<NodeId>(id)) : nullptr;
    if (!s || s->kind != Stmt::Kind::While) {
      why = "'" + words[1] + "' is not a loop id";
      return std::nullopt;
    }
    a.loop = s->id;
    a.fn = tp.owner(s->id);
  } else {
    if (!tp.function(words[0])) {
      why = "unknown function '" + words[0] + "'";
      return std::nullopt;
    }
    a.fn = words[0];
  }
  a.function = tp.function(a.fn)->id;
  return a;
}

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // prefix without trailing slash
};

Endpoint split_url(const std::string& url) {
  std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw GeneratorUnavailable("LLM base URL must start with http:// or https://");
  std::size_t slash = url.find('/', scheme + 3);
  Endpoint e;
  e.origin = url.substr(0, slash);
  e.path = slash == std::string::npos ? "" : url.substr(slash);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

}  // namespace

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

LlmConfig LlmConfig::from_env() {
  LlmConfig c;
  c.base_url = env_or("PREGUSS_LLM_BASE_URL", "");
  c.model = env_or("PREGUSS_LLM_MODEL", "");
  c.api_key = env_or("PREGUSS_LLM_API_KEY", "");
  return c;
}

std::string chat_request_body(const std::string& model, const std::vector<ChatMessage>& messages) {
  nlohmann::ordered_json j;
  j["model"] = model;
  j["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) j["messages"].push_back({{"role", m.role}, {"content", m.content}});
  j["temperature"] = 0;
  return j.dump();
}

GeneratorResponse parse_llm_reply(const std::string& text, const TypedProgram& tp, const std::string& default_fn) {
  GeneratorResponse out;
  out.raw = text;
  std::istringstream is(text);
  std::string ln;
  bool in_block = false, acsl = false;
  std::string info, body;
  auto flush = [&]() {
    std::string why;
    std::optional<Anchor> a = resolve_anchor(info, tp, default_fn, why);
    std::string src = strip_comments(body);
    std::size_t start = 0;
    while (start < src.size()) {
      std::size_t semi = src.find(';', start);
      std::string piece = trim(src.substr(start, semi == std::string::npos ? std::string::npos : semi - start));
      start = semi == std::string::npos ? src.size() : semi + 1;
      if (piece.empty()) continue;
      std::string clause_text = piece + ";";
      if (!a) {
        out.notes.push_back("dropped `" + clause_text + "`: " + why);
        continue;
      }
      Clause c;
      try {
        c = parse_clause(clause_text);
      } catch (const Error& e) {
        out.notes.push_back("dropped `" + clause_text + "`: " + e.what());
        continue;
      }
      if (c.is_loop_clause()) {
        NodeId loop = a->loop;
        if (loop < 0) {
          const auto& loops = tp.info(a->fn).loops;
          if (loops.size() != 1) {
            out.notes.push_back("dropped `" + clause_text + "`: loop clause needs ```acsl loop <id>```");
            continue;
          }
          loop = loops[0];
        }
        c.anchor = loop;
      } else if (c.is_contract_clause()) {
        if (a->loop >= 0) {
          out.notes.push_back("dropped `" + clause_text + "`: contract clause inside a loop block");
          continue;
        }
        c.anchor = a->function;
      } else {
        out.notes.push_back("dropped `" + clause_text + "`: assertions are not accepted from the generator");
        continue;
      }
      out.clauses.push_back(std::move(c));
    }
  };
  while (std::getline(is, ln)) {
    std::string t = trim(ln);
    if (!in_block) {
      if (t.rfind("```", 0) == 0) {
        in_block = true;
        std::string tag = trim(t.substr(3));
        acsl = tag.rfind("acsl", 0) == 0;
        info = acsl ? trim(tag.substr(4)) : "";
        body.clear();
      }
      continue;
    }
    if (t.rfind("```", 0) == 0) {
      in_block = false;
      if (acsl) flush();
      continue;
    }
    body += ln + "\n";
  }
  if (in_block && acsl) flush();  // unterminated fence
  if (out.clauses.empty()) {
    out.parse_empty = true;
    out.notes.push_back("response-parse-empty: no clause could be parsed from the reply");
  }
  return out;
}

GeneratorResponse LlmGenerator::generate(const GeneratorRequest& req) {
  if (cfg_.base_url.empty()) throw GeneratorUnavailable("LLM endpoint not configured (PREGUSS_LLM_BASE_URL)");
  Endpoint ep = split_url(cfg_.base_url);
  std::string body = chat_request_body(cfg_.model, req.messages);

  httplib::Client cli(ep.origin);
  if (!cli.is_valid()) throw GeneratorUnavailable("invalid LLM endpoint '" + cfg_.base_url + "'");
  cli.set_connection_timeout(cfg_.timeout_s, 0);
  cli.set_read_timeout(cfg_.timeout_s, 0);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  int delay = cfg_.backoff_ms;
  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
    auto res = cli.Post(ep.path + "/chat/completions", headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) throw GeneratorUnavailable("LLM endpoint answered HTTP " + std::to_string(res->status));

    transcripts_.push_back({body, res->body});
    std::string content;
    long pt = -1, ct = -1;
    try {
      auto j = nlohmann::json::parse(res->body);
      if (j.contains("choices") && !j["choices"].empty()) content = j["choices"][0]["message"]["content"].get<std::string>();
      else if (j.contains("message")) content = j["message"]["content"].get<std::string>();
      if (j.contains("usage")) {
        pt = j["usage"].value("prompt_tokens", -1L);
        ct = j["usage"].value("completion_tokens", -1L);
      }
    } catch (const std::exception& e) {
      GeneratorResponse bad;
      bad.raw = res->body;
      bad.parse_empty = true;
      bad.notes.push_back(std::string("response-parse-empty: malformed reply: ") + e.what());
      return bad;
    }
    std::string default_fn = req.phase == Phase::Host ? req.host : (req.callees.size() == 1 ? req.callees[0] : "");
    GeneratorResponse out = req.program ? parse_llm_reply(content, *req.program, default_fn) : GeneratorResponse{};
    out.raw = content;
    long words = 0;
    for (const auto& m : req.messages) words += word_count(m.content);
    out.prompt_tokens = pt >= 0 ? pt : words;
    out.completion_tokens = ct >= 0 ? ct : word_count(content);
    return out;
  }
  throw GeneratorUnavailable("LLM endpoint unavailable after " + std::to_string(cfg_.max_retries + 1) +
                             " attempts: " + last_error);
}

}  // namespace preguss

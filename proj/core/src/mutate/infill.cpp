#include <sstream>

#include "gavel/common/error.hpp"
#include "gavel/mutate/mutate.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gavel::mutate {

using nlohmann::json;

const std::string_view kSystemPrompt =
    "You are an expert programming agent in the Ludii game description language. You output syntactically correct "
    "Ludii game descriptions and no other text of any kind.";

std::string build_modification_prompt(std::span<const std::string> references, std::string_view game) {
  std::ostringstream out;
  out << "Your task is to mutate a game written in the Ludii game description language to produce a new game. Use "
         "the following games as reference for proper Ludii syntax and game structure:\n\n";
  for (std::size_t i = 0; i < references.size(); ++i)
    out << "=====Game " << i + 1 << "======\n" << references[i] << "\n==========\n\n";
  out << "Now, create a modification of the following game. Make sure to obey the constraints of the Ludii grammar "
         "to create a syntactically-valid games. In addition, make sure to modify at least part of the game so that "
         "it becomes a new game. Do not simply copy an existing game.\n\n"
      << "=====Game to modify=====\n"
      << game << "\n==========\n\n"
      << "=====Modified game=====\n";
  return out.str();
}

std::string_view to_string(InfillResult::Status status) noexcept {
  switch (status) {
    case InfillResult::Status::Ok: return "ok";
    case InfillResult::Status::Timeout: return "timeout";
    case InfillResult::Status::EndpointError: return "endpoint-error";
    case InfillResult::Status::EmptyCompletion: return "empty-completion";
  }
  return "?";
}

void InfillEndpointConfig::check() const {
  if (!(temperature > 0)) throw Error(Errc::InvalidParams, "temperature must be > 0");
  if (top_k < 1) throw Error(Errc::InvalidParams, "top_k must be >= 1");
  if (max_new_tokens < 1) throw Error(Errc::InvalidParams, "max_new_tokens must be >= 1");
  if (retries < 0) throw Error(Errc::InvalidParams, "retries must be >= 0");
}

std::string InfillEndpointConfig::default_template(Mode mode) {
  if (mode == Mode::Chat) {
    return R"({"messages": [{"role": "system", "content": "{system}"}, {"role": "user", "content": "{prompt}"}],
 "temperature": "{temperature}", "top_k": "{top_k}", "max_tokens": "{max_new_tokens}"})";
  }
  return R"({"prefix": "{prefix}", "suffix": "{suffix}", "temperature": "{temperature}", "top_k": "{top_k}",
 "max_new_tokens": "{max_new_tokens}"})";
}

namespace {

void fill(json& node, const std::map<std::string, json>& values) {
  if (node.is_string()) {
    const auto it = values.find(node.get<std::string>());
    if (it != values.end()) node = it->second;
  } else if (node.is_structured()) {
    for (auto& child : node) fill(child, values);
  }
}

struct Url {
  std::string origin;  // scheme://host:port
  std::string path;
};

Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::string infill_request_body(const MutationRequest& req, const InfillEndpointConfig& config) {
  config.check();
  const std::string text = config.request_template.empty() ? InfillEndpointConfig::default_template(config.mode)
                                                           : config.request_template;
  json body;
  try {
    body = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::Config, std::string("request template is not JSON: ") + e.what());
  }
  const std::map<std::string, json> values = {
      {"{prefix}", req.prefix},
      {"{suffix}", req.suffix},
      {"{temperature}", config.temperature},
      {"{top_k}", config.top_k},
      {"{max_new_tokens}", config.max_new_tokens},
      {"{system}", std::string(kSystemPrompt)},
      {"{prompt}", build_modification_prompt(config.reference_games, req.parent)},
  };
  fill(body, values);
  return body.dump();
}

InfillResult infill_mutate(const MutationRequest& req, const InfillEndpointConfig& config) {
  InfillResult result;
  const std::string body = infill_request_body(req, config);
  const Url url = split_url(config.url);
  httplib::Client client(url.origin);
  const auto secs = static_cast<time_t>(config.timeout_seconds);
  const auto usecs = static_cast<time_t>((config.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  for (int attempt = 0; attempt <= config.retries; ++attempt) {
    result.attempts = attempt + 1;
    auto res = client.Post(url.path, body, "application/json");
    if (!res) {
      const auto err = res.error();
      result.status = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read
                          ? InfillResult::Status::Timeout
                          : InfillResult::Status::EndpointError;
      result.message = httplib::to_string(err);
      continue;
    }
    if (res->status != 200) {
      result.status = InfillResult::Status::EndpointError;
      result.message = "HTTP " + std::to_string(res->status);
      continue;
    }
    std::string completion;
    try {
      const json reply = json::parse(res->body);
      const json& field = reply.at(json::json_pointer(config.completion_pointer));
      if (field.is_string()) completion = field.get<std::string>();
    } catch (const json::exception& e) {
      result.status = InfillResult::Status::EndpointError;
      result.message = std::string("malformed response: ") + e.what();
      continue;
    }
    if (completion.find_first_not_of(" \t\r\n") == std::string::npos) {
      result.status = InfillResult::Status::EmptyCompletion;
      result.message = "endpoint returned no text";
      return result;
    }
    result.status = InfillResult::Status::Ok;
    result.message.clear();
    result.completion = completion;
    result.candidate = config.mode == InfillEndpointConfig::Mode::Chat ? completion
                                                                         : req.prefix + completion + req.suffix;
    return result;
  }
  return result;
}

}  // namespace gavel::mutate

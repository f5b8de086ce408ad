//
// Copyright 2026 The ldptext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "ldptext/remote_scorer.h"

#include <cmath>

#include "httplib.h"
#include "json.hpp"
#include "ldptext/errors.h"
#include "ldptext/tokenizer.h"

namespace ldptext {
namespace {

[[noreturn]] void ThrowTransport(httplib::Error err, const std::string& what) {
  const std::string msg = what + ": " + httplib::to_string(err);
  switch (err) {
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::Read:
      throw NetworkTimeoutError(msg);
    default:
      throw ScorerError(msg);
  }
}

}  // namespace

RemoteScorer::RemoteScorer(const std::string& endpoint, Vocabulary vocab,
                           std::chrono::milliseconds timeout)
    : vocab_(std::move(vocab)),
      client_(std::make_unique<httplib::Client>(endpoint)) {
  client_->set_connection_timeout(timeout);
  client_->set_read_timeout(timeout);
  client_->set_write_timeout(timeout);
  auto unk = vocab_.find(kUnkToken);
  if (!unk) throw InvalidInputError("remote scorer vocabulary lacks <unk>");
  unk_id_ = *unk;

  nlohmann::json hs;
  try {
    hs = nlohmann::json::parse(Get("/handshake"));
    const auto hash = hs.at("vocab_hash").get<std::string>();
    const auto size = hs.at("vocab_size").get<std::size_t>();
    if (hash != vocab_.hash() || size != vocab_.size()) {
      throw VocabularyMismatchError("endpoint vocabulary " + hash + "/" +
                                    std::to_string(size) + " != local " +
                                    vocab_.hash() + "/" +
                                    std::to_string(vocab_.size()));
    }
    if (!hs.at("eos_id").is_null()) {
      const auto eos = hs.at("eos_id").get<TokenId>();
      if (eos < 0 || static_cast<std::size_t>(eos) >= vocab_.size()) {
        throw MalformedResponseError("handshake eos_id out of range");
      }
      eos_id_ = eos;
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponseError(std::string("handshake: ") + e.what());
  }
}

RemoteScorer::~RemoteScorer() = default;

std::string RemoteScorer::Get(const std::string& path) const {
  auto res = client_->Get(path);
  if (!res) ThrowTransport(res.error(), "GET " + path);
  if (res->status != 200) {
    throw MalformedResponseError("GET " + path + " returned HTTP " +
                                 std::to_string(res->status));
  }
  return res->body;
}

std::string RemoteScorer::Post(const std::string& path,
                               const std::string& body) const {
  auto res = client_->Post(path, body, "application/json");
  if (!res) ThrowTransport(res.error(), "POST " + path);
  if (res->status != 200) {
    throw MalformedResponseError("POST " + path + " returned HTTP " +
                                 std::to_string(res->status));
  }
  return res->body;
}

LogitVector RemoteScorer::NextLogits(std::span<const TokenId> context) const {
  nlohmann::json req;
  req["context"] = std::vector<TokenId>(context.begin(), context.end());
  const std::string body = Post("/logits", req.dump());
  LogitVector logits;
  try {
    auto res = nlohmann::json::parse(body);
    const auto& arr = res.at("logits");
    if (!arr.is_array()) throw MalformedResponseError("logits is not an array");
    logits.reserve(arr.size());
    for (const auto& x : arr) {
      if (!x.is_number()) {
        throw MalformedResponseError("non-numeric logit");
      }
      logits.push_back(x.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedResponseError(std::string("logits: ") + e.what());
  }
  if (logits.size() != vocab_.size()) {
    throw MalformedResponseError("expected " + std::to_string(vocab_.size()) +
                                 " logits, got " +
                                 std::to_string(logits.size()));
  }
  for (double x : logits) {
    if (!std::isfinite(x)) throw MalformedResponseError("non-finite logit");
  }
  return logits;
}

ScorerService::ScorerService(const TokenScorer& scorer)
    : scorer_(scorer), server_(std::make_unique<httplib::Server>()) {
  Install();
}

ScorerService::~ScorerService() { Stop(); }

void ScorerService::Install() {
  server_->Get("/handshake", [this](const httplib::Request&,
                                    httplib::Response& res) {
    nlohmann::json j;
    j["vocab_hash"] = scorer_.vocabulary().hash();
    j["vocab_size"] = scorer_.vocabulary().size();
    if (auto eos = scorer_.eos_id()) {
      j["eos_id"] = *eos;
    } else {
      j["eos_id"] = nullptr;
    }
    res.set_content(j.dump(), "application/json");
  });
  server_->Post("/logits", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    std::vector<TokenId> context;
    try {
      context = nlohmann::json::parse(req.body)
                    .at("context")
                    .get<std::vector<TokenId>>();
    } catch (const nlohmann::json::exception& e) {
      res.status = 400;
      res.set_content(e.what(), "text/plain");
      return;
    }
    const auto v = static_cast<TokenId>(scorer_.vocabulary().size());
    for (TokenId id : context) {
      if (id < kBosId || id >= v) {
        res.status = 400;
        res.set_content("context id out of range", "text/plain");
        return;
      }
    }
    nlohmann::json j;
    j["logits"] = scorer_.NextLogits(context);
    res.set_content(j.dump(), "application/json");
  });
}

int ScorerService::Start(const std::string& host, int port) {
  int bound = port == 0 ? server_->bind_to_any_port(host)
                        : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw ScorerError("cannot bind " + host);
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void ScorerService::Listen(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    throw ScorerError("cannot listen on " + host + ":" + std::to_string(port));
  }
}

void ScorerService::Stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace ldptext

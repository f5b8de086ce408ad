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

#ifndef LDPTEXT_REMOTE_SCORER_H_
#define LDPTEXT_REMOTE_SCORER_H_

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "ldptext/scorer.h"
#include "ldptext/types.h"

namespace httplib {
class Client;
class Server;
}  // namespace httplib

namespace ldptext {

// Wire protocol (JSON over HTTP, strict request/response):
//
//   GET  /handshake -> {"vocab_hash": "<16 hex>", "vocab_size": N,
//                       "eos_id": id | null}
//   POST /logits    <- {"context": [ids...]}
//                   -> {"logits": [N floats]}
//
// The client holds its own copy of the vocabulary (it tokenizes prompts
// locally) and refuses to score until the handshake hash matches.
class RemoteScorer final : public TokenScorer {
 public:
  // 'endpoint' is "http://host:port". Performs the handshake immediately.
  // Throws VocabularyMismatchError, NetworkTimeoutError, ScorerError or
  // MalformedResponseError.
  RemoteScorer(const std::string& endpoint, Vocabulary vocab,
               std::chrono::milliseconds timeout = std::chrono::seconds(10));
  ~RemoteScorer() override;

  const Vocabulary& vocabulary() const override { return vocab_; }
  LogitVector NextLogits(std::span<const TokenId> context) const override;
  std::optional<TokenId> eos_id() const override { return eos_id_; }
  TokenId unk_id() const override { return unk_id_; }
  // One in-flight request per connection.
  bool concurrent_safe() const override { return false; }

 private:
  std::string Get(const std::string& path) const;
  std::string Post(const std::string& path, const std::string& body) const;

  Vocabulary vocab_;
  std::optional<TokenId> eos_id_;
  TokenId unk_id_ = 0;
  std::unique_ptr<httplib::Client> client_;
};

// Serves any scorer over the protocol above. Used for tests and the
// serve-scorer subcommand.
class ScorerService {
 public:
  explicit ScorerService(const TokenScorer& scorer);
  ~ScorerService();

  // Binds and starts serving on a background thread. Port 0 picks a free
  // port; returns the bound port.
  int Start(const std::string& host = "127.0.0.1", int port = 0);
  // Blocks the calling thread serving requests.
  void Listen(const std::string& host, int port);
  void Stop();

 private:
  void Install();

  const TokenScorer& scorer_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace ldptext

#endif  // LDPTEXT_REMOTE_SCORER_H_

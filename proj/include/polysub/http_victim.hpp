// Copyright 2026 The Polysub Authors.
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

#ifndef POLYSUB_HTTP_VICTIM_HPP_
#define POLYSUB_HTTP_VICTIM_HPP_

#include <chrono>
#include <string>
#include <vector>

#include "httplib.h"
#include "json.hpp"
#include "polysub/victims.hpp"

namespace polysub {

// Client for a remote victim speaking the JSON protocol:
//   GET  /info    -> {"mode": "score"|"decision", "num_classes": N}
//   POST /predict {"texts": [...]} -> {"scores": [[...], ...]} or
//                                     {"labels": [...]}
// Texts are sent detokenized. Connection failures are retried once; any
// other failure, including a non-200 status, is a RemoteError.
class HttpVictim : public VictimModel {
 public:
  explicit HttpVictim(std::string base_url,
                      std::chrono::milliseconds timeout = std::chrono::seconds(10))
      : base_url_(std::move(base_url)), timeout_(timeout) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
    const nlohmann::json info = parse_body(get("/info"), "/info");
    try {
      const auto mode = parse_mode(info.at("mode").get<std::string>());
      if (!mode) throw RemoteError(200, "/info: unknown mode");
      mode_ = *mode;
      num_classes_ = info.at("num_classes").get<int>();
    } catch (const nlohmann::json::exception& e) {
      throw RemoteError(200, std::string("/info: malformed body: ") + e.what());
    }
    if (num_classes_ < 2) throw RemoteError(200, "/info: num_classes < 2");
  }

  VictimMode mode() const override { return mode_; }
  int num_classes() const override { return num_classes_; }
  const std::string& url() const { return base_url_; }

  std::vector<std::vector<double>> predict_scores(
      std::span<const TokenSeq> texts) const override {
    if (mode_ != VictimMode::kScore) {
      throw Error(ErrorCode::kModeMismatch, "remote victim is decision-only");
    }
    const nlohmann::json body = predict(texts);
    try {
      auto rows = body.at("scores").get<std::vector<std::vector<double>>>();
      if (rows.size() != texts.size()) {
        throw RemoteError(200, "/predict: wrong number of score rows");
      }
      return rows;
    } catch (const nlohmann::json::exception& e) {
      throw RemoteError(200, std::string("/predict: malformed body: ") + e.what());
    }
  }

  std::vector<int> predict_labels(std::span<const TokenSeq> texts) const override {
    if (mode_ == VictimMode::kScore) {
      std::vector<int> labels;
      for (const auto& row : predict_scores(texts)) labels.push_back(argmax(row));
      return labels;
    }
    const nlohmann::json body = predict(texts);
    try {
      auto labels = body.at("labels").get<std::vector<int>>();
      if (labels.size() != texts.size()) {
        throw RemoteError(200, "/predict: wrong number of labels");
      }
      return labels;
    } catch (const nlohmann::json::exception& e) {
      throw RemoteError(200, std::string("/predict: malformed body: ") + e.what());
    }
  }

  // The exact request body sent for a batch.
  static nlohmann::json request_body(std::span<const TokenSeq> texts) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& t : texts) list.push_back(detokenize(t));
    return {{"texts", list}};
  }

 private:
  httplib::Client client() const {
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(timeout_);
    cli.set_read_timeout(timeout_);
    cli.set_write_timeout(timeout_);
    return cli;
  }

  static void check(const httplib::Result& res, const std::string& path) {
    if (!res) {
      throw RemoteError(0, path + ": " + httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw RemoteError(res->status,
                        path + ": HTTP status " + std::to_string(res->status));
    }
  }

  std::string get(const std::string& path) const {
    auto cli = client();
    auto res = cli.Get(path);
    if (!res && res.error() == httplib::Error::Connection) res = cli.Get(path);
    check(res, base_url_ + path);
    return res->body;
  }

  nlohmann::json predict(std::span<const TokenSeq> texts) const {
    const std::string payload = request_body(texts).dump();
    auto cli = client();
    auto res = cli.Post("/predict", payload, "application/json");
    if (!res && res.error() == httplib::Error::Connection) {
      res = cli.Post("/predict", payload, "application/json");
    }
    check(res, base_url_ + "/predict");
    return parse_body(res->body, "/predict");
  }

  static nlohmann::json parse_body(const std::string& body,
                                   const std::string& path) {
    try {
      return nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw RemoteError(200, path + ": malformed body: " + e.what());
    }
  }

  std::string base_url_;
  std::chrono::milliseconds timeout_;
  VictimMode mode_ = VictimMode::kScore;
  int num_classes_ = 0;
};

}  // namespace polysub

#endif  // POLYSUB_HTTP_VICTIM_HPP_

#pragma once

#include <memory>
#include <string>

#include "somchange/bundle.hpp"
#include "somchange/service.hpp"

namespace somchange {

// What-if HTTP API over a model store:
//   POST /models                      train from an embedded CSV, returns model info
//   GET  /models/{id}                 model info
//   POST /models/{id}/pattern         conditional output pattern for one input
//   POST /models/{id}/change          change summary between two inputs
//   GET  /models/{id}/scene/{kind}    reference | changed | change; JSON or SVG
// Handlers share no mutable state beyond the store.
class ApiServer {
 public:
  ApiServer(ModelStore& store, ServiceConfig config);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds to an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  bool bind(const std::string& host, int port);
  // Blocks until stop() is called.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace somchange

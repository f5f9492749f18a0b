#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "archner/search/index.hpp"

namespace archner::search {

struct RecordError {
  std::size_t position = 0;  ///< index of the record in the batch
  std::string code;
  std::string message;
};

struct BatchResult {
  std::size_t indexed = 0;
  std::vector<RecordError> errors;
  std::size_t total_pages = 0;
};

struct HttpResponse {
  int status = 200;
  std::string body;
};

/// Thread-safe holder of the live index. Readers work on an immutable
/// snapshot; each write batch builds a new index and swaps it in, so a
/// reader sees either the whole batch or none of it.
class IndexService {
 public:
  explicit IndexService(PageIndex initial = {});

  std::shared_ptr<const PageIndex> snapshot() const;
  std::size_t size() const { return snapshot()->size(); }

  /// Valid records are applied together; invalid ones are reported by
  /// position and skipped.
  BatchResult index_records(const nlohmann::json& records);
  SearchResult search(const Query& query) const;

  /// When set, every successful batch is also written to this directory.
  void set_persist_dir(std::optional<std::string> dir);

  /// Transport-independent request handling for `GET /health`,
  /// `POST /index` and `POST /search`. Errors carry {"code","message"}.
  HttpResponse handle(std::string_view method, std::string_view path, std::string_view body);

 private:
  mutable std::shared_mutex mutex_;
  std::mutex writer_;
  std::shared_ptr<const PageIndex> current_;
  std::optional<std::string> persist_dir_;
};

/// cpp-httplib front end for an IndexService.
class HttpServer {
 public:
  explicit HttpServer(IndexService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds and starts serving on a background thread. Port 0 picks a free
  /// port. Returns the bound port; throws archner::Error on failure.
  int start(const std::string& host, int port);
  /// Blocks until stop() is called from elsewhere.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace archner::search

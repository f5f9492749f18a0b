#include "archner/search/service.hpp"

#include <condition_variable>

#include <httplib.h>

#include "archner/error.hpp"

namespace archner::search {

using nlohmann::json;

IndexService::IndexService(PageIndex initial)
    : current_(std::make_shared<const PageIndex>(std::move(initial))) {}

std::shared_ptr<const PageIndex> IndexService::snapshot() const {
  std::shared_lock lock(mutex_);
  return current_;
}

void IndexService::set_persist_dir(std::optional<std::string> dir) {
  std::lock_guard lock(writer_);
  persist_dir_ = std::move(dir);
}

BatchResult IndexService::index_records(const json& records) {
  if (!records.is_array()) throw InvalidInput("invalid_request", "expected an array of pages");
  std::lock_guard writer(writer_);
  auto next = std::make_shared<PageIndex>(*snapshot());
  BatchResult result;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      next->index_page(page_from_json(records[i]));
      ++result.indexed;
    } catch (const InvalidInput& e) {
      result.errors.push_back({i, e.code(), e.what()});
    }
  }
  result.total_pages = next->size();
  if (result.indexed > 0) {
    if (persist_dir_) next->save(*persist_dir_);
    std::unique_lock lock(mutex_);
    current_ = std::move(next);
  }
  return result;
}

SearchResult IndexService::search(const Query& query) const { return snapshot()->execute(query); }

namespace {

HttpResponse error_response(int status, const std::string& code, const std::string& message) {
  return {status, json{{"code", code}, {"message", message}}.dump()};
}

}  // namespace

HttpResponse IndexService::handle(std::string_view method, std::string_view path,
                                  std::string_view body) {
  const bool known = path == "/health" || path == "/index" || path == "/search";
  if (!known) return error_response(404, "not_found", "no route for " + std::string(path));
  const std::string_view expected = path == "/health" ? "GET" : "POST";
  if (method != expected) {
    return error_response(405, "method_not_allowed",
                          std::string(path) + " expects " + std::string(expected));
  }
  if (path == "/health") {
    return {200, json{{"status", "ok"}, {"pages", size()}}.dump()};
  }

  json request;
  try {
    request = body.empty() ? json::object() : json::parse(body);
  } catch (const json::exception& e) {
    return error_response(400, "invalid_json", e.what());
  }
  try {
    if (path == "/search") return {200, to_json(search(query_from_json(request))).dump()};

    const json* records = &request;
    if (request.is_object()) {
      if (!request.contains("pages") || request.size() != 1) {
        return error_response(400, "invalid_request",
                              "expected an array of pages or {\"pages\": [...]}");
      }
      records = &request.at("pages");
    }
    const auto result = index_records(*records);
    json errors = json::array();
    for (const auto& e : result.errors) {
      errors.push_back({{"position", e.position}, {"code", e.code}, {"message", e.message}});
    }
    return {200, json{{"indexed", result.indexed},
                      {"rejected", result.errors.size()},
                      {"errors", std::move(errors)},
                      {"total_pages", result.total_pages}}
                     .dump()};
  } catch (const InvalidInput& e) {
    return error_response(400, e.code(), e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what());
  }
}

struct HttpServer::Impl {
  IndexService& service;
  httplib::Server server;
  std::thread thread;
  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;

  explicit Impl(IndexService& s) : service(s) {}
};

HttpServer::HttpServer(IndexService& service) : impl_(std::make_unique<Impl>(service)) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = impl_->service.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, "application/json");
  };
  impl_->server.Get(".*", route);
  impl_->server.Post(".*", route);
  impl_->server.Put(".*", route);
  impl_->server.Delete(".*", route);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    throw Error("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::wait() {
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [this] { return impl_->stopped; });
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopped = true;
  }
  impl_->stopped_cv.notify_all();
}

}  // namespace archner::search

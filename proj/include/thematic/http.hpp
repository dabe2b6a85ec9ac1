#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "thematic/error.hpp"

namespace thematic {

struct HttpRequest {
  std::string url;  // absolute, http:// or https://
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
  std::chrono::milliseconds timeout{60000};
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class Timeout : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// Minimal POST-only transport. Implementations throw Timeout or
// TransportError for failures below the HTTP layer; any HTTP status is
// returned as a response.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

std::shared_ptr<HttpTransport> make_http_transport();

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;  // always begins with '/'
};

// Throws InvalidArgument for anything that is not an absolute http(s) URL.
ParsedUrl parse_url(const std::string& url);

}  // namespace thematic

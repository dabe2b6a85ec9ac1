#include "thematic/http.hpp"

#include <httplib.h>

#include <regex>

namespace thematic {

ParsedUrl parse_url(const std::string& url) {
  static const std::regex pattern(R"(^(https?)://([^/:?#\s]+)(?::(\d+))?([^\s]*)$)",
                                  std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) {
    throw InvalidArgument("not an absolute http(s) URL: " + url);
  }
  ParsedUrl out;
  out.scheme = m[1].str();
  for (auto& c : out.scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  out.host = m[2].str();
  out.port = m[3].matched ? std::stoi(m[3].str()) : (out.scheme == "https" ? 443 : 80);
  out.path = m[4].str().empty() ? "/" : m[4].str();
  if (out.path.front() != '/') out.path.insert(out.path.begin(), '/');
  return out;
}

namespace {

class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse post(const HttpRequest& request) override {
    const ParsedUrl url = parse_url(request.url);
    const std::string origin = url.scheme + "://" + url.host + ":" + std::to_string(url.port);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (url.scheme == "https") {
      throw TransportError("built without TLS support; cannot reach " + url.host);
    }
#endif
    httplib::Client client(origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Headers headers;
    std::string content_type = "application/json";
    for (const auto& [k, v] : request.headers) {
      if (k == "Content-Type") {
        content_type = v;
      } else {
        headers.emplace(k, v);
      }
    }
    auto result = client.Post(url.path, headers, request.body, content_type);
    if (!result) {
      const auto err = result.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read) {
        throw Timeout("request to " + url.host + " timed out (" + httplib::to_string(err) + ")");
      }
      throw TransportError("request to " + url.host + " failed: " + httplib::to_string(err));
    }
    return {result->status, result->body};
  }
};

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

}  // namespace thematic

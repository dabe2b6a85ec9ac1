#include <httplib.h>

#include "thematic/service.hpp"

namespace thematic {

bool serve(AnalysisService& service, const std::string& host, int port,
           const std::optional<std::filesystem::path>& static_dir) {
  httplib::Server server;
  auto route = [&service](const httplib::Request& req, httplib::Response& res) {
    ApiResponse out = handle_api(service, req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  server.Get(R"(/api/.*)", route);
  server.Post(R"(/api/.*)", route);
  if (static_dir && !server.set_mount_point("/", static_dir->string())) {
    throw InvalidArgument("static directory does not exist: " + static_dir->string());
  }
  return server.listen(host, port);
}

}  // namespace thematic

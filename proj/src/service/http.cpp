#include "httplib.h"
#include "uhinet/errors.hpp"
#include "uhinet/service/service.hpp"

namespace uhinet::service {

void serve(const Service& service, const std::string& host, int port) {
  httplib::Server server;
  // SO_REUSEADDR only, so a busy port fails to bind.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
    const Response r = service.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  const std::string pattern = R"(/api/v1(/.*)?)";
  server.Get(pattern, handler);
  server.Post(pattern, handler);
  server.Put(pattern, handler);
  server.Delete(pattern, handler);
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(pattern, [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  if (!server.bind_to_port(host, port)) throw UsageError("serve: cannot bind " + host + ":" + std::to_string(port));
  server.listen_after_bind();
}

}  // namespace uhinet::service

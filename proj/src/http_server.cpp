#include "lcstrs/service.hpp"

#include "httplib.h"

namespace lcstrs {

int serve_http(SessionStore& store, const std::string& host, int port,
               const std::function<void(int, std::function<void()>)>& on_listen) {
  httplib::Server svr;
  auto route = [&store](const httplib::Request& req, httplib::Response& res) {
    HttpResponse r = store.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  svr.Get(".*", route);
  svr.Post(".*", route);
  svr.Delete(".*", route);
  if (port == 0) {
    port = svr.bind_to_any_port(host);
    if (port <= 0) return 1;
  } else if (!svr.bind_to_port(host, port)) {
    return 1;
  }
  if (on_listen) on_listen(port, [&svr] { svr.stop(); });
  return svr.listen_after_bind() ? 0 : 1;
}

}  // namespace lcstrs

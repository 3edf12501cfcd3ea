#include "hvacsr/io/weather.hpp"

// After Eigen: httplib pulls in <resolv.h>, whose _res macro clashes with Eigen internals.
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

namespace hvacsr::io {

namespace {

class HttplibClient : public HttpClient {
 public:
  HttpResponse get(const std::string& url, std::chrono::milliseconds timeout) override {
    // Split "scheme://host[:port]/path?query".
    const auto scheme_end = url.find("://");
    const auto path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    httplib::Client cli(origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    auto res = cli.Get(path);
    if (!res) return {0, {}};
    return {res->status, res->body};
  }
};

}  // namespace

std::unique_ptr<HttpClient> make_default_http_client() { return std::make_unique<HttplibClient>(); }

}  // namespace hvacsr::io

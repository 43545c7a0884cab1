#include <atomic>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "semtour/service.hpp"

namespace semtour {

struct HttpServer::Impl {
    Service& service;
    ServerOptions options;
    httplib::Server server;
    std::thread thread;
    std::atomic<bool> stopping{false};

    Impl(Service& s, ServerOptions o) : service(s), options(std::move(o)) {}

    static HttpRequest convert(const httplib::Request& req) {
        HttpRequest out;
        out.method = req.method;
        out.path = req.path;
        for (const auto& [k, v] : req.params) out.query.emplace(k, v);
        for (const auto& [k, v] : req.headers) out.headers.emplace(k, v);
        out.body = req.body;
        return out;
    }

    void reply(const HttpRequest& request, httplib::Response& res) {
        HttpResponse response = service.handle(request);
        res.status = response.status;
        res.set_content(std::move(response.body), response.content_type);
    }

    void stream_events(const httplib::Request& req, httplib::Response& res) {
        HttpRequest request = convert(req);
        if (req.get_param_value("follow") == "0") return reply(request, res);

        std::shared_ptr<NavigationSession> session;
        std::optional<std::uint64_t> cursor;
        try {
            session = service.session(SessionId(req.matches[1].str()));
            const std::string last = req.has_param("after") ? req.get_param_value("after")
                                                            : req.get_header_value("Last-Event-ID");
            if (!last.empty()) {
                std::size_t used = 0;
                cursor = std::stoull(last, &used);
                if (used != last.size()) throw std::invalid_argument(last);
            }
        } catch (const Error& e) {
            res.status = http_status(e.code());
            res.set_content(error_body(e).dump(), "application/json");
            return;
        } catch (const std::exception&) {
            Error e(ErrorCode::InvalidArgument, "event cursor must be a non-negative integer");
            res.status = http_status(e.code());
            res.set_content(error_body(e).dump(), "application/json");
            return;
        }

        res.set_header("Cache-Control", "no-cache");
        const auto poll = options.stream_poll;
        res.set_chunked_content_provider(
            "text/event-stream", [this, session, cursor, poll](std::size_t, httplib::DataSink& sink) mutable {
                if (stopping) {
                    sink.done();
                    return true;
                }
                auto events = session->events_after(cursor);
                if (events.empty() && session->wait_for_events(cursor, poll)) events = session->events_after(cursor);
                for (const auto& event : events) {
                    const std::string frame = sse_frame(event);
                    if (!sink.write(frame.data(), frame.size())) return false;
                    cursor = event.seq;
                }
                return sink.is_writable();
            });
    }
};

HttpServer::HttpServer(Service& service, ServerOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
    auto& server = impl_->server;
    Impl* impl = impl_.get();

    server.new_task_queue = [] { return new httplib::ThreadPool(16); };
    // SO_REUSEADDR only: the library default adds SO_REUSEPORT, which lets a
    // second server bind a port that is already in use.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    server.Get(R"(/sessions/([^/]+)/events)",
               [impl](const httplib::Request& req, httplib::Response& res) { impl->stream_events(req, res); });
    auto generic = [impl](const httplib::Request& req, httplib::Response& res) {
        impl->reply(Impl::convert(req), res);
    };
    server.Get(".*", generic);
    server.Post(".*", generic);
    server.Put(".*", generic);
    server.Delete(".*", generic);
    server.Patch(".*", generic);
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
        spdlog::info("method={} path={} status={} bytes={}", req.method, req.path, res.status, res.body.size());
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
    auto& server = impl_->server;
    const auto& options = impl_->options;
    int port = options.port;
    if (port == 0) {
        port = server.bind_to_any_port(options.host);
        if (port < 0) port = 0;
    } else if (!server.bind_to_port(options.host, port)) {
        port = 0;
    }
    if (port == 0) {
        fail(ErrorCode::IoError, "cannot bind " + options.host + ":" + std::to_string(options.port),
             {{"host", options.host}, {"port", std::to_string(options.port)}});
    }
    spdlog::info("listening host={} port={}", options.host, port);
    return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

int HttpServer::start() {
    const int port = bind();
    impl_->thread = std::thread([this] { listen(); });
    impl_->server.wait_until_ready();
    return port;
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->stopping = true;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace semtour

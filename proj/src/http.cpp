#include <httplib.h>

#include <charconv>

#include "json_util.hpp"
#include "socketbench/service.hpp"

namespace socketbench::service {

using namespace std::chrono_literals;
using detail::json;

namespace {

constexpr const char* json_type = "application/json";

void send_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", message}}.dump(), json_type);
}

// Maps the library's exception hierarchy onto HTTP status codes.
template <class F>
void guarded(httplib::Response& res, F&& body) {
    try {
        body();
    } catch (const ConflictError& e) {
        send_error(res, 409, e.what());
    } catch (const NotFoundError& e) {
        send_error(res, 404, e.what());
    } catch (const StateError& e) {
        send_error(res, 409, e.what());
    } catch (const ParseError& e) {
        send_error(res, 400, e.what());
    } catch (const ValidationError& e) {
        send_error(res, 400, e.what());
    } catch (const DomainError& e) {
        send_error(res, 400, e.what());
    } catch (const std::exception& e) {
        send_error(res, 500, e.what());
    }
}

std::optional<std::size_t> parse_index(const std::string& s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::string sse_sample(std::size_t index, const ppt::ForceSample& s) {
    return "id: " + std::to_string(index) + "\nevent: sample\ndata: " +
           json{{"t_s", s.t_s}, {"force_n", s.force_n}}.dump() + "\n\n";
}

}  // namespace

struct HttpServer::Impl {
    SessionService& service;
    httplib::Server server;

    explicit Impl(SessionService& s) : service(s) {}
};

HttpServer::HttpServer(SessionService& service, std::optional<std::string> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
    auto& svr = impl_->server;
    auto& svc = impl_->service;

    svr.Get("/api/state", [&svc](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { res.set_content(snapshot_to_json(svc.snapshot()), json_type); });
    });

    svr.Post("/api/session/start", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const auto rec = svc.start(parse_start_request(req.body));
            res.status = 201;
            res.set_content(record_to_json(rec), json_type);
        });
    });

    svr.Post("/api/session/mark", [&svc](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { res.set_content(record_to_json(svc.mark()), json_type); });
    });

    svr.Post("/api/session/abort", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::string reason = "operator abort";
            if (!req.body.empty()) {
                const auto doc = detail::parse_json(req.body, "abort request");
                if (doc.contains("reason")) reason = detail::get_string(doc, "reason", "abort");
            }
            res.set_content(record_to_json(svc.abort(reason)), json_type);
        });
    });

    svr.Get("/api/matrix", [&svc](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { res.set_content(ppt::serialize_matrix(svc.matrix()), json_type); });
    });

    svr.Get("/api/selection", [&svc](const httplib::Request&, httplib::Response& res) {
        guarded(res, [&] { res.set_content(selection_to_json(svc), json_type); });
    });

    // Server-sent events: `sample` events carry the log index as id, so a
    // reconnecting client resumes with Last-Event-ID. An `end` event closes
    // the stream once the session is terminal.
    svr.Get("/api/session/stream", [&svc](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            std::optional<std::uint64_t> id;
            if (req.has_param("session")) {
                const auto v = parse_index(req.get_param_value("session"));
                if (!v) throw ParseError("session: expected an integer");
                id = *v;
            } else {
                id = svc.current_session_id();
            }
            if (!id) throw NotFoundError("no session has been started");
            std::size_t cursor = 0;
            if (req.has_header("Last-Event-ID")) {
                const auto v = parse_index(req.get_header_value("Last-Event-ID"));
                if (!v) throw ParseError("Last-Event-ID: expected an integer");
                cursor = *v + 1;
            } else if (req.has_param("from")) {
                const auto v = parse_index(req.get_param_value("from"));
                if (!v) throw ParseError("from: expected an integer");
                cursor = *v;
            }
            svc.read_stream(*id, cursor, 0ms);  // NotFoundError before headers go out
            res.set_header("Cache-Control", "no-cache");
            res.set_header("X-Accel-Buffering", "no");
            auto pos = std::make_shared<std::size_t>(cursor);
            const auto session = *id;
            res.set_chunked_content_provider(
                "text/event-stream", [&svc, pos, session](std::size_t, httplib::DataSink& sink) {
                    const auto batch = svc.read_stream(session, *pos, 1000ms);
                    if (batch.samples.empty() && !batch.ended) {
                        const std::string ping = ": keep-alive\n\n";
                        return sink.write(ping.data(), ping.size());
                    }
                    std::string chunk;
                    for (std::size_t i = 0; i < batch.samples.size(); ++i)
                        chunk += sse_sample(batch.first_index + i, batch.samples[i]);
                    if (batch.ended)
                        chunk += "event: end\ndata: " +
                                 json{{"session", session}, {"state", ppt::to_string(batch.final_state)}}.dump() +
                                 "\n\n";
                    if (!sink.write(chunk.data(), chunk.size())) return false;
                    *pos += batch.samples.size();
                    if (batch.ended) sink.done();
                    return true;
                });
        });
    });

    if (static_dir && !svr.set_mount_point("/", *static_dir))
        throw ValidationError("static", "directory '" + *static_dir + "' does not exist");
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    auto& svr = impl_->server;
    if (port == 0) {
        const int p = svr.bind_to_any_port(host);
        if (p < 0) throw Error("cannot bind " + host);
        return p;
    }
    if (!svr.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void HttpServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace socketbench::service

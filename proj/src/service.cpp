#include "syrenn/service.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <iostream>
#include <thread>

namespace syrenn {

namespace {

Json failure(const std::string& kind, const std::string& detail) {
    return Json{{"ok", false}, {"error", {{"kind", kind}, {"detail", detail}}}};
}

const char* geometry_kind(GeometryErrc e) {
    switch (e) {
    case GeometryErrc::Clockwise: return "clockwise";
    case GeometryErrc::NonConvex: return "non_convex";
    case GeometryErrc::NonCoplanar: return "non_coplanar";
    default: return "geometry";
    }
}

std::size_t positive_size(const Json& j, const char* key) {
    if (!j.at(key).is_number_unsigned() || j.at(key).get<std::size_t>() == 0) {
        throw ParseError(std::string("\"") + key + "\" must be a positive integer");
    }
    return j.at(key).get<std::size_t>();
}

} // namespace

Service::Service(EngineOptions defaults) : defaults_(defaults) {}

std::size_t Service::session_count() const {
    std::lock_guard lock(mu_);
    return sessions_.size();
}

std::shared_ptr<Service::Session> Service::find(const Json& request) const {
    if (!request.contains("session") || !request.at("session").is_string()) return nullptr;
    std::lock_guard lock(mu_);
    const auto it = sessions_.find(request.at("session").get<std::string>());
    return it == sessions_.end() ? nullptr : it->second;
}

Json Service::open(const Json& request) {
    if (!request.contains("input_dim")) throw ParseError("open needs \"input_dim\"");
    auto session = std::make_shared<Session>();
    session->net = Network(positive_size(request, "input_dim"));
    session->options = defaults_;
    session->options.stats = nullptr;
    if (request.contains("region_budget")) session->options.region_budget = positive_size(request, "region_budget");
    std::lock_guard lock(mu_);
    const std::string id = "s" + std::to_string(next_id_++);
    sessions_.emplace(id, std::move(session));
    return Json{{"ok", true}, {"session", id}};
}

Json Service::close(const Json& request) {
    std::lock_guard lock(mu_);
    const auto erased = sessions_.erase(request.value("session", std::string{}));
    if (erased == 0) return failure("unknown_session", "no such session");
    return Json{{"ok", true}};
}

Json Service::handle(const Json& request) {
    try {
        if (!request.is_object() || !request.contains("op") || !request.at("op").is_string()) {
            return failure("bad_request", "request must be an object with a string \"op\"");
        }
        const std::string op = request.at("op").get<std::string>();
        if (op == "open") return open(request);
        if (op == "close") return close(request);
        if (op != "append" && op != "line" && op != "plane") return failure("unknown_op", "unknown op \"" + op + "\"");

        const auto session = find(request);
        if (!session) return failure("unknown_session", "no such session");
        std::lock_guard busy(session->busy);

        if (op == "append") {
            if (!request.contains("layer")) throw ParseError("append needs \"layer\"");
            Network next = session->net;
            next.append(layer_from_json(request.at("layer")));
            session->net = std::move(next);
            return Json{{"ok", true}, {"layers", session->net.size()}, {"output_dim", session->net.output_dim()}};
        }
        if (op == "line") {
            if (!request.contains("start") || !request.contains("end")) throw ParseError("line needs \"start\" and \"end\"");
            const auto line = symbolic_rep_1d(session->net, point_from_json(request.at("start")),
                                              point_from_json(request.at("end")), session->options);
            return Json{{"ok", true}, {"result", line_to_json(line)}};
        }
        if (!request.contains("vertices")) throw ParseError("plane needs \"vertices\"");
        const PlanarRegion input = validate_region(vertices_from_json(request.at("vertices")), session->options.tol);
        const auto parts = symbolic_rep_2d(session->net, input, session->options);
        return Json{{"ok", true}, {"result", partition_to_json(parts)}};
    } catch (const ResourceError& e) {
        Json reply = failure("resource", e.what());
        reply["error"]["partial_regions"] = e.partial_regions();
        return reply;
    } catch (const GeometryError& e) {
        return failure(geometry_kind(e.kind()), e.what());
    } catch (const DimensionError& e) {
        return failure("dimension", e.what());
    } catch (const ParseError& e) {
        return failure("schema", e.what());
    } catch (const NetworkError& e) {
        return failure("schema", e.what());
    } catch (const Json::exception& e) {
        return failure("schema", e.what());
    } catch (const std::exception& e) {
        return failure("internal", e.what());
    }
}

std::string Service::handle_line(std::string_view line) {
    Json request;
    try {
        request = Json::parse(line);
    } catch (const Json::parse_error& e) {
        return failure("bad_request", std::string("invalid JSON: ") + e.what()).dump();
    }
    return handle(request).dump();
}

TcpServer::TcpServer(Service& service, std::uint16_t port, const std::string& host) : service_(service) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw BindError(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw BindError("invalid host address " + host);
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 64) < 0) {
        const std::string why = std::strerror(errno);
        ::close(listen_fd_);
        throw BindError("cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::run(const std::atomic<bool>* interrupt) {
    std::vector<std::thread> workers;
    while (!stopping_ && !(interrupt && interrupt->load())) {
        pollfd pfd{listen_fd_, POLLIN, 0};
        const int ready = ::poll(&pfd, 1, 100);
        if (ready <= 0) continue;
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) continue;
        {
            std::lock_guard lock(conn_mu_);
            open_fds_.push_back(fd);
        }
        workers.emplace_back([this, fd] { serve_connection(fd); });
    }
    {
        std::lock_guard lock(conn_mu_);
        for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    for (auto& t : workers) t.join();
}

void TcpServer::serve_connection(int fd) {
    std::string buffer;
    char chunk[4096];
    bool open = true;
    while (open) {
        const ssize_t got = ::recv(fd, chunk, sizeof chunk, 0);
        if (got <= 0) break;
        buffer.append(chunk, static_cast<std::size_t>(got));
        std::size_t nl;
        while ((nl = buffer.find('\n')) != std::string::npos) {
            std::string line = buffer.substr(0, nl);
            buffer.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;

            const auto t0 = std::chrono::steady_clock::now();
            std::string reply = service_.handle_line(line);
            if (log_requests) {
                const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                const Json r = Json::parse(reply);
                std::string op = "?";
                try {
                    op = Json::parse(line).value("op", "?");
                } catch (const Json::exception&) {
                }
                std::cerr << "request op=" << op << " ok=" << (r.at("ok").get<bool>() ? "true" : "false")
                          << " ms=" << ms << '\n';
            }
            reply.push_back('\n');
            std::size_t sent = 0;
            while (sent < reply.size()) {
                const ssize_t n = ::send(fd, reply.data() + sent, reply.size() - sent, MSG_NOSIGNAL);
                if (n <= 0) {
                    open = false;
                    break;
                }
                sent += static_cast<std::size_t>(n);
            }
            if (!open) break;
        }
    }
    std::lock_guard lock(conn_mu_);
    std::erase(open_fds_, fd);
    ::close(fd);
}

} // namespace syrenn

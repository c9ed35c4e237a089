#pragma once

// Session-oriented analysis service over newline-delimited JSON.
//
// Requests: {"op": "open" | "append" | "line" | "plane" | "close",
//            "session": token, ...payload}
// Replies:  {"ok": true, ...} or
//           {"ok": false, "error": {"kind": string, "detail": string}}

#include "syrenn/core.hpp"
#include "syrenn/error.hpp"
#include "syrenn/serialize.hpp"

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace syrenn {

class Service {
public:
    explicit Service(EngineOptions defaults = {});

    /// Exactly one reply per request; never throws for bad input.
    Json handle(const Json& request);
    /// Parses one request line and returns the reply without a newline.
    std::string handle_line(std::string_view line);

    std::size_t session_count() const;

private:
    struct Session {
        std::mutex busy; // one in-flight request per session
        Network net;
        EngineOptions options;
    };

    std::shared_ptr<Session> find(const Json& request) const;
    Json open(const Json& request);
    Json close(const Json& request);

    EngineOptions defaults_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

class BindError : public Error {
public:
    using Error::Error;
};

/// Serves a Service on a TCP port, one thread per connection.
class TcpServer {
public:
    /// Binds and listens immediately. Port 0 picks a free port. Throws
    /// BindError when the address is unavailable.
    TcpServer(Service& service, std::uint16_t port, const std::string& host = "127.0.0.1");
    ~TcpServer();
    TcpServer(const TcpServer&) = delete;
    TcpServer& operator=(const TcpServer&) = delete;

    std::uint16_t port() const noexcept { return port_; }

    /// Accepts connections until stop() is called or `*interrupt` turns true.
    void run(const std::atomic<bool>* interrupt = nullptr);
    void stop() noexcept { stopping_ = true; }

    /// Logs one line per request to stderr when enabled.
    bool log_requests = true;

private:
    void serve_connection(int fd);

    Service& service_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::mutex conn_mu_;
    std::vector<int> open_fds_;
};

} // namespace syrenn

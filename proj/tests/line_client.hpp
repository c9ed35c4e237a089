#pragma once

#include <cstdint>
#include <string>

namespace syrenn::testing {

/// Blocking newline-delimited client for TcpServer.
class LineClient {
public:
    explicit LineClient(std::uint16_t port);
    ~LineClient();
    LineClient(const LineClient&) = delete;
    LineClient& operator=(const LineClient&) = delete;

    void send_raw(const std::string& bytes);
    /// Sends one line and returns the reply line without its newline.
    std::string request(const std::string& line);
    std::string read_line();

private:
    int fd_ = -1;
    std::string buffer_;
};

} // namespace syrenn::testing

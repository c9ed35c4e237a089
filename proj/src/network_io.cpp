// ERAN text and native JSON network formats.

#include "syrenn/error.hpp"
#include "syrenn/network.hpp"
#include "syrenn/serialize.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace syrenn {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Recursive-descent reader for bracketed decimal lists: "[1, -2.5e3]" and
// "[[1, 2], [3, 4]]".
class ListReader {
public:
    ListReader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    std::vector<double> flat() {
        std::vector<double> out;
        expect('[');
        skip();
        if (peek() == ']') {
            ++pos_;
        } else {
            while (true) {
                out.push_back(number());
                skip();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                expect(']');
                break;
            }
        }
        finish();
        return out;
    }

    std::vector<std::vector<double>> nested() {
        std::vector<std::vector<double>> rows;
        expect('[');
        skip();
        if (peek() == ']') {
            ++pos_;
            finish();
            return rows;
        }
        while (true) {
            skip();
            std::vector<double> row;
            expect('[');
            skip();
            if (peek() != ']') {
                while (true) {
                    row.push_back(number());
                    skip();
                    if (peek() == ',') {
                        ++pos_;
                        continue;
                    }
                    break;
                }
            }
            expect(']');
            rows.push_back(std::move(row));
            skip();
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            expect(']');
            break;
        }
        finish();
        return rows;
    }

private:
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    void expect(char c) {
        skip();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    void finish() {
        skip();
        if (pos_ != text_.size()) fail("trailing characters");
    }

    double number() {
        skip();
        if (peek() == '+') ++pos_;
        double v = 0.0;
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc() || ptr == begin) fail("malformed number");
        if (!std::isfinite(v)) fail("non-finite number");
        pos_ += static_cast<std::size_t>(ptr - begin);
        return v;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at column " + std::to_string(pos_ + 1), line_);
    }

    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

AffineLayer affine_from_rows(const std::vector<std::vector<double>>& rows, const std::vector<double>& bias,
                             std::size_t line) {
    if (rows.empty() || rows.front().empty()) throw ParseError("empty weight matrix", line);
    const std::size_t cols = rows.front().size();
    AffineLayer out{Matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols)),
                    Vector(static_cast<Eigen::Index>(bias.size()))};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) {
            throw ParseError("ragged weight matrix: row " + std::to_string(r) + " has " +
                                 std::to_string(rows[r].size()) + " entries, expected " + std::to_string(cols),
                             line);
        }
        for (std::size_t c = 0; c < cols; ++c) {
            out.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    for (std::size_t k = 0; k < bias.size(); ++k) out.bias[static_cast<Eigen::Index>(k)] = bias[k];
    return out;
}

} // namespace

Network parse_eran(std::string_view text) {
    std::vector<std::pair<std::string, std::size_t>> lines;
    std::size_t number = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        std::string line = trim(text.substr(start, end - start));
        if (!line.empty() && line.front() != '#') lines.emplace_back(std::move(line), number);
        start = end + 1;
    }

    std::vector<Layer> layers;
    std::optional<std::size_t> input_dim;
    std::size_t i = 0;
    while (i < lines.size()) {
        const auto& [tag_line, tag_no] = lines[i];
        std::istringstream words(tag_line);
        std::string tag;
        words >> tag;
        const std::string key = lower(tag);

        std::optional<Layer> activation; // stays empty for a bare Affine block
        if (key == "relu") {
            activation = ReluLayer{};
        } else if (key == "hardtanh") {
            activation = HardTanhLayer{};
        } else if (key == "leakyrelu") {
            LeakyReluLayer l;
            std::string alpha;
            if (words >> alpha) l.alpha = ListReader("[" + alpha + "]", tag_no).flat().front();
            activation = l;
        } else if (key == "maxpool") {
            std::size_t width = 0;
            if (!(words >> width) || width == 0) {
                throw ParseError("MaxPool needs a positive group width", tag_no);
            }
            activation = MaxPoolLayer{{{width}}}; // placeholder, expanded below
        } else if (key != "affine") {
            throw ParseError("unsupported layer '" + tag + "'", tag_no);
        }
        if (std::string extra; key != "maxpool" && key != "leakyrelu" && (words >> extra)) {
            throw ParseError("unexpected text after tag '" + tag + "'", tag_no);
        }

        if (i + 2 >= lines.size()) {
            throw ParseError("layer '" + tag + "' is missing its weight or bias line", tag_no);
        }
        const auto& [w_line, w_no] = lines[i + 1];
        const auto& [b_line, b_no] = lines[i + 2];
        const auto rows = ListReader(w_line, w_no).nested();
        const auto bias = ListReader(b_line, b_no).flat();
        AffineLayer affine = affine_from_rows(rows, bias, w_no);
        if (affine.bias.size() != affine.weights.rows()) {
            throw ParseError("bias has " + std::to_string(affine.bias.size()) + " entries for " +
                                 std::to_string(affine.weights.rows()) + " weight rows",
                             b_no);
        }
        if (!input_dim) input_dim = static_cast<std::size_t>(affine.weights.cols());
        const auto width = static_cast<std::size_t>(affine.weights.rows());
        layers.emplace_back(std::move(affine));

        if (activation) {
            if (auto* pool = std::get_if<MaxPoolLayer>(&*activation)) {
                const std::size_t size = pool->groups.front().front();
                if (width % size != 0) {
                    throw ParseError("MaxPool width " + std::to_string(size) + " does not divide " +
                                         std::to_string(width) + " units",
                                     tag_no);
                }
                pool->groups.clear();
                for (std::size_t g = 0; g < width; g += size) {
                    std::vector<std::size_t> group(size);
                    for (std::size_t k = 0; k < size; ++k) group[k] = g + k;
                    pool->groups.push_back(std::move(group));
                }
            }
            layers.push_back(std::move(*activation));
        }
        i += 3;
    }
    if (!input_dim) throw ParseError("network text contains no layers");

    Network net(*input_dim);
    std::size_t line_of_layer = 0;
    try {
        for (auto& layer : layers) {
            net.append(std::move(layer));
            ++line_of_layer;
        }
    } catch (const Error& e) {
        throw ParseError(std::string("layer ") + std::to_string(line_of_layer) + ": " + e.what());
    }
    return net;
}

Network parse_json_network(std::string_view text, std::optional<std::size_t> input_dim) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return network_from_json(doc, input_dim);
}

Layer parse_json_layer(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return layer_from_json(doc);
}

std::string serialize_json_network(const Network& net) {
    return network_to_json(net).dump();
}

} // namespace syrenn

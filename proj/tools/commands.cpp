#include "commands.hpp"

#include "syrenn/analyses.hpp"
#include "syrenn/error.hpp"
#include "syrenn/serialize.hpp"
#include "syrenn/service.hpp"
#include "syrenn/svg.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <charconv>
#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace syrenn::cli {

namespace {

using Clock = std::chrono::steady_clock;

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) {
    g_interrupted.store(true);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty() || path == "-") {
        fallback << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Network load_network(const NetworkSource& src) {
    const std::string text = read_file(src.path);
    std::string format = src.format;
    if (format == "auto") format = (ends_with(src.path, ".eran") || ends_with(src.path, ".txt")) ? "eran" : "json";
    if (format == "eran") return parse_eran(text);
    if (format == "json") return parse_json_network(text);
    throw ParseError("unknown network format '" + src.format + "'");
}

Point parse_point(const std::string& text) {
    std::vector<double> coords;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string field = text.substr(pos, comma - pos);
        field.erase(0, field.find_first_not_of(" \t"));
        field.erase(field.find_last_not_of(" \t") + 1);
        if (!field.empty() && field.front() == '+') field.erase(0, 1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
            throw ParseError("malformed point '" + text + "'");
        }
        coords.push_back(v);
        pos = comma + 1;
    }
    Point p(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t k = 0; k < coords.size(); ++k) p[static_cast<Eigen::Index>(k)] = coords[k];
    return p;
}

PlanarRegion load_polytope(const std::string& path, const Tolerances& tol) {
    Json doc;
    try {
        doc = Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return validate_region(vertices_from_json(doc), tol);
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Maps library errors onto the documented exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return kResourceError;
    } catch (const GeometryError& e) {
        err << "error: " << e.what() << '\n';
        return kGeometryError;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << '\n';
        return kGeometryError;
    } catch (const BindError& e) {
        err << "error: " << e.what() << '\n';
        return kBindError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kParseError;
    }
}

} // namespace

int run_partitions(const PartitionsArgs& args, const EngineOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Network net = load_network(args.network);
        if (args.polytope.empty() == args.line.empty()) {
            throw ParseError("give exactly one of --polytope or --line");
        }
        const auto t0 = Clock::now();
        if (!args.line.empty()) {
            const auto sep = args.line.find(';');
            if (sep == std::string::npos) throw ParseError("--line must look like \"a;b\"");
            const Point a = parse_point(args.line.substr(0, sep));
            const Point b = parse_point(args.line.substr(sep + 1));
            const SegmentedLine line = symbolic_rep_1d(net, a, b, options);
            write_output(args.out, dump_document(line_to_json(line)), out);
            err << line.segment_count() << " segments in " << seconds_since(t0) << " s\n";
            return kOk;
        }
        const PlanarRegion input = load_polytope(args.polytope, options.tol);
        const PartitionSet2D parts = symbolic_rep_2d(net, input, options);
        write_output(args.out, dump_document(partition_to_json(parts)), out);
        err << parts.regions.size() << " regions in " << seconds_since(t0) << " s\n";
        return kOk;
    });
}

int run_ig(const IgArgs& args, const EngineOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const Network net = load_network(args.network);
        if (args.label >= net.output_dim()) {
            throw ParseError("label " + std::to_string(args.label) + " out of range for " +
                             std::to_string(net.output_dim()) + " outputs");
        }
        const Point input = parse_point(args.input);
        const Point baseline = parse_point(args.baseline);
        const Attribution exact = exact_ig(net, baseline, input, args.label, options);
        Json doc = attribution_to_json(exact);

        const double sum = exact.values.sum();
        const double delta = exact.f_input - exact.f_baseline;
        err << std::setprecision(12) << "completeness: sum(IG) = " << sum << ", f(input) - f(baseline) = " << delta
            << ", gap = " << std::abs(sum - delta) << '\n';

        if (args.compare_sampling > 0) {
            std::vector<std::size_t> ms;
            for (std::size_t m = 1; m <= args.compare_sampling; m *= 10) ms.push_back(m);
            if (ms.back() != args.compare_sampling) ms.push_back(args.compare_sampling);
            Json table = Json::array();
            err << std::setw(10) << "m" << std::setw(18) << "left error" << std::setw(18) << "trapezoid error" << '\n';
            for (std::size_t m : ms) {
                const auto left = sampled_ig(net, baseline, input, args.label, m, RiemannScheme::Left, options);
                const auto trap = sampled_ig(net, baseline, input, args.label, m, RiemannScheme::Trapezoid, options);
                const double le = (left.values - exact.values).lpNorm<Eigen::Infinity>();
                const double te = (trap.values - exact.values).lpNorm<Eigen::Infinity>();
                err << std::setw(10) << m << std::setw(18) << le << std::setw(18) << te << '\n';
                table.push_back(Json{{"m", m},
                                     {"left", point_to_json(left.values)},
                                     {"trapezoid", point_to_json(trap.values)},
                                     {"left_error", le},
                                     {"trapezoid_error", te}});
            }
            doc["sampling"] = std::move(table);
        }
        write_output(args.out, dump_document(doc), out);
        return kOk;
    });
}

int run_classify(const ClassifyArgs& args, const EngineOptions& options, std::ostream& err) {
    return guarded(err, [&] {
        const Network net = load_network(args.network);
        const PlanarRegion input = load_polytope(args.polytope, options.tol);
        std::vector<std::string> palette = default_palette();
        if (!args.colors.empty()) {
            palette.clear();
            std::stringstream ss(args.colors);
            for (std::string c; std::getline(ss, c, ',');) {
                if (!c.empty()) palette.push_back(c);
            }
            if (palette.empty()) throw ParseError("--colors is empty");
        }
        const auto t0 = Clock::now();
        const auto regions = decision_regions(net, input, options);
        write_output(args.svg, render_decision_svg(input, regions, palette), std::cout);
        if (!args.json_out.empty()) write_output(args.json_out, dump_document(labeled_regions_to_json(input, regions)), std::cout);
        err << regions.size() << " regions in " << seconds_since(t0) << " s\n";
        return kOk;
    });
}

int run_serve(const ServeArgs& args, const EngineOptions& options, std::ostream& err) {
    return guarded(err, [&] {
        if (args.port < 0 || args.port > 65535) throw ParseError("port out of range");
        Service service(options);
        TcpServer server(service, static_cast<std::uint16_t>(args.port), args.host);
        g_interrupted = false;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        err << "listening on " << args.host << ':' << server.port() << '\n';
        server.run(&g_interrupted);
        err << "shutting down\n";
        return kOk;
    });
}

int main(int argc, char** argv) {
    CLI::App app{"Exact linear-region analysis of piecewise-linear networks"};
    app.require_subcommand(1);

    int threads = 0;
    if (const char* env = std::getenv("SYRENN_THREADS")) threads = std::atoi(env);
    std::size_t budget = EngineOptions{}.region_budget;
    app.add_option("--threads", threads, "Worker threads (0 = all cores, 1 = deterministic debug mode)")
        ->envname("SYRENN_THREADS");
    app.add_option("--budget", budget, "Maximum number of regions before giving up");

    auto add_network = [](CLI::App* cmd, NetworkSource& src) {
        cmd->add_option("--network", src.path, "Network file")->required();
        cmd->add_option("--format", src.format, "eran | json | auto")->check(CLI::IsMember({"eran", "json", "auto"}));
    };

    PartitionsArgs part;
    auto* partitions = app.add_subcommand("partitions", "Compute the linear pieces over a segment or polygon");
    add_network(partitions, part.network);
    partitions->add_option("--polytope", part.polytope, "JSON file with CCW polygon vertices");
    partitions->add_option("--line", part.line, "Segment \"a;b\", coordinates comma-separated");
    partitions->add_option("--out", part.out, "Output JSON path (default stdout)");

    IgArgs ig;
    auto* ig_cmd = app.add_subcommand("ig", "Exact Integrated Gradients");
    add_network(ig_cmd, ig.network);
    ig_cmd->add_option("--input", ig.input, "Input point, comma-separated")->required();
    ig_cmd->add_option("--baseline", ig.baseline, "Baseline point, comma-separated")->required();
    ig_cmd->add_option("--label", ig.label, "Output index")->required();
    ig_cmd->add_option("--compare-sampling", ig.compare_sampling, "Compare left/trapezoid sampling up to m samples");
    ig_cmd->add_option("--out", ig.out, "Output JSON path (default stdout)");

    ClassifyArgs cls;
    auto* classify = app.add_subcommand("classify", "Render exact decision regions to SVG");
    add_network(classify, cls.network);
    classify->add_option("--polytope", cls.polytope, "JSON file with CCW polygon vertices")->required();
    classify->add_option("--svg", cls.svg, "Output SVG path")->required();
    classify->add_option("--colors", cls.colors, "Comma-separated fill colours indexed by label");
    classify->add_option("--json", cls.json_out, "Also write labeled regions as JSON");

    ServeArgs serve_args;
    if (const char* env = std::getenv("SYRENN_PORT")) serve_args.port = std::atoi(env);
    auto* serve = app.add_subcommand("serve", "Run the line-delimited JSON analysis service");
    serve->add_option("--port", serve_args.port, "TCP port")->envname("SYRENN_PORT");
    serve->add_option("--host", serve_args.host, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParseError;
    }

    EngineOptions options;
    options.threads = threads;
    options.region_budget = budget;
    if (*partitions) return run_partitions(part, options, std::cout, std::cerr);
    if (*ig_cmd) return run_ig(ig, options, std::cout, std::cerr);
    if (*classify) return run_classify(cls, options, std::cerr);
    return run_serve(serve_args, options, std::cerr);
}

} // namespace syrenn::cli

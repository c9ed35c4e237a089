#pragma once

#include "syrenn/core.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>

namespace syrenn::cli {

enum ExitCode : int {
    kOk = 0,
    kParseError = 1,
    kGeometryError = 2,
    kResourceError = 3,
    kBindError = 4,
};

struct NetworkSource {
    std::string path;
    std::string format = "auto"; // eran | json | auto (by extension)
};

struct PartitionsArgs {
    NetworkSource network;
    std::string polytope; // path to a JSON vertex list
    std::string line;     // "a;b" with comma-separated coordinates
    std::string out;      // empty: stdout
};

struct IgArgs {
    NetworkSource network;
    std::string input;
    std::string baseline;
    std::size_t label = 0;
    std::size_t compare_sampling = 0;
    std::string out;
};

struct ClassifyArgs {
    NetworkSource network;
    std::string polytope;
    std::string svg;
    std::string colors; // comma-separated; empty: default palette
    std::string json_out;
};

struct ServeArgs {
    int port = 7878;
    std::string host = "127.0.0.1";
};

int run_partitions(const PartitionsArgs& args, const EngineOptions& options, std::ostream& out, std::ostream& err);
int run_ig(const IgArgs& args, const EngineOptions& options, std::ostream& out, std::ostream& err);
int run_classify(const ClassifyArgs& args, const EngineOptions& options, std::ostream& err);
int run_serve(const ServeArgs& args, const EngineOptions& options, std::ostream& err);

/// Full command line entry point.
int main(int argc, char** argv);

} // namespace syrenn::cli

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

namespace minsurf::cli {

using Json = nlohmann::ordered_json;

struct RunConfig {
    std::string command;
    std::optional<double> sigma;
    std::optional<double> lambda;
    double e = 0.1;
    int nr = 40;
    int nt = 60;
    int copies = 1;
    unsigned seed = 7;
    double warp = 1.0;
    std::map<std::string, double> tolerances;
    std::string out_dir = "out";
    std::string format = "obj";
    std::string json_path;
    int print_p = -1;
    int n = 1;
    int samples = 60;
};

// Parses "NRxNT"; throws ConfigError.
std::pair<int, int> parse_grid(const std::string& text);
// Parses "name=value" with value > 0; throws ConfigError.
std::pair<std::string, double> parse_tolerance(const std::string& text);

// Validates the lambda/sigma pair and returns sigma.
double resolve_sigma(const RunConfig& cfg);

Json cmd_generate(const RunConfig& cfg);
Json cmd_verify(const RunConfig& cfg);
Json cmd_kdv(const RunConfig& cfg, std::ostream& text);

bool report_passed(const Json& report);

}  // namespace minsurf::cli

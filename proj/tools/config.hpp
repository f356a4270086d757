#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsallis/pricing.hpp"

namespace tsallis::app {

// Raised for malformed scenario files; the message carries file, line and field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ClaimConfig {
    std::string name;
    std::map<std::string, double> params;
    std::string expr;
};

struct EntropyMeasure {
    std::string label;
    std::vector<double> alpha;  // constant loading on W_perp (n entries)
};

struct EntropyConfig {
    std::vector<double> qs{0.5, 2.0};
    std::vector<EntropyMeasure> measures;
    std::optional<double> kl_delta;
    std::vector<double> submartingale_times;  // fractions of T
    std::size_t inner = 256;
    std::size_t outer = 2000;
    std::size_t keep_every = 1;
};

struct SweepConfig {
    std::vector<double> gammas{0.01, 0.1, 1.0, 10.0, 100.0};
    std::vector<double> kappas{0.5, 2.0};
};

struct OutputConfig {
    std::string report = "report.json";
    std::string table = "table.csv";
    std::string surface;  // empty: no surface export
    std::size_t surface_stride = 4;
};

struct ScenarioConfig {
    PricingSetup setup;
    double q = 2.0;
    double gamma = 1.0;
    ClaimConfig claim;
    EntropyConfig entropy;
    bool dual_grids = true;
    SweepConfig sweep;
    OutputConfig outputs;
    std::string source;  // file the scenario was read from

    QGammaParams params() const { return QGammaParams(q, gamma); }
    Claim make_claim() const;
};

ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<string>");

}  // namespace tsallis::app

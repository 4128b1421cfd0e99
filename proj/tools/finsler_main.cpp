// finsler <subcommand> --config <path> [--out <path>] [--format json]
//
// Subcommands: check, gram, cone, probe-closure, lie, lightspeed, derive.
// FINSLER_SEED overrides the configured rng_seed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "finsler/run.hpp"

namespace {

std::optional<std::uint64_t> env_seed_override() {
    const char* s = std::getenv("FINSLER_SEED");
    if (!s || !*s) return std::nullopt;
    try {
        return std::stoull(s);
    } catch (...) {
        std::cerr << "warning: ignoring non-numeric FINSLER_SEED\n";
        return std::nullopt;
    }
}

int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::string& out_path) {
    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "error: cannot read config file: " << config_path << "\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    finsler::RunResult result = finsler::run(name, buf.str(), env_seed_override());
    std::string serialized = result.report.serialize();
    if (out_path.empty()) {
        std::cout << serialized;
    } else {
        // write once, atomically: temp file then rename
        std::string tmp = out_path + ".tmp";
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << serialized;
        out.close();
        if (!out || std::rename(tmp.c_str(), out_path.c_str()) != 0) {
            std::cerr << "error: cannot write report to " << out_path << "\n";
            return 2;
        }
    }
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finsler: direction-dependent metrics, orthogonalization and motion probes"};
    app.require_subcommand(1);

    const char* names[] = {"check", "gram", "cone", "probe-closure", "lie", "lightspeed",
                           "derive"};
    const char* descriptions[] = {
        "Euler-identity and finite-difference sweeps over random points",
        "orthogonalize a seed basis and verify the triangular structure",
        "split into spacelike/timelike orthonormal parts",
        "seeded search for motion pairs whose chain leaves the basis manifold",
        "infinitesimal-motion space and scalar-product defect sweep",
        "propagation-time constancy over random spatial directions",
        "metric and Cartan tensors at a point"};

    struct Sub {
        CLI::App* cmd;
        std::string config;
        std::string out;
        std::string format = "json";
    };
    std::vector<Sub> subs(std::size(names));
    for (std::size_t i = 0; i < std::size(names); ++i) {
        Sub& s = subs[i];
        s.cmd = app.add_subcommand(names[i], descriptions[i]);
        s.cmd->add_option("--config", s.config, "path to the YAML run configuration")
            ->required();
        s.cmd->add_option("--out", s.out, "write the report here instead of stdout");
        s.cmd->add_option("--format", s.format, "report format (json)")
            ->check(CLI::IsMember({"json"}));
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < std::size(names); ++i)
        if (subs[i].cmd->parsed()) return run_subcommand(names[i], subs[i].config, subs[i].out);
    return 2;
}

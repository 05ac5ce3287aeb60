// Command-line front end: every subcommand builds a ProblemSpec and hands it
// to dcp::run, which owns solving, certificates, artifacts, and exit codes.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "dcp/errors.hpp"
#include "dcp/io.hpp"

namespace {

struct CommonArgs {
    std::string mesh;
    std::string lengths;
    std::string output;
    std::string report;
    std::vector<std::string> theta;  // "vertex=angle"
    std::vector<std::string> u;      // "vertex=value"
    double tol = -1;
    int max_iter = -1;
    std::string gauge = "default";
    int apex = -1;
    unsigned seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_mesh = true) {
    if (with_mesh)
        cmd->add_option("mesh", args.mesh, "input OBJ mesh")->required();
    cmd->add_option("--lengths", args.lengths,
                    "CSV edge-length table (rows i,j,length); replaces the "
                    "embedded metric");
    cmd->add_option("-o,--output", args.output, "output mesh path");
    cmd->add_option("--report", args.report, "write the JSON report here");
    cmd->add_option("--theta", args.theta,
                    "prescribed angle sum, vertex=angle (pi-literals allowed)");
    cmd->add_option("--u", args.u, "prescribed scale factor, vertex=value");
    cmd->add_option("--tol", args.tol, "gradient tolerance");
    cmd->add_option("--max-iter", args.max_iter, "Newton iteration cap");
    cmd->add_option("--gauge", args.gauge, "fix-one | project | none | default");
    cmd->add_option("--apex", args.apex, "apex / distinguished vertex");
    cmd->add_option("--seed", args.seed, "random seed recorded in the report");
}

std::pair<int, std::string> split_assignment(const std::string& text) {
    size_t eq = text.find('=');
    if (eq == std::string::npos)
        throw dcp::ValidationError("expected vertex=value, got '" + text + "'");
    return {std::stoi(text.substr(0, eq)), text.substr(eq + 1)};
}

dcp::ProblemSpec to_spec(const std::string& command, const CommonArgs& args) {
    dcp::ProblemSpec spec;
    spec.command = command;
    spec.mesh_path = args.mesh;
    if (!args.lengths.empty()) {
        spec.metric_source = dcp::MetricSource::EdgeLengthTable;
        spec.length_table_path = args.lengths;
    }
    spec.output_mesh_path = args.output;
    spec.report_path = args.report;
    spec.apex = args.apex;
    spec.seed = args.seed;
    for (const auto& entry : args.theta) {
        auto [v, value] = split_assignment(entry);
        spec.theta[v] = dcp::parse_angle(value);
    }
    for (const auto& entry : args.u) {
        auto [v, value] = split_assignment(entry);
        spec.u_fixed[v] = std::stod(value);
    }
    if (args.tol > 0) spec.solver.grad_tol = args.tol;
    if (args.max_iter > 0) spec.solver.max_iterations = args.max_iter;
    if (args.gauge == "fix-one")
        spec.solver.gauge = dcp::SolverConfig::Gauge::FixOneVertex;
    else if (args.gauge == "project")
        spec.solver.gauge = dcp::SolverConfig::Gauge::ProjectOutConstants;
    else if (args.gauge != "default" && args.gauge != "none")
        throw dcp::ValidationError("unknown gauge '" + args.gauge + "'");
    return spec;
}

int execute(const dcp::ProblemSpec& spec) {
    dcp::RunArtifacts art = dcp::run(spec);
    if (spec.report_path.empty()) std::cout << art.report << '\n';
    return art.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete conformal mapping toolbox"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
    };
    static const Sub subs[] = {
        {"flatten", "flatten a disk with prescribed angle sums"},
        {"rectangle", "map a disk onto a rectangle"},
        {"disk", "map a disk onto the unit disk"},
        {"sphere", "map a triangulated sphere onto the unit sphere"},
        {"uniformize", "hyperbolic uniformization of a genus >= 2 surface"},
        {"circle-pattern", "solve for prescribed circumcircle intersection angles"},
        {"circular-mesh", "conformal solve on a circular polyhedral surface"},
        {"circle-domain", "map a multiply connected surface onto a circle domain"},
        {"realize-polyhedron", "realize Penner coordinates as an ideal polyhedron"},
        {"verify", "check solvability conditions and the product condition"},
    };

    std::map<std::string, CommonArgs> args;
    std::map<std::string, CLI::App*> cmds;
    for (const auto& sub : subs) {
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        add_common(cmd, args[sub.name]);
        cmds[sub.name] = cmd;
    }
    std::vector<int> corners;
    cmds["rectangle"]
        ->add_option("--corners", corners, "four boundary corner vertices")
        ->expected(4)
        ->required();
    std::vector<std::string> phi;
    cmds["circle-pattern"]->add_option(
        "--phi", phi, "intersection angle, i,j=angle (pi-literals allowed)");

    std::string spec_path;
    CLI::App* run_cmd = app.add_subcommand("run", "execute a JSON problem spec");
    run_cmd->add_option("spec", spec_path, "problem spec JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return execute(dcp::read_problem_spec(spec_path));
        for (const auto& sub : subs) {
            if (!cmds[sub.name]->parsed()) continue;
            dcp::ProblemSpec spec = to_spec(sub.name, args[sub.name]);
            spec.corners = corners;
            for (const auto& entry : phi) {
                size_t comma = entry.find(',');
                size_t eq = entry.find('=');
                if (comma == std::string::npos || eq == std::string::npos ||
                    comma > eq)
                    throw dcp::ValidationError("expected i,j=angle, got '" + entry +
                                               "'");
                int a = std::stoi(entry.substr(0, comma));
                int b = std::stoi(entry.substr(comma + 1, eq - comma - 1));
                spec.phi[{std::min(a, b), std::max(a, b)}] =
                    dcp::parse_angle(entry.substr(eq + 1));
            }
            return execute(spec);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

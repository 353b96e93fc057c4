#include "optomem/app/commands.hpp"

#include "optomem/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <ostream>

namespace optomem::app {

namespace {

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    long long seed = -1;
    std::string direction = "both";
    std::string branch;
    int points = 0;
};

int execute(const std::string& command, const Options& opt, std::ostream& out, std::ostream& err) {
    RawConfig raw = opt.config.empty() ? RawConfig{} : load_config_file(opt.config);
    for (const auto& s : opt.sets) apply_override(raw, s);
    if (opt.seed >= 0) apply_override(raw, "seed=" + std::to_string(opt.seed));
    if (!opt.branch.empty()) apply_override(raw, "branch=" + opt.branch);
    if (opt.points > 0) {
        const std::string n = std::to_string(opt.points);
        if (command == "mode") apply_override(raw, "mode_points=" + n);
        if (command == "scan") apply_override(raw, "scan_points=" + n);
        if (command == "sweep") apply_override(raw, "sweep_points=" + n);
    }
    const RunConfig rc = resolve(raw);

    std::ofstream file;
    if (!opt.out.empty()) {
        file.open(opt.out, std::ios::binary | std::ios::trunc);
        if (!file) throw ConfigError("cannot open output file '" + opt.out + "'");
    }
    std::ostream& sink = opt.out.empty() ? out : file;
    int status = exit_ok;

    if (command == "mode") {
        write_csv(sink, rc, command, {}, mode_table(rc));
    } else if (command == "steady") {
        const auto sols = solve_operating_points(rc);
        write_csv(sink, rc, command, {"solutions=" + std::to_string(sols.size())}, steady_table(rc, sols));
    } else if (command == "scan") {
        ScanRequest req = ScanRequest::both;
        if (opt.direction == "up") req = ScanRequest::up;
        else if (opt.direction == "down") req = ScanRequest::down;
        else if (opt.direction != "both") throw ConfigError("--direction must be up, down or both");
        const auto traces = run_scan(rc, req);
        write_csv(sink, rc, command, {"direction=" + opt.direction}, scan_table(rc, traces));
    } else if (command == "sweep") {
        const auto records = run_sweep(raw, rc);
        int bad = 0;
        for (const auto& r : records) bad += r.status != "ok";
        write_csv(sink, rc, command, {"points_not_ok=" + std::to_string(bad)}, sweep_table(rc, records));
    } else if (command == "verify") {
        const VerifyReport rep = run_verify(rc);
        std::string verdict = rep.unstable ? "unstable" : rep.passed() ? "pass" : "fail";
        write_csv(sink, rc, command, {"verdict=" + verdict}, verify_table(rep));
        if (rep.unstable) {
            err << "verify: configuration is dynamically unstable\n";
            status = exit_unstable;
        } else if (!rep.passed()) {
            for (const auto& c : rep.checks) {
                if (c.status == "fail") err << "verify: failed check " << c.name << " (value " << c.value
                                            << ", tolerance " << c.tolerance << ")\n";
            }
            status = exit_numerical;
        }
    }
    sink.flush();
    if (!sink) throw Error("error writing output");
    return status;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steady states, bistability and quantum fluctuations of a membrane-in-the-middle cavity",
                 "optomem"};
    app.require_subcommand(1);
    Options opt;
    app.add_option("--config", opt.config, "key = value parameter file");
    app.add_option("--set", opt.sets, "override one parameter, key=value (repeatable)");
    app.add_option("--out", opt.out, "write CSV here instead of stdout");
    app.add_option("--seed", opt.seed, "Monte Carlo seed")->check(CLI::NonNegativeNumber);
    app.add_option("--branch", opt.branch, "initial branch: lower or upper")
        ->check(CLI::IsMember({"lower", "upper"}));
    app.add_option("--points", opt.points, "number of grid points")->check(CLI::PositiveNumber);
    app.fallthrough();

    app.add_subcommand("mode", "mode frequency and absorption over one lambda/2 period");
    app.add_subcommand("steady", "all steady states at the configured drive");
    auto* scan = app.add_subcommand("scan", "adiabatic laser-frequency scan");
    scan->add_option("--direction", opt.direction, "up, down or both")
        ->check(CLI::IsMember({"up", "down", "both"}));
    app.add_subcommand("sweep", "phonon number and entanglement along a parameter sweep");
    app.add_subcommand("verify", "invariant and oracle checks at the operating point");
    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    std::vector<const char*> argv;
    argv.push_back("optomem");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "optomem: " << e.what() << '\n';
        return exit_config;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return execute(command, opt, out, err);
    } catch (const ConfigError& e) {
        err << "optomem: config error: " << e.what() << '\n';
        return exit_config;
    } catch (const InvalidParameter& e) {
        err << "optomem: invalid parameter: " << e.what() << '\n';
        return exit_config;
    } catch (const InstabilityError& e) {
        err << "optomem: unstable: " << e.what() << '\n';
        return exit_unstable;
    } catch (const NoStableSolution& e) {
        err << "optomem: unstable: " << e.what() << '\n';
        return exit_unstable;
    } catch (const Error& e) {
        err << "optomem: numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        err << "optomem: " << e.what() << '\n';
        return exit_failure;
    }
}

}  // namespace optomem::app

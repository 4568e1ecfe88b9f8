// bhpm: batch front-end for the WKB pseudomode lab.
#include "commands.hpp"

#include "CLI11.hpp"

#include <functional>
#include <iostream>
#include <map>

using namespace bhpm;
using namespace bhpm::cli;

namespace {

struct Sub {
    const char* name;
    const char* help;
    CommandResult (*run)(const Config&);
};

const Sub kSubs[] = {
    {"verify-transport", "check that phi_{-1..3} vanish at random points", cmd_verify_transport},
    {"pseudomode", "build one pseudomode: profile CSV and report JSON", cmd_pseudomode},
    {"sweep", "residual ratios over an (alpha, beta, N) grid", cmd_sweep},
    {"fit", "decay exponents from a sweep CSV or a fresh sweep", cmd_fit},
    {"region", "region boundary curves as CSV and SVG", cmd_region},
    {"check-assumptions", "sample the assumption conditions of a potential", cmd_check_assumptions},
    {"semiclassical", "residual ratios over a geometric h list at fixed z", cmd_semiclassical},
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bhpm: WKB pseudomodes for d^4/dx^4 + V with complex V"};
    app.set_version_flag("--version", std::string("bhpm ") + kVersion);
    app.require_subcommand(1);

    // per subcommand: config file, key=value overrides, and a few shorthands
    struct Opts {
        std::string config, out, potential;
        std::vector<std::string> sets;
        int threads = -1;
        long long seed = -1;
    };
    std::map<std::string, Opts> opts;
    for (const Sub& s : kSubs) {
        auto* sc = app.add_subcommand(s.name, s.help);
        Opts& o = opts[s.name];
        sc->add_option("-c,--config", o.config, "key = value config file")->check(CLI::ExistingFile);
        sc->add_option("-o,--out", o.out, "output path prefix");
        sc->add_option("-p,--potential", o.potential, "potential id, e.g. arctan or poly:gamma=2");
        sc->add_option("-j,--threads", o.threads, "worker threads (0: all cores)");
        sc->add_option("--seed", o.seed, "seed for random sampling");
        sc->add_option("overrides", o.sets, "key=value settings applied after the config file");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (const Sub& s : kSubs) {
        auto* sc = app.get_subcommand(s.name);
        if (!sc->parsed()) continue;
        const Opts& o = opts[s.name];
        try {
            Config c = o.config.empty() ? Config{} : Config::load(o.config);
            for (const auto& kv : o.sets) c.set(kv);
            if (!o.out.empty()) c.set("out", o.out);
            if (!o.potential.empty()) c.set("potential", o.potential);
            if (o.threads >= 0) c.set("threads", std::to_string(o.threads));
            if (o.seed >= 0) c.set("seed", std::to_string(o.seed));

            const CommandResult r = s.run(c);
            write_outputs(r);
            for (const auto& f : r.files) std::cout << "wrote " << f.path << "\n";
            if (!r.summary.empty()) std::cout << r.summary << "\n";
            return r.exit_code;
        } catch (const Error& e) {
            std::cerr << "bhpm " << s.name << ": " << to_string(e.kind()) << " error: " << e.what() << "\n";
            return exit_code_for(e.kind());
        } catch (const std::exception& e) {
            std::cerr << "bhpm " << s.name << ": " << e.what() << "\n";
            return 1;
        }
    }
    return 2;
}

#include "mlyap/cli/cli.hpp"

#include <algorithm>
#include <ostream>
#include <vector>

#include "commands.hpp"
#include "mlyap/error.hpp"
#include "options.hpp"

namespace mlyap::cli {

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Lyapunov exponents of the Milstein scheme for a stochastic oscillator", "mlyap"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mlyap 0.1.0");

    Options opts;
    struct Sub {
        CLI::App* app;
        Registry fields;
        int (*run)(const Options&, std::ostream&, std::ostream&);
    };
    std::vector<Sub> subs;
    auto add = [&](const char* name, const char* help, unsigned mask, auto fn) {
        CLI::App* sub = app.add_subcommand(name, help);
        subs.push_back({sub, register_flags(*sub, opts, mask), fn});
    };
    add("simulate", "simulate paths and write log|Z_n| per step", kModel | kDt | kScheme, &cmd_simulate);
    add("exponent", "estimate one discrete Lyapunov exponent", kModel | kDt | kScheme | kEstimator, &cmd_exponent);
    add("sweep-dt", "estimate the exponent over step sizes and fit the convergence order",
        kModel | kScheme | kEstimator | kDts, &cmd_sweep_dt);
    add("region", "almost-sure stability boundary in the (sigma, epsilon) plane", kLambda | kSigmaRange,
        &cmd_region);
    add("verify", "run the lemma, moment and closed-form verification suites",
        kModel | kDt | kScheme | kEstimator | kSuite, &cmd_verify);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    for (const Sub& sub : subs) {
        if (!sub.app->parsed())
            continue;
        try {
            apply_config_file(sub.fields, opts);
            return sub.run(opts, out, err);
        } catch (const ConfigError& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfigError;
        } catch (const PreconditionError& e) {
            err << "error: " << e.what() << '\n';
            return kExitConfigError;
        }
    }
    return kExitConfigError;
}

} // namespace mlyap::cli

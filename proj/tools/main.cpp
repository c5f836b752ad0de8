#include <charconv>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cylsim/config.hpp"
#include "cylsim/workflows.hpp"

namespace {

double parse_number(const std::string& text, const char* what) {
    double out = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || text.empty()) {
        throw cylsim::ParseError(std::string("expected a number for ") + what +
                                 ", got '" + text + "'");
    }
    return out;
}

cylsim::DisturbanceSpec parse_disturb(const std::string& value) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = value.find(',', start);
        if (pos == std::string::npos) {
            parts.push_back(value.substr(start));
            break;
        }
        parts.push_back(value.substr(start, pos - start));
        start = pos + 1;
    }
    if (parts.size() != 3 && parts.size() != 4) {
        throw cylsim::ParseError(
            "--disturb expects joint,start,magnitude[,duration], got '" + value +
            "'");
    }
    cylsim::DisturbanceSpec spec;
    spec.joint = static_cast<int>(parse_number(parts[0], "--disturb joint"));
    spec.start = parse_number(parts[1], "--disturb start");
    spec.magnitude = parse_number(parts[2], "--disturb magnitude");
    if (parts.size() == 4) {
        spec.duration = parse_number(parts[3], "--disturb duration");
    }
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "cylsim: closed-loop simulation of a 3-DOF cylindrical arm under "
        "sliding-mode control, with a genetic gain optimizer"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string gains_src;
    std::string gains_a_src;
    std::string gains_b_src;
    std::string disturb_csv;
    std::uint64_t seed = 1;
    double dt = 0.0;
    double t_final = 0.0;
    int workers = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "flat `key = value` config file");
        sub->add_option("--out", out_dir, "output directory (default '.')");
        sub->add_option("--seed", seed, "optimizer random seed");
        sub->add_option("--disturb", disturb_csv,
                        "enable a disturbance: joint,start,magnitude[,duration]");
        sub->add_option("--dt", dt, "integration step in seconds");
        sub->add_option("--t-final", t_final, "simulation horizon in seconds");
        sub->add_option("--workers", workers,
                        "fitness evaluation threads (0 = hardware count)");
    };

    CLI::App* sim = app.add_subcommand(
        "simulate", "one closed-loop run; writes trace.csv and summary.txt");
    CLI::App* opt = app.add_subcommand(
        "optimize",
        "genetic gain search; writes ga_history.csv and best_gains.cfg");
    CLI::App* cmp = app.add_subcommand(
        "compare",
        "run two gain sets under the same disturbance; writes trace_a.csv, "
        "trace_b.csv and compare.txt");
    for (CLI::App* sub : {sim, opt, cmp}) add_common(sub);

    const char* gains_help =
        "gain source: 'table2', 'baseline', nine comma-separated values, or a "
        "config file path";
    sim->add_option("--gains", gains_src, gains_help);
    opt->add_option("--gains", gains_src, gains_help);
    cmp->add_option("--gains", gains_src,
                    "gain source for side A (shorthand for --gains-a)");
    cmp->add_option("--gains-a", gains_a_src, gains_help);
    cmp->add_option("--gains-b", gains_b_src, gains_help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        cylsim::RunConfig cfg;
        if (active->count("--config") > 0) cfg = cylsim::load_config(config_path);
        if (active->count("--out") > 0) cfg.out_dir = out_dir;
        if (active->count("--seed") > 0) cfg.ga.seed = seed;
        if (active->count("--dt") > 0) cfg.sim.dt = dt;
        if (active->count("--t-final") > 0) cfg.sim.t_final = t_final;
        if (active->count("--workers") > 0) cfg.ga.workers = workers;
        if (active->count("--disturb") > 0) {
            cfg.sim.disturbance = parse_disturb(disturb_csv);
        }
        if (active->count("--gains") > 0) {
            const auto gains = cylsim::resolve_gains_source(gains_src);
            if (active == cmp) {
                cfg.gains_a = gains;
            } else {
                cfg.gains = gains;
            }
        }
        if (active == cmp) {
            if (active->count("--gains-a") > 0) {
                cfg.gains_a = cylsim::resolve_gains_source(gains_a_src);
            }
            if (active->count("--gains-b") > 0) {
                cfg.gains_b = cylsim::resolve_gains_source(gains_b_src);
            }
        }
        cfg.validate();

        if (active == sim) {
            cylsim::cmd_simulate(cfg);
        } else if (active == opt) {
            cylsim::cmd_optimize(cfg);
        } else {
            cylsim::cmd_compare(cfg);
        }
        return 0;
    } catch (const cylsim::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cylsim::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cylsim::GainDomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const cylsim::SingularMassMatrix& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return 3;
    } catch (const cylsim::NonFiniteState& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

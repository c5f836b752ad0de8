#include "cylsim/workflows.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "cylsim/csv.hpp"

namespace cylsim {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_out_dir(const std::string& dir) {
    std::filesystem::create_directories(dir);
}

std::string gains_line(const std::array<double, 9>& genes) {
    std::string out;
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (i > 0) out += ',';
        out += format_exact(genes[i]);
    }
    return out;
}

std::string summary_text(const SimResult& result) {
    const SimMetrics& m = result.metrics;
    std::string out;
    out += "rows: " + std::to_string(result.rows.size()) + "\n";
    out += "ise: " + format_g9(m.ise) + "\n";
    out += "e_max_1: " + format_g9(m.e_max[0]) + "\n";
    out += "e_max_2: " + format_g9(m.e_max[1]) + "\n";
    out += "e_max_3: " + format_g9(m.e_max[2]) + "\n";
    out += "emax_window_start: " + format_g9(m.emax_window_start) + "\n";
    out += "lyapunov_violation_fraction: " +
           format_g9(m.lyapunov_violation_fraction) + "\n";
    out += "min_abs_det: " + format_g9(m.min_abs_det) + "\n";
    out += "max_cond: " + format_g9(m.max_cond) + "\n";
    out += "det_sign_flips: " + std::to_string(m.det_sign_flips) + "\n";
    return out;
}

}  // namespace

void cmd_simulate(const RunConfig& cfg) {
    cfg.validate();
    ensure_out_dir(cfg.out_dir);

    const SimResult result =
        simulate(SmcGains::from_genes(cfg.gains), cfg.sim, cfg.params);

    write_file(join_path(cfg.out_dir, "trace.csv"), trace_csv(result));
    const std::string summary = summary_text(result);
    write_file(join_path(cfg.out_dir, "summary.txt"), summary);
    std::cout << summary;
}

void cmd_optimize(const RunConfig& cfg) {
    cfg.validate();
    ensure_out_dir(cfg.out_dir);

    const GaReport report = run_ga(cfg.ga, cfg.fitness_sim(), cfg.params);

    write_file(join_path(cfg.out_dir, "ga_history.csv"), ga_history_csv(report));

    std::string best_cfg;
    best_cfg += "# best_fitness: " + format_g9(report.best.fitness.value()) + "\n";
    best_cfg += "# generations_used: " + std::to_string(report.generations_used) + "\n";
    best_cfg += std::string("# converged: ") +
                (report.converged ? "true" : "false") + "\n";
    best_cfg += "gains = " + gains_line(report.best.genes) + "\n";
    write_file(join_path(cfg.out_dir, "best_gains.cfg"), best_cfg);

    std::ostringstream os;
    os << "generations_used: " << report.generations_used << "\n"
       << "converged: " << (report.converged ? "true" : "false") << "\n"
       << "best_fitness: " << format_g9(report.best.fitness.value()) << "\n"
       << "best_gains: " << gains_line(report.best.genes) << "\n"
       << "penalties_gain_domain: " << report.penalties_gain_domain << "\n"
       << "penalties_sim_failure: " << report.penalties_sim_failure << "\n";
    std::cout << os.str();
}

void cmd_compare(const RunConfig& cfg) {
    cfg.validate();
    if (!cfg.sim.disturbance) {
        throw ValidationError("compare requires an enabled disturbance");
    }
    ensure_out_dir(cfg.out_dir);

    const SimResult result_a =
        simulate(SmcGains::from_genes(cfg.gains_a), cfg.sim, cfg.params);
    const SimResult result_b =
        simulate(SmcGains::from_genes(cfg.gains_b), cfg.sim, cfg.params);

    write_file(join_path(cfg.out_dir, "trace_a.csv"), trace_csv(result_a));
    write_file(join_path(cfg.out_dir, "trace_b.csv"), trace_csv(result_b));

    const double window = cfg.sim.disturbance->start;
    const Vec3 peak_a = max_abs_error(result_a, window);
    const Vec3 peak_b = max_abs_error(result_b, window);

    bool window_has_rows = false;
    for (const SimRow& row : result_a.rows) {
        if (row.t >= window - 1e-12) {
            window_has_rows = true;
            break;
        }
    }

    std::string out;
    out += "disturbance_joint: " + std::to_string(cfg.sim.disturbance->joint) + "\n";
    out += "disturbance_start: " + format_g9(window) + "\n";
    out += "disturbance_magnitude: " +
           format_g9(cfg.sim.disturbance->magnitude) + "\n";
    if (!window_has_rows) {
        out += "note: no disturbance window (start is past the end of the run)\n";
    }
    for (int i = 0; i < 3; ++i) {
        const char* winner = "tie";
        if (peak_a[i] < peak_b[i]) winner = "a";
        else if (peak_b[i] < peak_a[i]) winner = "b";
        out += "joint " + std::to_string(i + 1) + ": peak_e_a=" +
               format_g9(peak_a[i]) + " peak_e_b=" + format_g9(peak_b[i]) +
               " winner=" + winner + "\n";
    }
    write_file(join_path(cfg.out_dir, "compare.txt"), out);
    std::cout << out;
}

}  // namespace cylsim

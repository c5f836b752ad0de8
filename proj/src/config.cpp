#include "cylsim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace cylsim {

namespace {

std::string_view trim(std::string_view sv) {
    const char* ws = " \t\r\n";
    const std::size_t begin = sv.find_first_not_of(ws);
    if (begin == std::string_view::npos) return {};
    const std::size_t end = sv.find_last_not_of(ws);
    return sv.substr(begin, end - begin + 1);
}

bool to_double(std::string_view sv, double& out) {
    const char* first = sv.data();
    const char* last = sv.data() + sv.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !sv.empty();
}

bool to_int(std::string_view sv, int& out) {
    const char* first = sv.data();
    const char* last = sv.data() + sv.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !sv.empty();
}

bool to_uint64(std::string_view sv, std::uint64_t& out) {
    const char* first = sv.data();
    const char* last = sv.data() + sv.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && !sv.empty();
}

/// Context for error messages while walking one file.
struct LineContext {
    const std::string& name;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << name << ":" << line << ": " << msg;
        throw ParseError(os.str());
    }

    double num(std::string_view key, std::string_view value) const {
        double out = 0.0;
        if (!to_double(value, out)) {
            fail("expected a number for key '" + std::string(key) + "', got '" +
                 std::string(value) + "'");
        }
        return out;
    }

    int integer(std::string_view key, std::string_view value) const {
        int out = 0;
        if (!to_int(value, out)) {
            fail("expected an integer for key '" + std::string(key) +
                 "', got '" + std::string(value) + "'");
        }
        return out;
    }

    std::uint64_t unsigned64(std::string_view key, std::string_view value) const {
        std::uint64_t out = 0;
        if (!to_uint64(value, out)) {
            fail("expected an unsigned integer for key '" + std::string(key) +
                 "', got '" + std::string(value) + "'");
        }
        return out;
    }

    bool boolean(std::string_view key, std::string_view value) const {
        if (value == "true" || value == "1") return true;
        if (value == "false" || value == "0") return false;
        fail("expected true/false for key '" + std::string(key) + "', got '" +
             std::string(value) + "'");
    }
};

std::vector<std::string_view> split(std::string_view sv, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = sv.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(sv.substr(start));
            return parts;
        }
        parts.push_back(sv.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::array<double, 9> parse_gains_value(const std::string& value) {
    const std::string_view sv = trim(value);
    if (sv == "table2") return kTable2Gains;
    if (sv == "baseline") return kBaselineGains;

    const std::vector<std::string_view> parts = split(sv, ',');
    if (parts.size() != 9) {
        throw ParseError(
            "gains must be 'table2', 'baseline' or nine comma-separated "
            "numbers, got '" +
            value + "'");
    }
    std::array<double, 9> out{};
    for (std::size_t i = 0; i < 9; ++i) {
        if (!to_double(trim(parts[i]), out[i])) {
            throw ParseError("gains entry " + std::to_string(i + 1) +
                             " is not a number: '" + std::string(trim(parts[i])) +
                             "'");
        }
    }
    return out;
}

SimConfig RunConfig::fitness_sim() const {
    SimConfig s = sim;
    s.dt = fitness_dt;
    s.t_final = fitness_t_final;
    s.disturbance.reset();
    s.record_stride = 1;
    s.emax_window_start = 0.0;
    return s;
}

void RunConfig::validate() const {
    params.validate();
    sim.validate();
    ga.validate();
    if (!(fitness_dt > 0.0) || !std::isfinite(fitness_dt)) {
        throw ValidationError("fitness_dt must be finite and > 0");
    }
    if (!(fitness_t_final > 0.0) || !std::isfinite(fitness_t_final)) {
        throw ValidationError("fitness_t_final must be finite and > 0");
    }
    fitness_sim().validate();
    if (out_dir.empty()) throw ValidationError("out_dir must not be empty");
}

RunConfig parse_config(const std::string& text, const std::string& name) {
    RunConfig cfg;
    DisturbanceSpec disturb;   // staged; applied when enabled
    bool disturb_enabled = false;
    LineContext ctx{name};

    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
        ++ctx.line;
        std::string_view line = raw;
        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            ctx.fail("expected 'key = value', got '" + std::string(line) + "'");
        }
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (key.empty()) ctx.fail("empty key");
        if (value.empty()) ctx.fail("empty value for key '" + key + "'");
        cfg.keys_set.insert(key);

        if (key == "m1") cfg.params.m1 = ctx.num(key, value);
        else if (key == "m2") cfg.params.m2 = ctx.num(key, value);
        else if (key == "m3") cfg.params.m3 = ctx.num(key, value);
        else if (key == "i3") cfg.params.i3 = ctx.num(key, value);
        else if (key == "g") cfg.params.g = ctx.num(key, value);
        else if (key == "friction1") cfg.params.friction[0] = ctx.num(key, value);
        else if (key == "friction2") cfg.params.friction[1] = ctx.num(key, value);
        else if (key == "friction3") cfg.params.friction[2] = ctx.num(key, value);
        else if (key == "regularize_mass") cfg.params.regularize_mass = ctx.num(key, value);
        else if (key == "dt") cfg.sim.dt = ctx.num(key, value);
        else if (key == "t_final") cfg.sim.t_final = ctx.num(key, value);
        else if (key == "record_stride") cfg.sim.record_stride = ctx.integer(key, value);
        else if (key == "emax_window") cfg.sim.emax_window_start = ctx.num(key, value);
        else if (key == "init_q1") cfg.sim.initial.q[0] = ctx.num(key, value);
        else if (key == "init_q2") cfg.sim.initial.q[1] = ctx.num(key, value);
        else if (key == "init_q3") cfg.sim.initial.q[2] = ctx.num(key, value);
        else if (key == "init_v1") cfg.sim.initial.v[0] = ctx.num(key, value);
        else if (key == "init_v2") cfg.sim.initial.v[1] = ctx.num(key, value);
        else if (key == "init_v3") cfg.sim.initial.v[2] = ctx.num(key, value);
        else if (key == "amplitude") cfg.sim.reference.amplitude = ctx.num(key, value);
        else if (key == "omega") cfg.sim.reference.omega = ctx.num(key, value);
        else if (key == "phase") cfg.sim.reference.phase = ctx.num(key, value);
        else if (key == "switching") {
            if (value == "sign") cfg.sim.switching.kind = SwitchingMode::Kind::sign;
            else if (value == "saturation") cfg.sim.switching.kind = SwitchingMode::Kind::saturation;
            else ctx.fail("switching must be 'sign' or 'saturation', got '" + value + "'");
        }
        else if (key == "phi") cfg.sim.switching.phi = ctx.num(key, value);
        else if (key == "disturb_enabled") disturb_enabled = ctx.boolean(key, value);
        else if (key == "disturb_joint") disturb.joint = ctx.integer(key, value);
        else if (key == "disturb_start") disturb.start = ctx.num(key, value);
        else if (key == "disturb_duration") disturb.duration = ctx.num(key, value);
        else if (key == "disturb_magnitude") disturb.magnitude = ctx.num(key, value);
        else if (key == "disturb_shape") {
            if (value == "step") disturb.shape = DisturbanceSpec::Shape::step;
            else if (value == "pulse") disturb.shape = DisturbanceSpec::Shape::pulse;
            else ctx.fail("disturb_shape must be 'step' or 'pulse', got '" + value + "'");
        }
        else if (key == "gains") {
            try { cfg.gains = parse_gains_value(value); }
            catch (const ParseError& e) { ctx.fail(e.what()); }
        }
        else if (key == "gains_a") {
            try { cfg.gains_a = parse_gains_value(value); }
            catch (const ParseError& e) { ctx.fail(e.what()); }
        }
        else if (key == "gains_b") {
            try { cfg.gains_b = parse_gains_value(value); }
            catch (const ParseError& e) { ctx.fail(e.what()); }
        }
        else if (key == "population_size") cfg.ga.population_size = ctx.integer(key, value);
        else if (key == "max_generations") cfg.ga.max_generations = ctx.integer(key, value);
        else if (key == "crossover_rate") cfg.ga.crossover_rate = ctx.num(key, value);
        else if (key == "mutation_rate") cfg.ga.mutation_rate = ctx.num(key, value);
        else if (key == "gene_low") {
            const double lo = ctx.num(key, value);
            for (GeneBounds& b : cfg.ga.gene_bounds) b.low = lo;
        }
        else if (key == "gene_high") {
            const double hi = ctx.num(key, value);
            for (GeneBounds& b : cfg.ga.gene_bounds) b.high = hi;
        }
        else if (key == "convergence_threshold") cfg.ga.convergence_threshold = ctx.num(key, value);
        else if (key == "elitism") cfg.ga.elitism = ctx.integer(key, value);
        else if (key == "tournament_size") cfg.ga.tournament_size = ctx.integer(key, value);
        else if (key == "seed") cfg.ga.seed = ctx.unsigned64(key, value);
        else if (key == "workers") cfg.ga.workers = ctx.integer(key, value);
        else if (key == "fitness_dt") cfg.fitness_dt = ctx.num(key, value);
        else if (key == "fitness_t_final") cfg.fitness_t_final = ctx.num(key, value);
        else if (key == "out_dir") cfg.out_dir = value;
        else ctx.fail("unknown key '" + key + "'");
    }

    if (disturb_enabled) cfg.sim.disturbance = disturb;
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

std::array<double, 9> resolve_gains_source(const std::string& source) {
    const std::string_view sv = trim(source);
    if (sv == "table2") return kTable2Gains;
    if (sv == "baseline") return kBaselineGains;
    if (sv.find(',') != std::string_view::npos) {
        return parse_gains_value(std::string(sv));
    }
    const RunConfig cfg = load_config(std::string(sv));
    if (!cfg.was_set("gains")) {
        throw ParseError("config file '" + std::string(sv) +
                         "' does not set 'gains'");
    }
    return cfg.gains;
}

}  // namespace cylsim

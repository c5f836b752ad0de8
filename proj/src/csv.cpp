#include "cylsim/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

namespace cylsim {

namespace {

std::string to_chars_str(double v, int precision) {
    char buf[64];
    std::to_chars_result res =
        precision > 0
            ? std::to_chars(buf, buf + sizeof(buf), v,
                            std::chars_format::general, precision)
            : std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) {
        throw std::runtime_error("number formatting failed");
    }
    return std::string(buf, res.ptr);
}

void append_vec(std::string& out, const Vec3& v) {
    for (int i = 0; i < 3; ++i) {
        out += ',';
        out += format_g9(v[i]);
    }
}

}  // namespace

std::string format_g9(double v) { return to_chars_str(v, 9); }

std::string format_exact(double v) { return to_chars_str(v, 0); }

std::string trace_csv(const SimResult& result) {
    std::string out =
        "t,q1,q2,q3,qd1,qd2,qd3,e1,e2,e3,s1,s2,s3,tau1,tau2,tau3,V\n";
    for (const SimRow& row : result.rows) {
        out += format_g9(row.t);
        append_vec(out, row.q);
        append_vec(out, Vec3(row.q + row.e));
        append_vec(out, row.e);
        append_vec(out, row.s);
        append_vec(out, row.tau);
        out += ',';
        out += format_g9(row.V);
        out += '\n';
    }
    return out;
}

std::string ga_history_csv(const GaReport& report) {
    std::string out = "generation,best_fitness,mean_fitness\n";
    for (std::size_t i = 0; i < report.history.size(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_g9(report.history[i].best_fitness);
        out += ',';
        out += format_g9(report.history[i].mean_fitness);
        out += '\n';
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace cylsim

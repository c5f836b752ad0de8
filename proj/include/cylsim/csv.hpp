#pragma once

#include "cylsim/ga.hpp"
#include "cylsim/sim.hpp"

#include <string>

namespace cylsim {

/// Number formatted to 9 significant digits, '.' decimal point, independent
/// of the global locale.
std::string format_g9(double v);

/// Shortest representation that round-trips exactly.
std::string format_exact(double v);

/// trace.csv body: header
/// t,q1,q2,q3,qd1,qd2,qd3,e1,e2,e3,s1,s2,s3,tau1,tau2,tau3,V
/// with qd reconstructed as q + e. '\n' line endings.
std::string trace_csv(const SimResult& result);

/// ga_history.csv body: generation,best_fitness,mean_fitness.
std::string ga_history_csv(const GaReport& report);

/// Writes content bytes exactly as given (binary mode). Throws
/// std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace cylsim

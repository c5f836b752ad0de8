#pragma once

#include "cylsim/sim.hpp"
#include "cylsim/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace cylsim {

inline constexpr int kGeneCount = 9;
inline constexpr double kPenaltyFitness = 1e9;

struct GeneBounds {
    double low = 0.0;
    double high = 100.0;
};

struct GaConfig {
    int population_size = 20;
    int max_generations = 1000;
    double crossover_rate = 0.8;
    double mutation_rate = 0.2;
    std::array<GeneBounds, kGeneCount> gene_bounds{};
    double convergence_threshold = 0.001;
    int elitism = 1;
    int tournament_size = 2;
    std::uint64_t seed = 1;
    int workers = 0;  ///< fitness-evaluation threads; 0 = hardware count

    void validate() const;
};

struct Individual {
    std::array<double, kGeneCount> genes{};
    std::optional<double> fitness;  ///< empty until evaluated

    SmcGains gains() const { return SmcGains::from_genes(genes); }
};

struct GenerationStats {
    double best_fitness;
    double mean_fitness;
};

struct GaReport {
    Individual best;
    int generations_used = 0;
    bool converged = false;
    std::vector<GenerationStats> history;
    long penalties_gain_domain = 0;  ///< evaluations rejected for c_rate <= 0
    long penalties_sim_failure = 0;  ///< evaluations where the simulation blew up
};

/// Counter-based random substream keyed by (seed, generation, slot).
/// Every draw is a pure function of the key and a local counter, so the
/// stream sequence cannot depend on thread scheduling or on how many
/// substreams run concurrently.
class SubstreamRng {
public:
    SubstreamRng(std::uint64_t seed, std::uint64_t generation, std::uint64_t slot);

    std::uint64_t next_u64();
    double uniform01();                      ///< [0, 1)
    double uniform(double lo, double hi);    ///< lo + u * (hi - lo)
    int uniform_int(int n);                  ///< {0, ..., n-1}
    double gaussian();                       ///< standard normal (Box-Muller)

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::vector<Individual> initialize_population(const GaConfig& cfg);

enum class EvalFailure { none, gain_domain, sim_failure };

/// Fitness of one individual: the tracking ISE of a closed-loop run with the
/// individual's gains. Gains with a non-positive rate coefficient and runs
/// that fail (singular mass matrix, non-finite state) score kPenaltyFitness
/// instead of aborting the search.
double evaluate(const Individual& ind, const SimConfig& fitness_cfg,
                const ManipulatorParams& p, EvalFailure* why = nullptr);

/// Tournament selection: `tournament_size` contestants drawn uniformly with
/// replacement, lowest fitness wins.
const Individual& select(const std::vector<Individual>& population,
                         const GaConfig& cfg, SubstreamRng& rng);

/// Whole-arithmetic crossover with probability crossover_rate: children are
/// the convex blends beta*a + (1-beta)*b and (1-beta)*a + beta*b, beta
/// uniform per pair. Otherwise the children are copies. Genes are clamped
/// to their bounds either way.
std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b,
                                            const GaConfig& cfg, SubstreamRng& rng);

/// With probability mutation_rate, perturb one uniformly chosen gene by a
/// zero-mean Gaussian with sigma = 5% of that gene's range, clamped.
Individual mutate(Individual ind, const GaConfig& cfg, SubstreamRng& rng);

using GaObserver =
    std::function<void(int generation, const std::vector<Individual>& population)>;

/// Generational loop: evaluate, record stats, stop on fitness <
/// convergence_threshold or on max_generations, else carry the elite and
/// refill via select/crossover/mutate. Deterministic for a given
/// (cfg, fitness_cfg, params) regardless of the worker count. `observer`,
/// when set, sees every evaluated generation.
GaReport run_ga(const GaConfig& cfg, const SimConfig& fitness_cfg,
                const ManipulatorParams& p, const GaObserver& observer = {});

}  // namespace cylsim

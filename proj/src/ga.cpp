#include "cylsim/ga.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>
#include <vector>

namespace cylsim {

void GaConfig::validate() const {
    if (population_size < 2) {
        throw ValidationError("population_size must be >= 2");
    }
    if (max_generations < 1) {
        throw ValidationError("max_generations must be >= 1");
    }
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
        throw ValidationError("crossover_rate must be in [0, 1]");
    }
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) {
        throw ValidationError("mutation_rate must be in [0, 1]");
    }
    for (const GeneBounds& b : gene_bounds) {
        // Degenerate point bounds (low == high) are legal: they pin a gene.
        if (!std::isfinite(b.low) || !std::isfinite(b.high) ||
            !(b.high >= b.low)) {
            throw ValidationError("gene bounds must be finite with high >= low");
        }
    }
    if (!(convergence_threshold >= 0.0)) {
        throw ValidationError("convergence_threshold must be >= 0");
    }
    if (elitism < 0 || elitism >= population_size) {
        throw ValidationError("elitism must be in [0, population_size)");
    }
    if (tournament_size < 1 || tournament_size > population_size) {
        throw ValidationError("tournament_size must be in [1, population_size]");
    }
    if (workers < 0) {
        throw ValidationError("workers must be >= 0");
    }
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace

SubstreamRng::SubstreamRng(std::uint64_t seed, std::uint64_t generation,
                           std::uint64_t slot) {
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ (generation + kGolden));
    k = mix64(k ^ (slot + kGolden));
    key_ = k;
}

std::uint64_t SubstreamRng::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double SubstreamRng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SubstreamRng::uniform(double lo, double hi) {
    return lo + uniform01() * (hi - lo);
}

int SubstreamRng::uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
}

double SubstreamRng::gaussian() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<Individual> initialize_population(const GaConfig& cfg) {
    cfg.validate();
    std::vector<Individual> pop(static_cast<std::size_t>(cfg.population_size));
    for (int i = 0; i < cfg.population_size; ++i) {
        SubstreamRng rng(cfg.seed, 0, static_cast<std::uint64_t>(i));
        for (int j = 0; j < kGeneCount; ++j) {
            pop[static_cast<std::size_t>(i)].genes[static_cast<std::size_t>(j)] =
                rng.uniform(cfg.gene_bounds[static_cast<std::size_t>(j)].low,
                            cfg.gene_bounds[static_cast<std::size_t>(j)].high);
        }
    }
    return pop;
}

double evaluate(const Individual& ind, const SimConfig& fitness_cfg,
                const ManipulatorParams& p, EvalFailure* why) {
    if (why != nullptr) *why = EvalFailure::none;
    SmcGains gains = ind.gains();
    try {
        gains.validate();
    } catch (const GainDomainError&) {
        if (why != nullptr) *why = EvalFailure::gain_domain;
        return kPenaltyFitness;
    } catch (const ValidationError&) {
        if (why != nullptr) *why = EvalFailure::gain_domain;
        return kPenaltyFitness;
    }
    try {
        return simulate(gains, fitness_cfg, p).metrics.ise;
    } catch (const SingularMassMatrix&) {
        if (why != nullptr) *why = EvalFailure::sim_failure;
        return kPenaltyFitness;
    } catch (const NonFiniteState&) {
        if (why != nullptr) *why = EvalFailure::sim_failure;
        return kPenaltyFitness;
    }
}

const Individual& select(const std::vector<Individual>& population,
                         const GaConfig& cfg, SubstreamRng& rng) {
    const int n = static_cast<int>(population.size());
    const Individual* best =
        &population[static_cast<std::size_t>(rng.uniform_int(n))];
    for (int k = 1; k < cfg.tournament_size; ++k) {
        const Individual& cand =
            population[static_cast<std::size_t>(rng.uniform_int(n))];
        if (cand.fitness.value() < best->fitness.value()) best = &cand;
    }
    return *best;
}

namespace {

void clamp_genes(Individual& ind, const GaConfig& cfg) {
    for (int j = 0; j < kGeneCount; ++j) {
        const GeneBounds& b = cfg.gene_bounds[static_cast<std::size_t>(j)];
        ind.genes[static_cast<std::size_t>(j)] =
            std::clamp(ind.genes[static_cast<std::size_t>(j)], b.low, b.high);
    }
}

}  // namespace

std::pair<Individual, Individual> crossover(const Individual& a,
                                            const Individual& b,
                                            const GaConfig& cfg,
                                            SubstreamRng& rng) {
    std::pair<Individual, Individual> out{a, b};
    if (rng.uniform01() < cfg.crossover_rate) {
        const double beta = rng.uniform01();
        for (int j = 0; j < kGeneCount; ++j) {
            const auto ji = static_cast<std::size_t>(j);
            out.first.genes[ji] = beta * a.genes[ji] + (1.0 - beta) * b.genes[ji];
            out.second.genes[ji] = (1.0 - beta) * a.genes[ji] + beta * b.genes[ji];
        }
        out.first.fitness.reset();
        out.second.fitness.reset();
    }
    clamp_genes(out.first, cfg);
    clamp_genes(out.second, cfg);
    return out;
}

Individual mutate(Individual ind, const GaConfig& cfg, SubstreamRng& rng) {
    if (rng.uniform01() < cfg.mutation_rate) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(kGeneCount));
        const GeneBounds& b = cfg.gene_bounds[j];
        const double sigma = 0.05 * (b.high - b.low);
        ind.genes[j] += sigma * rng.gaussian();
        ind.fitness.reset();
        clamp_genes(ind, cfg);
    }
    return ind;
}

namespace {

/// Fills in missing fitness values. Work is split over `workers` threads by
/// an atomic claim counter; evaluation itself draws no random numbers, so
/// the results do not depend on the thread count.
void evaluate_population(std::vector<Individual>& pop,
                         const SimConfig& fitness_cfg,
                         const ManipulatorParams& p, int workers,
                         std::atomic<long>& gain_domain,
                         std::atomic<long>& sim_failure) {
    int n_threads = workers;
    if (n_threads == 0) {
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (n_threads < 1) n_threads = 1;
    }
    n_threads = std::min<int>(n_threads, static_cast<int>(pop.size()));

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto work = [&] {
        try {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= pop.size()) return;
                if (pop[i].fitness.has_value()) continue;
                EvalFailure why = EvalFailure::none;
                pop[i].fitness = evaluate(pop[i], fitness_cfg, p, &why);
                if (why == EvalFailure::gain_domain) ++gain_domain;
                if (why == EvalFailure::sim_failure) ++sim_failure;
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_threads));
        for (int k = 0; k < n_threads; ++k) threads.emplace_back(work);
        for (std::thread& th : threads) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
}

std::vector<std::size_t> ranked_indices(const std::vector<Individual>& pop) {
    std::vector<std::size_t> idx(pop.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return pop[a].fitness.value() < pop[b].fitness.value();
    });
    return idx;
}

}  // namespace

GaReport run_ga(const GaConfig& cfg, const SimConfig& fitness_cfg,
                const ManipulatorParams& p, const GaObserver& observer) {
    cfg.validate();
    fitness_cfg.validate();
    p.validate();

    GaReport report;
    std::atomic<long> gain_domain{0};
    std::atomic<long> sim_failure{0};

    std::vector<Individual> pop = initialize_population(cfg);
    bool have_best = false;

    for (int gen = 1; gen <= cfg.max_generations; ++gen) {
        evaluate_population(pop, fitness_cfg, p, cfg.workers, gain_domain,
                            sim_failure);

        const std::vector<std::size_t> ranked = ranked_indices(pop);
        const Individual& gen_best = pop[ranked.front()];
        double mean = 0.0;
        for (const Individual& ind : pop) mean += ind.fitness.value();
        mean /= static_cast<double>(pop.size());
        report.history.push_back({gen_best.fitness.value(), mean});
        report.generations_used = gen;

        if (!have_best || gen_best.fitness.value() < report.best.fitness.value()) {
            report.best = gen_best;
            have_best = true;
        }
        if (observer) observer(gen, pop);

        if (gen_best.fitness.value() < cfg.convergence_threshold) {
            report.converged = true;
            break;
        }
        if (gen == cfg.max_generations) break;

        // Breed the next generation: elites keep their slot and their cached
        // fitness, the rest is refilled pairwise. Each pair gets its own
        // substream keyed by (seed, generation, first output slot).
        std::vector<Individual> next;
        next.reserve(pop.size());
        for (int e = 0; e < cfg.elitism; ++e) {
            next.push_back(pop[ranked[static_cast<std::size_t>(e)]]);
        }
        int slot = cfg.elitism;
        while (static_cast<int>(next.size()) < cfg.population_size) {
            SubstreamRng rng(cfg.seed, static_cast<std::uint64_t>(gen),
                             static_cast<std::uint64_t>(slot));
            const Individual& pa = select(pop, cfg, rng);
            const Individual& pb = select(pop, cfg, rng);
            auto [child1, child2] = crossover(pa, pb, cfg, rng);
            next.push_back(mutate(std::move(child1), cfg, rng));
            if (static_cast<int>(next.size()) < cfg.population_size) {
                next.push_back(mutate(std::move(child2), cfg, rng));
            }
            slot += 2;
        }
        pop = std::move(next);
    }

    report.penalties_gain_domain = gain_domain.load();
    report.penalties_sim_failure = sim_failure.load();
    return report;
}

}  // namespace cylsim

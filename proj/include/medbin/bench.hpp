#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "medbin/bin_engine.hpp"

namespace medbin::bench {

/// Raised when a timed run produced a wrong answer; no times are reported.
class CorrectnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data distributions used by the experiments. Normal is parameterised by
/// variance, so Normal(0, 25) has standard deviation 5.
class Distribution {
public:
    enum class Kind { Uniform, Normal, Exponential, ChiSquare, EvenMixture };

    static Distribution uniform(double a, double b);
    static Distribution normal(double mean, double variance);
    static Distribution exponential(double rate);
    static Distribution chi_square(int dof);
    /// First ceil(n/2) points from `first`, the rest from `second`, shuffled.
    static Distribution even_mixture(Distribution first, Distribution second);

    Kind kind() const { return kind_; }
    double a() const { return a_; }
    double b() const { return b_; }
    int dof() const { return dof_; }
    const Distribution& first() const { return *parts_[0]; }
    const Distribution& second() const { return *parts_[1]; }

    std::string describe() const;

private:
    Distribution() = default;
    Kind kind_ = Kind::Uniform;
    double a_ = 0.0; // uniform lower / normal mean / exponential rate
    double b_ = 1.0; // uniform upper / normal variance
    int dof_ = 0;
    std::vector<std::shared_ptr<const Distribution>> parts_;
};

/// Seeded source built on std::mt19937_64, whose output sequence is fixed by
/// the standard. The transforms on top are our own, so generated data is
/// identical across platforms and standard libraries.
class Rng {
public:
    static constexpr const char* algorithm = "mt19937_64 + Box-Muller / inverse-CDF";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01();         // [0, 1)
    double uniform_open_zero(); // (0, 1]
    double standard_normal();
    std::uint64_t below(std::uint64_t n); // uniform in [0, n)

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Deterministic under (dist, n, seed).
std::vector<double> generate(const Distribution& dist, std::size_t n, std::uint64_t seed);

/// FNV-1a over the bit patterns, for determinism checks in reports.
std::uint64_t checksum(std::span<const double> data, std::uint64_t seed = 0xcbf29ce484222325ULL);

enum class Algorithm { Quickselect, Binmedian, Binapprox, Sort };

const char* name(Algorithm a);
Algorithm algorithm_from_name(const std::string& s);

struct UpdateBatch {
    std::size_t size = 0;
    Distribution dist = Distribution::uniform(0, 1);
};

struct BenchScenario {
    std::string name;
    std::size_t base_size = 0;
    Distribution base_dist = Distribution::uniform(0, 1);
    std::vector<UpdateBatch> batches;
    std::vector<Algorithm> algorithms;
    std::size_t repetitions = 10;
    std::size_t block_size = 20; // medians per timed block (single-data runs)
    std::uint64_t seed = 1;
    BinParams params;

    void validate() const;
};

struct AlgorithmTiming {
    Algorithm algorithm = Algorithm::Quickselect;
    std::vector<double> times_ms; // one per repetition
    double mean_ms = 0.0;
    double std_ms = 0.0;
    double median_ms = 0.0;
    double ratio = 1.0; // mean relative to the fastest mean in the scenario
    std::size_t rebuilds = 0; // updatable paths, summed over repetitions
};

struct BenchReport {
    std::string scenario;
    std::size_t base_size = 0;
    std::size_t batch_count = 0;
    std::size_t repetitions = 0;
    std::size_t block_size = 0;
    std::uint64_t seed = 0;
    BinParams params;
    std::string rng = Rng::algorithm;
    std::uint64_t data_checksum = 0;
    bool timed = true;
    std::size_t checks = 0; // correctness assertions made
    std::vector<AlgorithmTiming> rows;

    const AlgorithmTiming& row(Algorithm a) const;
};

struct RunOptions {
    bool timing = true; // false: correctness only
};

/// Timed blocks of independent medians on freshly drawn data sets.
BenchReport run_single(const BenchScenario& scenario, RunOptions options = {});

/// Base data then batches, recomputing the median after each batch.
BenchReport run_update(const BenchScenario& scenario, RunOptions options = {});

/// Dispatches on whether the scenario has update batches.
BenchReport run(const BenchScenario& scenario, RunOptions options = {});

/// Built-in scenarios: table1-{uniform,normal,exponential,chisq,
/// mix-uniform-1e3,mix-uniform-1e4,mix-exp-1e-3,mix-exp-1e-4} and
/// table2-s{1,2,3,4}, at desk scale.
std::vector<std::string> scenario_names();
BenchScenario builtin_scenario(const std::string& name);
std::vector<BenchScenario> table1_scenarios(std::size_t n = 100001);
std::vector<BenchScenario> table2_scenarios();

/// Scenario from a JSON document (see README for the schema).
BenchScenario scenario_from_json(const std::string& text);

void print_table(std::ostream& out, const BenchReport& report);
/// One JSON object per line per (scenario, algorithm).
void write_records(std::ostream& out, const BenchReport& report);

} // namespace medbin::bench

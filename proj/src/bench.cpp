#include "medbin/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "medbin/core_select.hpp"
#include "medbin/moments.hpp"
#include "medbin/updatable.hpp"

namespace medbin::bench {

// ---------------------------------------------------------------- distributions

Distribution Distribution::uniform(double a, double b) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
        throw ConfigError("uniform distribution needs finite a < b");
    }
    Distribution d;
    d.kind_ = Kind::Uniform;
    d.a_ = a;
    d.b_ = b;
    return d;
}

Distribution Distribution::normal(double mean, double variance) {
    if (!(variance > 0.0) || !std::isfinite(mean) || !std::isfinite(variance)) {
        throw ConfigError("normal distribution needs finite mean and variance > 0");
    }
    Distribution d;
    d.kind_ = Kind::Normal;
    d.a_ = mean;
    d.b_ = variance;
    return d;
}

Distribution Distribution::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ConfigError("exponential rate must be > 0");
    Distribution d;
    d.kind_ = Kind::Exponential;
    d.a_ = rate;
    return d;
}

Distribution Distribution::chi_square(int dof) {
    if (dof < 1) throw ConfigError("chi-square needs k >= 1 degrees of freedom");
    Distribution d;
    d.kind_ = Kind::ChiSquare;
    d.dof_ = dof;
    return d;
}

Distribution Distribution::even_mixture(Distribution first, Distribution second) {
    Distribution d;
    d.kind_ = Kind::EvenMixture;
    d.parts_.push_back(std::make_shared<const Distribution>(std::move(first)));
    d.parts_.push_back(std::make_shared<const Distribution>(std::move(second)));
    return d;
}

std::string Distribution::describe() const {
    std::ostringstream s;
    switch (kind_) {
    case Kind::Uniform: s << "U(" << a_ << "," << b_ << ")"; break;
    case Kind::Normal: s << "N(" << a_ << "," << b_ << ")"; break;
    case Kind::Exponential: s << "E(" << a_ << ")"; break;
    case Kind::ChiSquare: s << "chi2(" << dof_ << ")"; break;
    case Kind::EvenMixture: s << first().describe() << "+" << second().describe(); break;
    }
    return s.str();
}

// ---------------------------------------------------------------- random numbers

double Rng::uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform_open_zero() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

double Rng::standard_normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open_zero()));
    const double theta = 2.0 * std::numbers::pi * uniform01();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling on the top of the range keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x < limit) return x % n;
    }
}

namespace {

void fill(const Distribution& d, Rng& rng, std::span<double> out) {
    using K = Distribution::Kind;
    switch (d.kind()) {
    case K::Uniform:
        for (double& x : out) x = d.a() + (d.b() - d.a()) * rng.uniform01();
        break;
    case K::Normal: {
        const double sd = std::sqrt(d.b());
        for (double& x : out) x = d.a() + sd * rng.standard_normal();
        break;
    }
    case K::Exponential:
        for (double& x : out) x = -std::log(rng.uniform_open_zero()) / d.a();
        break;
    case K::ChiSquare:
        for (double& x : out) {
            double s = 0.0;
            for (int i = 0; i < d.dof(); ++i) {
                const double z = rng.standard_normal();
                s += z * z;
            }
            x = s;
        }
        break;
    case K::EvenMixture: {
        const std::size_t half = (out.size() + 1) / 2;
        fill(d.first(), rng, out.first(half));
        fill(d.second(), rng, out.subspan(half));
        for (std::size_t i = out.size(); i > 1; --i) {
            std::swap(out[i - 1], out[rng.below(i)]);
        }
        break;
    }
    }
}

// splitmix64 finaliser; derives per-data-set seeds from the scenario seed.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep, std::uint64_t index) {
    return mix(mix(mix(seed) ^ rep) ^ index);
}

} // namespace

std::vector<double> generate(const Distribution& dist, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("generate needs n >= 1");
    std::vector<double> out(n);
    Rng rng(seed);
    fill(dist, rng, out);
    return out;
}

std::uint64_t checksum(std::span<const double> data, std::uint64_t h) {
    for (const double x : data) {
        std::uint64_t bits = 0;
        std::memcpy(&bits, &x, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

// ---------------------------------------------------------------- scenarios

const char* name(Algorithm a) {
    switch (a) {
    case Algorithm::Quickselect: return "quickselect";
    case Algorithm::Binmedian: return "binmedian";
    case Algorithm::Binapprox: return "binapprox";
    case Algorithm::Sort: return "sort";
    }
    return "?";
}

Algorithm algorithm_from_name(const std::string& s) {
    for (auto a : {Algorithm::Quickselect, Algorithm::Binmedian, Algorithm::Binapprox, Algorithm::Sort}) {
        if (s == name(a)) return a;
    }
    throw ConfigError("unknown algorithm '" + s + "'");
}

void BenchScenario::validate() const {
    if (base_size < 1) throw ConfigError(name + ": base size must be >= 1");
    if (repetitions < 1) throw ConfigError(name + ": repetitions must be >= 1");
    if (block_size < 1) throw ConfigError(name + ": block size must be >= 1");
    if (algorithms.empty()) throw ConfigError(name + ": no algorithms selected");
    for (const auto& b : batches) {
        if (b.size < 1) throw ConfigError(name + ": batch sizes must be >= 1");
    }
    params.validate();
}

const AlgorithmTiming& BenchReport::row(Algorithm a) const {
    for (const auto& r : rows) {
        if (r.algorithm == a) return r;
    }
    throw ContractViolation(std::string("report has no row for ") + name(a));
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0, Clock::time_point t1) {
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

void summarise(BenchReport& report) {
    for (auto& row : report.rows) {
        const auto& t = row.times_ms;
        if (t.empty()) continue;
        const double n = static_cast<double>(t.size());
        row.mean_ms = std::accumulate(t.begin(), t.end(), 0.0) / n;
        double ss = 0.0;
        for (const double x : t) ss += (x - row.mean_ms) * (x - row.mean_ms);
        row.std_ms = t.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        std::vector<double> sorted = t;
        std::sort(sorted.begin(), sorted.end());
        row.median_ms = sorted.size() % 2 == 1
                            ? sorted[sorted.size() / 2]
                            : pair_mean(sorted[sorted.size() / 2 - 1], sorted[sorted.size() / 2]);
    }
    double fastest = std::numeric_limits<double>::infinity();
    for (const auto& row : report.rows) {
        if (row.mean_ms > 0.0) fastest = std::min(fastest, row.mean_ms);
    }
    for (auto& row : report.rows) {
        row.ratio = (std::isfinite(fastest) && row.mean_ms > 0.0) ? row.mean_ms / fastest : 1.0;
    }
}

BenchReport start_report(const BenchScenario& s, RunOptions options) {
    BenchReport r;
    r.scenario = s.name;
    r.base_size = s.base_size;
    r.batch_count = s.batches.size();
    r.repetitions = s.repetitions;
    r.block_size = s.batches.empty() ? s.block_size : 1;
    r.seed = s.seed;
    r.params = s.params;
    r.timed = options.timing;
    for (const auto a : s.algorithms) r.rows.push_back({a, {}, 0, 0, 0, 1, 0});
    r.data_checksum = 0xcbf29ce484222325ULL;
    return r;
}

[[noreturn]] void fail(const BenchScenario& s, std::size_t rep, std::size_t index, Algorithm a,
                       const std::string& what) {
    std::ostringstream msg;
    msg << std::setprecision(17) << s.name << ": repetition " << rep << ", data set/step " << index
        << ": " << name(a) << " " << what;
    throw CorrectnessError(msg.str());
}

std::string mismatch(double got, double want) {
    std::ostringstream m;
    m << std::setprecision(17) << "returned " << got << ", sort oracle says " << want;
    return m.str();
}

} // namespace

BenchReport run_single(const BenchScenario& s, RunOptions options) {
    s.validate();
    if (!s.batches.empty()) throw ConfigError(s.name + ": run_single takes no update batches");
    BenchReport report = start_report(s, options);
    const std::size_t block = s.block_size;

    // The sort row doubles as the oracle; run it first when present.
    std::vector<std::size_t> order(s.algorithms.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_partition(order.begin(), order.end(),
                          [&](std::size_t i) { return s.algorithms[i] == Algorithm::Sort; });

    for (std::size_t rep = 0; rep < s.repetitions; ++rep) {
        std::vector<std::vector<double>> sets;
        sets.reserve(block);
        for (std::size_t i = 0; i < block; ++i) {
            sets.push_back(generate(s.base_dist, s.base_size, derive_seed(s.seed, rep, i)));
            report.data_checksum = checksum(sets.back(), report.data_checksum);
        }

        std::vector<double> oracle;
        std::vector<double> results(block);
        std::vector<std::vector<double>> scratch(block);
        for (const std::size_t which : order) {
            const Algorithm alg = s.algorithms[which];
            const bool mutates = alg == Algorithm::Quickselect || alg == Algorithm::Sort;
            if (mutates) {
                for (std::size_t i = 0; i < block; ++i) scratch[i] = sets[i];
            }
            const auto t0 = Clock::now();
            for (std::size_t i = 0; i < block; ++i) {
                switch (alg) {
                case Algorithm::Quickselect: results[i] = median_select(scratch[i]); break;
                case Algorithm::Sort: results[i] = sort_median(scratch[i]); break;
                case Algorithm::Binmedian: results[i] = binmedian(sets[i], s.params); break;
                case Algorithm::Binapprox: results[i] = binapprox(sets[i], s.params.bins); break;
                }
            }
            const auto t1 = Clock::now();
            if (options.timing) {
                report.rows[which].times_ms.push_back(elapsed_ms(t0, t1) / static_cast<double>(block));
            }

            if (oracle.empty()) {
                if (alg == Algorithm::Sort) {
                    oracle = results;
                    continue;
                }
                oracle.resize(block);
                for (std::size_t i = 0; i < block; ++i) {
                    std::vector<double> copy = sets[i];
                    oracle[i] = sort_median(copy);
                }
            }
            for (std::size_t i = 0; i < block; ++i) {
                ++report.checks;
                if (alg == Algorithm::Binapprox) {
                    const double bound = compute_moments(sets[i]).sigma() / static_cast<double>(s.params.bins);
                    if (!(std::fabs(results[i] - oracle[i]) <= bound)) {
                        fail(s, rep, i, alg, mismatch(results[i], oracle[i]) + " (beyond sigma/B)");
                    }
                } else if (results[i] != oracle[i]) {
                    fail(s, rep, i, alg, mismatch(results[i], oracle[i]));
                }
            }
        }
    }
    summarise(report);
    return report;
}

BenchReport run_update(const BenchScenario& s, RunOptions options) {
    s.validate();
    if (s.batches.empty()) throw ConfigError(s.name + ": run_update needs update batches");
    BenchReport report = start_report(s, options);
    const std::size_t steps = s.batches.size() + 1;

    for (std::size_t rep = 0; rep < s.repetitions; ++rep) {
        const std::vector<double> base = generate(s.base_dist, s.base_size, derive_seed(s.seed, rep, 0));
        report.data_checksum = checksum(base, report.data_checksum);
        std::vector<std::vector<double>> batches;
        for (std::size_t j = 0; j < s.batches.size(); ++j) {
            batches.push_back(generate(s.batches[j].dist, s.batches[j].size, derive_seed(s.seed, rep, j + 1)));
            report.data_checksum = checksum(batches.back(), report.data_checksum);
        }

        std::vector<double> oracle(steps);
        {
            std::vector<double> agg = base;
            for (std::size_t j = 0; j < steps; ++j) {
                if (j > 0) agg.insert(agg.end(), batches[j - 1].begin(), batches[j - 1].end());
                std::vector<double> copy = agg;
                oracle[j] = sort_median(copy);
            }
        }

        for (std::size_t which = 0; which < s.algorithms.size(); ++which) {
            const Algorithm alg = s.algorithms[which];
            std::vector<double> results(steps);
            std::vector<double> bounds(steps, 0.0);
            std::vector<double> agg = base;
            std::size_t rebuilds = 0;

            const auto t0 = Clock::now();
            switch (alg) {
            case Algorithm::Quickselect:
            case Algorithm::Sort:
                for (std::size_t j = 0; j < steps; ++j) {
                    if (j > 0) agg.insert(agg.end(), batches[j - 1].begin(), batches[j - 1].end());
                    results[j] = alg == Algorithm::Sort ? sort_median(agg) : median_select(agg);
                }
                break;
            case Algorithm::Binmedian: {
                UpdatableMedian um(std::move(agg), s.params);
                for (std::size_t j = 0; j < steps; ++j) {
                    if (j > 0) um.add(batches[j - 1]);
                    results[j] = um.query_exact();
                }
                rebuilds = um.rebuild_count();
                break;
            }
            case Algorithm::Binapprox: {
                UpdatableMedian um(std::move(agg), s.params);
                for (std::size_t j = 0; j < steps; ++j) {
                    if (j > 0) um.add(batches[j - 1]);
                    const auto a = um.query_approx();
                    results[j] = a.value;
                    bounds[j] = a.error_bound;
                }
                rebuilds = um.rebuild_count();
                break;
            }
            }
            const auto t1 = Clock::now();
            if (options.timing) report.rows[which].times_ms.push_back(elapsed_ms(t0, t1));
            report.rows[which].rebuilds += rebuilds;

            for (std::size_t j = 0; j < steps; ++j) {
                ++report.checks;
                if (alg == Algorithm::Binapprox) {
                    if (!(std::fabs(results[j] - oracle[j]) <= bounds[j])) {
                        fail(s, rep, j, alg, mismatch(results[j], oracle[j]) + " (beyond reported bound)");
                    }
                } else if (results[j] != oracle[j]) {
                    fail(s, rep, j, alg, mismatch(results[j], oracle[j]));
                }
            }
        }
    }
    summarise(report);
    return report;
}

BenchReport run(const BenchScenario& scenario, RunOptions options) {
    return scenario.batches.empty() ? run_single(scenario, options) : run_update(scenario, options);
}

// ---------------------------------------------------------------- built-ins

namespace {

const std::vector<Algorithm> kAllFour{Algorithm::Quickselect, Algorithm::Binmedian, Algorithm::Binapprox,
                                      Algorithm::Sort};
const std::vector<Algorithm> kUpdateThree{Algorithm::Quickselect, Algorithm::Binmedian, Algorithm::Binapprox};

BenchScenario single(std::string name, Distribution d, std::size_t n) {
    BenchScenario s;
    s.name = std::move(name);
    s.base_size = n;
    s.base_dist = std::move(d);
    s.algorithms = kAllFour;
    return s;
}

BenchScenario update(std::string name, std::size_t n0, std::vector<UpdateBatch> batches) {
    BenchScenario s;
    s.name = std::move(name);
    s.base_size = n0;
    s.base_dist = Distribution::normal(0, 25);
    s.batches = std::move(batches);
    s.algorithms = kUpdateThree;
    return s;
}

std::vector<UpdateBatch> repeated(std::size_t count, std::size_t size, const Distribution& d) {
    return std::vector<UpdateBatch>(count, UpdateBatch{size, d});
}

} // namespace

std::vector<BenchScenario> table1_scenarios(std::size_t n) {
    using D = Distribution;
    const D std_normal = D::normal(0, 1);
    return {
        single("table1-uniform", D::uniform(0, 1), n),
        single("table1-normal", std_normal, n),
        single("table1-exponential", D::exponential(1), n),
        single("table1-chisq", D::chi_square(5), n),
        single("table1-mix-uniform-1e3", D::even_mixture(std_normal, D::uniform(-1e3, 1e3)), n),
        single("table1-mix-uniform-1e4", D::even_mixture(std_normal, D::uniform(-1e4, 1e4)), n),
        single("table1-mix-exp-1e-3", D::even_mixture(std_normal, D::exponential(1e-3)), n),
        single("table1-mix-exp-1e-4", D::even_mixture(std_normal, D::exponential(1e-4)), n),
    };
}

std::vector<BenchScenario> table2_scenarios() {
    using D = Distribution;
    std::vector<UpdateBatch> drifting;
    for (int j = 1; j <= 20; ++j) drifting.push_back({10000, D::normal(0.5 * j, 25)});
    return {
        update("table2-s1", 100001, repeated(20, 1000, D::normal(0, 25))),
        update("table2-s2", 100001, repeated(20, 1000, D::normal(2, 4))),
        update("table2-s3", 10001, std::move(drifting)),
        update("table2-s4", 10001, repeated(20, 10000, D::normal(10, 25))),
    };
}

std::vector<std::string> scenario_names() {
    std::vector<std::string> out;
    for (const auto& s : table1_scenarios()) out.push_back(s.name);
    for (const auto& s : table2_scenarios()) out.push_back(s.name);
    return out;
}

BenchScenario builtin_scenario(const std::string& name) {
    for (auto& s : table1_scenarios()) {
        if (s.name == name) return s;
    }
    for (auto& s : table2_scenarios()) {
        if (s.name == name) return s;
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

namespace {

using nlohmann::json;

Distribution dist_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "uniform") return Distribution::uniform(j.value("a", 0.0), j.value("b", 1.0));
    if (kind == "normal") return Distribution::normal(j.value("mean", 0.0), j.value("variance", 1.0));
    if (kind == "exponential") return Distribution::exponential(j.value("rate", 1.0));
    if (kind == "chisq") return Distribution::chi_square(j.value("dof", 1));
    if (kind == "mixture") {
        return Distribution::even_mixture(dist_from_json(j.at("first")), dist_from_json(j.at("second")));
    }
    throw ConfigError("unknown distribution kind '" + kind + "'");
}

} // namespace

BenchScenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario config: ") + e.what());
    }
    try {
        BenchScenario s;
        s.name = j.value("name", std::string("custom"));
        s.base_size = j.at("base_size").get<std::size_t>();
        s.base_dist = dist_from_json(j.at("base_dist"));
        if (j.contains("batches")) {
            for (const auto& b : j.at("batches")) {
                const auto repeat = b.value("repeat", std::size_t{1});
                const double drift = b.value("drift", 0.0);
                const auto size = b.at("size").get<std::size_t>();
                for (std::size_t r = 1; r <= repeat; ++r) {
                    json d = b.at("dist");
                    if (drift != 0.0) d["mean"] = d.value("mean", 0.0) + drift * static_cast<double>(r);
                    s.batches.push_back({size, dist_from_json(d)});
                }
            }
        }
        if (j.contains("algorithms")) {
            for (const auto& a : j.at("algorithms")) s.algorithms.push_back(algorithm_from_name(a.get<std::string>()));
        } else {
            s.algorithms = s.batches.empty() ? kAllFour : kUpdateThree;
        }
        s.repetitions = j.value("repetitions", s.repetitions);
        s.block_size = j.value("block_size", s.block_size);
        s.seed = j.value("seed", s.seed);
        s.params.bins = j.value("bins", s.params.bins);
        s.params.cutoff = j.value("cutoff", s.params.cutoff);
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario config: ") + e.what());
    }
}

// ---------------------------------------------------------------- output

void print_table(std::ostream& out, const BenchReport& r) {
    out << r.scenario << "  (n=" << r.base_size;
    if (r.batch_count > 0) out << ", " << r.batch_count << " batches";
    out << ", reps=" << r.repetitions;
    if (r.batch_count == 0) out << ", block=" << r.block_size;
    out << ", B=" << r.params.bins << ", C=" << r.params.cutoff << ", seed=" << r.seed << ")\n";
    out << "  " << std::left << std::setw(12) << "algorithm" << std::right << std::setw(14)
        << "mean ms" << std::setw(12) << "std" << std::setw(10) << "ratio";
    if (r.batch_count > 0) out << std::setw(10) << "rebuilds";
    out << '\n';
    for (const auto& row : r.rows) {
        out << "  " << std::left << std::setw(12) << name(row.algorithm) << std::right << std::fixed
            << std::setprecision(4) << std::setw(14) << row.mean_ms << std::setw(12) << row.std_ms
            << std::setprecision(2) << std::setw(10) << row.ratio;
        if (r.batch_count > 0) out << std::setw(10) << row.rebuilds;
        out << '\n';
        out.unsetf(std::ios::floatfield);
    }
    out << "  checks=" << r.checks << " data_checksum=" << std::hex << r.data_checksum << std::dec
        << (r.timed ? "" : " (untimed)") << '\n';
}

void write_records(std::ostream& out, const BenchReport& r) {
    std::ostringstream sum;
    sum << std::hex << std::setw(16) << std::setfill('0') << r.data_checksum;
    for (const auto& row : r.rows) {
        json rec = {
            {"scenario", r.scenario},
            {"algorithm", name(row.algorithm)},
            {"mean_ms", row.mean_ms},
            {"std_ms", row.std_ms},
            {"median_ms", row.median_ms},
            {"ratio", row.ratio},
            {"rebuilds", row.rebuilds},
            {"base_size", r.base_size},
            {"batches", r.batch_count},
            {"repetitions", r.repetitions},
            {"block_size", r.block_size},
            {"bins", r.params.bins},
            {"cutoff", r.params.cutoff},
            {"seed", r.seed},
            {"rng", r.rng},
            {"data_checksum", sum.str()},
            {"checks", r.checks},
            {"timed", r.timed},
        };
        out << rec.dump() << '\n';
    }
}

} // namespace medbin::bench

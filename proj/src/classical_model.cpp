#include "rlg/classical_model.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "rlg/rng.hpp"

namespace rlg::classical {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double alpha_sq(double tau, const ClassicalFieldParams& p) {
    const double s = std::sin(0.5 * p.omega * tau);
    const double a = 2.0 * p.lambda / p.omega * s;
    return a * a;
}

struct KahanSum {
    double sum = 0.0;
    double c = 0.0;

    void add(double v) {
        const double y = v - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
};

}  // namespace

void validate(const ClassicalFieldParams& p) {
    if (!(p.variance >= 0.0) || !std::isfinite(p.variance)) {
        throw std::invalid_argument("ClassicalFieldParams: variance must be >= 0");
    }
    if (!(p.omega > 0.0)) {
        throw std::invalid_argument("ClassicalFieldParams: omega must be positive");
    }
    if (!(p.lambda >= 0.0)) {
        throw std::invalid_argument("ClassicalFieldParams: lambda must be >= 0");
    }
}

double classical_single(double phi1, double tau1, const ClassicalFieldParams& p) {
    validate(p);
    return std::cos(phi1) * std::exp(-alpha_sq(tau1, p) * p.variance);
}

double classical_two_time(double phi1, double phi2, double tau, double theta,
                          const ClassicalFieldParams& p) {
    validate(p);
    const double a2v = alpha_sq(tau, p) * p.variance;
    return 0.5 * (std::cos(phi1 + phi2) * std::exp(-2.0 * a2v * (1.0 + std::cos(theta))) +
                  std::cos(phi1 - phi2) * std::exp(-2.0 * a2v * (1.0 - std::cos(theta))));
}

McEstimate monte_carlo_correlation(std::span<const MeasurementSpec> specs,
                                   const ClassicalFieldParams& p,
                                   std::int64_t n_samples, std::uint64_t seed,
                                   int threads) {
    validate(p);
    if (specs.size() < 2 || specs.size() > 3) {
        throw std::invalid_argument("monte_carlo_correlation: need 2 or 3 measurements");
    }
    if (n_samples < 10000) {
        throw std::invalid_argument("monte_carlo_correlation: n_samples must be >= 1e4");
    }

    const double amp_scale = std::sqrt(2.0 * p.variance);
    const double k = std::numbers::sqrt2 * p.lambda / p.omega;

    // One trajectory: draw (A, delta0), integrate the phase of every window,
    // multiply the conditional means.
    auto trajectory = [&](std::uint64_t i) {
        CounterRng rng(seed, 2 * static_cast<std::uint64_t>(i));
        const double a = amp_scale * std::sqrt(-std::log(rng.uniform01_open_low()));
        const double delta0 = rng.uniform(0.0, kTwoPi);
        double z = 1.0;
        for (const auto& spec : specs) {
            const double phase = -k * a *
                                 (std::sin(p.omega * spec.t_end + delta0) -
                                  std::sin(p.omega * (spec.t_end - spec.tau) + delta0));
            z *= std::cos(spec.phi + phase);
        }
        return z;
    };

    // Fixed-size shards with counter-offset streams; workers pull shards and
    // the merge runs in shard order, so the estimate is bit-identical for any
    // thread count.
    const std::int64_t n = n_samples;
    constexpr std::int64_t kShardSize = 8192;
    const std::int64_t n_shards = (n + kShardSize - 1) / kShardSize;
    std::vector<KahanSum> sums(static_cast<std::size_t>(n_shards));
    std::vector<KahanSum> sq_sums(static_cast<std::size_t>(n_shards));

    auto run_shard = [&](std::int64_t shard) {
        const std::int64_t begin = shard * kShardSize;
        const std::int64_t end = std::min(n, begin + kShardSize);
        for (std::int64_t i = begin; i < end; ++i) {
            const double z = trajectory(static_cast<std::uint64_t>(i));
            sums[static_cast<std::size_t>(shard)].add(z);
            sq_sums[static_cast<std::size_t>(shard)].add(z * z);
        }
    };

    const int workers = std::max(1, threads);
    if (workers == 1) {
        for (std::int64_t s = 0; s < n_shards; ++s) {
            run_shard(s);
        }
    } else {
        std::atomic<std::int64_t> next{0};
        auto drain = [&] {
            for (std::int64_t s = next.fetch_add(1); s < n_shards; s = next.fetch_add(1)) {
                run_shard(s);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(drain);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    KahanSum total;
    KahanSum total_sq;
    for (std::int64_t s = 0; s < n_shards; ++s) {
        total.add(sums[static_cast<std::size_t>(s)].sum);
        total_sq.add(sq_sums[static_cast<std::size_t>(s)].sum);
    }

    const double mean = total.sum / static_cast<double>(n);
    const double var =
        std::max(0.0, total_sq.sum / static_cast<double>(n) - mean * mean);
    McEstimate est;
    est.value = mean;
    est.std_error = std::sqrt(var / static_cast<double>(n));
    return est;
}

double classical_lgi_w(double alpha_mag, double theta, double variance,
                       const std::array<double, 3>& phases) {
    if (alpha_mag < 0.0 || variance < 0.0) {
        throw std::invalid_argument("classical_lgi_w: negative magnitude or variance");
    }
    const double a2v = alpha_mag * alpha_mag * variance;
    auto pair = [&](double pi_, double pj, double th) {
        return 0.5 *
               (std::cos(pi_ + pj) * std::exp(-2.0 * a2v * (1.0 + std::cos(th))) +
                std::cos(pi_ - pj) * std::exp(-2.0 * a2v * (1.0 - std::cos(th))));
    };
    return pair(phases[0], phases[1], theta) + pair(phases[1], phases[2], theta) -
           pair(phases[0], phases[2], 2.0 * theta);
}

}  // namespace rlg::classical

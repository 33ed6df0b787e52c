#include "rlg/lgi.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace rlg::lgi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_phase(double p) {
    double w = std::fmod(p, kTwoPi);
    if (w < 0.0) {
        w += kTwoPi;
    }
    return w;
}

struct WitnessContext {
    // Per-(alpha, theta, nbar) constants so one witness evaluation is a
    // handful of cosines.
    double gamma12, gamma13;
    double ep12, em12;  // e^{-x(1 +- cos theta)}
    double ep13, em13;  // e^{-x(1 +- cos 2 theta)}

    WitnessContext(double alpha, double theta, double nbar, bool include_gamma) {
        const double x = alpha * alpha * (2.0 * nbar + 1.0);
        gamma12 = include_gamma ? alpha * alpha * std::sin(theta) : 0.0;
        gamma13 = include_gamma ? alpha * alpha * std::sin(2.0 * theta) : 0.0;
        ep12 = std::exp(-x * (1.0 + std::cos(theta)));
        em12 = std::exp(-x * (1.0 - std::cos(theta)));
        ep13 = std::exp(-x * (1.0 + std::cos(2.0 * theta)));
        em13 = std::exp(-x * (1.0 - std::cos(2.0 * theta)));
    }

    double operator()(const std::array<double, 3>& p) const {
        const double c12 = 0.5 * (std::cos(p[0] + p[1] + gamma12) * ep12 +
                                  std::cos(p[0] - p[1] - gamma12) * em12);
        const double c23 = 0.5 * (std::cos(p[1] + p[2] + gamma12) * ep12 +
                                  std::cos(p[1] - p[2] - gamma12) * em12);
        const double c13 = 0.5 * (std::cos(p[0] + p[2] + gamma13) * ep13 +
                                  std::cos(p[0] - p[2] - gamma13) * em13);
        return c12 + c23 - c13;
    }
};

bool lex_less(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    for (std::size_t i = 0; i < 3; ++i) {
        if (a[i] != b[i]) {
            return a[i] < b[i];
        }
    }
    return false;
}

// Nelder-Mead ascent on the witness (deterministic tie handling).
std::pair<double, std::array<double, 3>> simplex_ascent(
    const WitnessContext& w, const std::array<double, 3>& start, double scale,
    double tol, int max_iterations) {
    struct Vertex {
        std::array<double, 3> x;
        double f;
    };
    std::array<Vertex, 4> simplex;
    simplex[0] = {start, w(start)};
    for (std::size_t i = 0; i < 3; ++i) {
        std::array<double, 3> x = start;
        x[i] += scale;
        simplex[i + 1] = {x, w(x)};
    }

    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
    };
    order();

    for (int it = 0; it < max_iterations; ++it) {
        if (simplex.front().f - simplex.back().f < tol) {
            break;
        }
        std::array<double, 3> centroid{};
        for (std::size_t v = 0; v < 3; ++v) {
            for (std::size_t i = 0; i < 3; ++i) {
                centroid[i] += simplex[v].x[i] / 3.0;
            }
        }
        auto affine = [&](double coeff) {
            std::array<double, 3> x;
            for (std::size_t i = 0; i < 3; ++i) {
                x[i] = centroid[i] + coeff * (centroid[i] - simplex[3].x[i]);
            }
            return x;
        };

        const auto xr = affine(1.0);
        const double fr = w(xr);
        if (fr > simplex[0].f) {
            const auto xe = affine(2.0);
            const double fe = w(xe);
            simplex[3] = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
        } else if (fr > simplex[2].f) {
            simplex[3] = {xr, fr};
        } else {
            const auto xc = affine(-0.5);
            const double fc = w(xc);
            if (fc > simplex[3].f) {
                simplex[3] = {xc, fc};
            } else {
                for (std::size_t v = 1; v < 4; ++v) {
                    for (std::size_t i = 0; i < 3; ++i) {
                        simplex[v].x[i] =
                            simplex[0].x[i] + 0.5 * (simplex[v].x[i] - simplex[0].x[i]);
                    }
                    simplex[v].f = w(simplex[v].x);
                }
            }
        }
        order();
    }
    return {simplex.front().f, simplex.front().x};
}

}  // namespace

double thermal_two_time(double alpha, double theta, double nbar, double p1, double p2) {
    const double x = alpha * alpha * (2.0 * nbar + 1.0);
    const double gamma = alpha * alpha * std::sin(theta);
    return 0.5 * (std::cos(p1 + p2 + gamma) * std::exp(-x * (1.0 + std::cos(theta))) +
                  std::cos(p1 - p2 - gamma) * std::exp(-x * (1.0 - std::cos(theta))));
}

double lgi_w(double alpha, double theta, double nbar,
             const std::array<double, 3>& phases) {
    if (alpha < 0.0 || nbar < 0.0) {
        throw std::invalid_argument("lgi_w: alpha and nbar must be non-negative");
    }
    return WitnessContext(alpha, theta, nbar, true)(phases);
}

double lgi_w_without_gamma(double alpha, double theta, double nbar,
                           const std::array<double, 3>& phases) {
    if (alpha < 0.0 || nbar < 0.0) {
        throw std::invalid_argument("lgi_w: alpha and nbar must be non-negative");
    }
    return WitnessContext(alpha, theta, nbar, false)(phases);
}

LgiPoint maximize_w(double alpha, double theta, double nbar,
                    const OptimizerOpts& opts) {
    if (alpha < 0.0 || nbar < 0.0) {
        throw std::invalid_argument("maximize_w: alpha and nbar must be non-negative");
    }
    if (opts.grid_resolution < 8) {
        throw std::invalid_argument("maximize_w: grid resolution must be >= 8");
    }
    const WitnessContext w(alpha, theta, nbar, opts.include_gamma);
    const int res = opts.grid_resolution;
    const double step = kTwoPi / res;

    struct Cell {
        double f;
        std::array<double, 3> x;
    };
    std::vector<Cell> best;
    best.reserve(static_cast<std::size_t>(opts.refine_starts) + 1);
    auto consider = [&](double f, const std::array<double, 3>& x) {
        const auto pos = std::find_if(best.begin(), best.end(), [&](const Cell& c) {
            return f > c.f || (f == c.f && lex_less(x, c.x));
        });
        if (pos != best.end() || best.size() < static_cast<std::size_t>(opts.refine_starts)) {
            best.insert(pos, Cell{f, x});
            if (best.size() > static_cast<std::size_t>(opts.refine_starts)) {
                best.pop_back();
            }
        }
    };

    std::array<double, 3> x{};
    for (int i = 0; i < res; ++i) {
        x[0] = i * step;
        for (int j = 0; j < res; ++j) {
            x[1] = j * step;
            for (int k = 0; k < res; ++k) {
                x[2] = k * step;
                consider(w(x), x);
            }
        }
    }

    double best_f = -4.0;
    std::array<double, 3> best_x{};
    for (const Cell& cell : best) {
        const auto [f, xr] =
            simplex_ascent(w, cell.x, 0.5 * step, opts.tol_w, opts.max_iterations);
        std::array<double, 3> wrapped{wrap_phase(xr[0]), wrap_phase(xr[1]),
                                      wrap_phase(xr[2])};
        if (f > best_f + 1e-12 ||
            (std::abs(f - best_f) <= 1e-12 && lex_less(wrapped, best_x))) {
            best_f = std::max(f, best_f);
            best_x = wrapped;
        }
    }

    if (best_f > 1.5 + 1e-6) {
        std::cerr << "maximize_w: W = " << best_f
                  << " exceeds the expected quantum bound 3/2 (alpha=" << alpha
                  << ", theta=" << theta << ", nbar=" << nbar << ")\n";
    }

    return LgiPoint{alpha, theta, nbar, best_f, best_x};
}

std::vector<LgiPoint> sweep(std::span<const double> alphas,
                            std::span<const double> thetas, double nbar,
                            const OptimizerOpts& opts, int threads) {
    if (alphas.empty() || thetas.empty()) {
        throw std::invalid_argument("sweep: empty grid");
    }
    const std::size_t total = alphas.size() * thetas.size();
    std::vector<LgiPoint> out(total);
    const int workers = std::max(1, threads);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
            const std::size_t ia = idx / thetas.size();
            const std::size_t it = idx % thetas.size();
            out[idx] = maximize_w(alphas[ia], thetas[it], nbar, opts);
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    return out;
}

double nbar_threshold(double theta, double alpha_small) {
    if (!(alpha_small > 0.0)) {
        throw std::domain_error("nbar_threshold: alpha_small must be positive");
    }
    if (alpha_small > 0.1) {
        throw std::invalid_argument("nbar_threshold: alpha_small must be <= 0.1");
    }
    auto wmax = [&](double nbar) { return maximize_w(alpha_small, theta, nbar).w_max; };

    if (wmax(0.0) <= 1.0 + 1e-12) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = 0.5;
    while (wmax(hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 64.0) {
            throw std::runtime_error("nbar_threshold: no crossing found");
        }
    }
    for (int it = 0; it < 60 && hi - lo > 1e-4; ++it) {
        const double mid = 0.5 * (lo + hi);
        (wmax(mid) > 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace rlg::lgi

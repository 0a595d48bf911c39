#pragma once

// Quadrature and global supremum-search backbone used by every other module.
//
// Integration is composite 16-point Gauss-Legendre with adaptive bisection on
// a per-panel error estimate. Declared algebraic endpoint singularities
// (y - x0)^beta with beta in (-1, 0] are removed by the substitution
// u = (y - x0)^(beta + 1) before any panel is formed. Improper upper limits
// are handled by geometric tail doubling.
//
// The supremum search runs a multi-scale coarse-to-fine grid with local
// refinement and a divergence heuristic over the scale ladder.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <future>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "onesided/errors.hpp"

namespace onesided {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Threading

// Global worker count used by grid evaluation; 1 = fully sequential. The
// reduction is deterministic either way, so results do not depend on it.
inline int& thread_count() {
    static int n = 1;
    return n;
}

// Applies fn(i) for i in [0, n) and collects results in index order.
template <class Fn>
std::vector<double> indexed_map(std::size_t n, const Fn& fn) {
    std::vector<double> out(n);
    const int workers = std::min<int>(thread_count(), static_cast<int>(n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) break;
            out[i] = fn(i);
        }
    };
    std::vector<std::future<void>> futures;
    futures.reserve(workers - 1);
    for (int t = 1; t < workers; ++t) futures.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : futures) f.get();
    return out;
}

// ---------------------------------------------------------------------------
// Grids

inline std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) throw InvalidParams("linspace needs n >= 1");
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = 0.5 * (lo + hi);
        return g;
    }
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return g;
}

inline std::vector<double> logspace(double lo, double hi, int n) {
    if (lo <= 0 || hi <= 0) throw InvalidParams("logspace needs positive bounds");
    auto g = linspace(std::log(lo), std::log(hi), n);
    for (auto& x : g) x = std::exp(x);
    return g;
}

// Geometric ladder lo, lo*factor, ..., capped at hi (hi always included).
inline std::vector<double> geometric_ladder(double lo, double hi, double factor = 2.0) {
    if (lo <= 0 || hi < lo || factor <= 1) throw InvalidParams("bad geometric ladder");
    std::vector<double> g;
    for (double v = lo; v < hi; v *= factor) g.push_back(v);
    g.push_back(hi);
    return g;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre panel rule

namespace detail {

struct GaussLegendre16 {
    std::array<double, 16> node{};
    std::array<double, 16> weight{};

    GaussLegendre16() {
        // Nodes via Newton iteration on P_16; accurate to machine precision.
        constexpr int n = 16;
        for (int i = 0; i < n / 2; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0;
            for (int it = 0; it < 64; ++it) {
                double p0 = 1.0, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                const double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-17) break;
            }
            const double w = 2.0 / ((1.0 - t * t) * dp * dp);
            node[i] = -t;
            node[n - 1 - i] = t;
            weight[i] = w;
            weight[n - 1 - i] = w;
        }
    }
};

inline const GaussLegendre16& gl16() {
    static const GaussLegendre16 rule;
    return rule;
}

template <class F>
double gl16_panel(const F& f, double a, double b, long& evals) {
    const auto& rule = gl16();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0;
    for (int i = 0; i < 16; ++i) {
        const double v = f(mid + half * rule.node[i]);
        if (!std::isfinite(v)) throw NonIntegrable("non-finite integrand value");
        sum += rule.weight[i] * v;
    }
    evals += 16;
    return half * sum;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// integrate

struct IntegralEstimate {
    double value = 0;
    double error_bound = 0;  // absolute
    long evaluations = 0;
    bool converged = true;
};

struct EndpointSingularity {
    enum class At { Lower, Upper };
    At at = At::Lower;
    double exponent = 0;  // beta in (-1, 0]: integrand behaves like (y - x0)^beta
};

struct IntegrateOptions {
    double tol = 1e-10;      // absolute target
    double tol_rel = 1e-12;  // relative escape for large-magnitude integrals
    std::optional<EndpointSingularity> singularity;
    std::vector<double> breakpoints;  // interior points where the integrand kinks
    int max_depth = 48;
    long max_evals = 8'000'000;
    double tail_initial_window = 1.0;  // first segment width for hi = +inf
    int tail_max_segments = 64;
};

// Type-erased integrand: the substitution and tail paths recurse, so the
// recursion point must not mint new template instantiations.
using Integrand = std::function<double(double)>;

namespace detail {

inline IntegralEstimate adaptive_core(const Integrand& f, double lo, double hi,
                                      const IntegrateOptions& opt) {
    IntegralEstimate est;
    if (lo == hi) return est;

    // Segment at declared breakpoints, then refine adaptively inside each.
    std::vector<double> cuts{lo, hi};
    for (double b : opt.breakpoints)
        if (b > lo && b < hi) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    struct Panel {
        double a, b, whole;
        int depth;
    };
    const double span = hi - lo;
    std::vector<Panel> stack;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i] == cuts[i + 1]) continue;
        stack.push_back({cuts[i], cuts[i + 1], detail::gl16_panel(f, cuts[i], cuts[i + 1], est.evaluations), 0});
    }

    double l1 = 0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double m = 0.5 * (p.a + p.b);
        const double left = detail::gl16_panel(f, p.a, m, est.evaluations);
        const double right = detail::gl16_panel(f, m, p.b, est.evaluations);
        const double refined = left + right;
        const double err = std::abs(refined - p.whole);
        const double local_tol =
            opt.tol * ((p.b - p.a) / span) + opt.tol_rel * std::abs(refined);
        const bool budget_out = est.evaluations > opt.max_evals;
        if (err <= local_tol || p.depth >= opt.max_depth || m <= p.a || m >= p.b || budget_out) {
            est.value += refined;
            est.error_bound += err;
            l1 += std::abs(refined);
            if (budget_out || (err > local_tol && p.depth >= opt.max_depth)) est.converged = false;
        } else {
            stack.push_back({p.a, m, left, p.depth + 1});
            stack.push_back({m, p.b, right, p.depth + 1});
        }
    }
    if (est.error_bound > opt.tol + opt.tol_rel * std::max(std::abs(est.value), l1))
        est.converged = false;
    return est;
}

}  // namespace detail

// Integrates f over (lo, hi). hi may be +inf when the tail is integrable; a
// declared algebraic endpoint singularity is removed by substitution before
// composite quadrature.
inline IntegralEstimate integrate(const Integrand& f, double lo, double hi,
                                  const IntegrateOptions& opt = {}) {
    if (!(lo < hi)) {
        if (lo == hi) return {};
        throw InvalidParams("integrate: requires lo < hi");
    }

    if (opt.singularity) {
        const auto& s = *opt.singularity;
        if (s.exponent <= -1.0)
            throw NonIntegrable("declared endpoint exponent <= -1");
        if (std::isinf(hi) && s.at == EndpointSingularity::At::Upper)
            throw InvalidParams("singularity at infinite endpoint");
        const double q = 1.0 / (s.exponent + 1.0);  // q >= 1
        IntegrateOptions inner = opt;
        inner.singularity.reset();
        inner.breakpoints.clear();
        if (s.at == EndpointSingularity::At::Lower) {
            const double x0 = lo;
            auto g = [&f, x0, q](double u) {
                const double y = x0 + std::pow(u, q);
                return f(y) * q * std::pow(u, q - 1.0);
            };
            const double u_hi = std::isinf(hi) ? kInf : std::pow(hi - x0, 1.0 / q);
            for (double b : opt.breakpoints)
                if (b > lo && b < hi) inner.breakpoints.push_back(std::pow(b - x0, 1.0 / q));
            return integrate(g, 0.0, u_hi, inner);
        }
        const double x0 = hi;
        auto g = [&f, x0, q](double u) {
            const double y = x0 - std::pow(u, q);
            return f(y) * q * std::pow(u, q - 1.0);
        };
        for (double b : opt.breakpoints)
            if (b > lo && b < hi) inner.breakpoints.push_back(std::pow(x0 - b, 1.0 / q));
        return integrate(g, 0.0, std::pow(hi - lo, 1.0 / q), inner);
    }

    if (std::isinf(hi)) {
        // Geometric cutoffs lo + W, lo + 2W, lo + 4W, ... until the tail
        // increment drops below tol/10, with growth-based divergence detection.
        IntegralEstimate total;
        IntegrateOptions seg_opt = opt;
        seg_opt.tol = opt.tol / 4;
        double a = lo;
        double width = opt.tail_initial_window;
        double prev_seg = 0;
        int quiet = 0, growing = 0;
        for (int k = 0; k < opt.tail_max_segments; ++k) {
            const double b = a + width;
            seg_opt.breakpoints.clear();
            for (double br : opt.breakpoints)
                if (br > a && br < b) seg_opt.breakpoints.push_back(br);
            const IntegralEstimate seg = detail::adaptive_core(f, a, b, seg_opt);
            total.value += seg.value;
            total.error_bound += seg.error_bound;
            total.evaluations += seg.evaluations;
            total.converged = total.converged && seg.converged;
            const double tail_tol =
                std::max(opt.tol / 10.0, opt.tol_rel * std::abs(total.value) / 10.0);
            if (std::abs(seg.value) < tail_tol) {
                if (++quiet >= 2) return total;
            } else {
                quiet = 0;
            }
            if (k > 0 && std::abs(seg.value) > 1.5 * std::abs(prev_seg) &&
                std::abs(seg.value) > opt.tol) {
                if (++growing >= 8) throw NonIntegrable("divergent tail at +inf");
            } else {
                growing = 0;
            }
            prev_seg = seg.value;
            a = b;
            width *= 2;
        }
        total.converged = false;
        return total;
    }

    return detail::adaptive_core(f, lo, hi, opt);
}

// ---------------------------------------------------------------------------
// sup_search

struct Axis {
    enum class Spacing { Linear, Log };
    Spacing spacing = Spacing::Linear;
    double lo = 0;
    double hi = 1;
    bool laddered = false;  // upper bound capped by the active scale-ladder rung
};

struct SearchSpec {
    double window = 8.0;  // half-width of location axes
    std::vector<double> scale_ladder = {1, 2, 4, 8, 16};
    double scale_min = 1e-3;
    int coarse_grid = 16;
    int refine_rounds = 3;
    double tolerance = 1e-3;  // relative
    double divergence_factor = 2.0;
    int divergence_transitions = 3;  // consecutive rung-to-rung growths

    void validate() const {
        if (window <= 0) throw InvalidParams("SearchSpec: window must be positive");
        if (coarse_grid < 8) throw InvalidParams("SearchSpec: coarse_grid must be >= 8");
        if (refine_rounds < 1) throw InvalidParams("SearchSpec: refine_rounds must be >= 1");
        if (scale_ladder.empty()) throw InvalidParams("SearchSpec: empty scale ladder");
        if (!std::is_sorted(scale_ladder.begin(), scale_ladder.end()))
            throw InvalidParams("SearchSpec: scale ladder must be increasing");
    }
};

struct SupEstimate {
    double value = -kInf;
    std::vector<double> witness;
    int refinement_levels = 0;
    bool divergent = false;
    std::vector<std::pair<double, double>> divergence_evidence;  // (scale, rung max)
    long failed_evaluations = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

namespace detail {

struct AxisRange {
    // Bounds in transform space (log for Log axes).
    double t_lo, t_hi;
    Axis::Spacing spacing;

    double to_x(double t) const { return spacing == Axis::Spacing::Log ? std::exp(t) : t; }
};

inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct GridBest {
    double value = -kInf;
    std::vector<double> point;      // coordinates in x space
    std::vector<double> t_point;    // coordinates in transform space
    bool hit_infinite = false;
};

template <class Obj>
GridBest evaluate_grid(const Obj& objective, const std::vector<AxisRange>& ranges, int n,
                       long& failures) {
    const std::size_t dims = ranges.size();
    std::vector<std::vector<double>> t_grids(dims);
    for (std::size_t d = 0; d < dims; ++d)
        t_grids[d] = linspace(ranges[d].t_lo, ranges[d].t_hi, n);

    std::size_t cells = 1;
    for (std::size_t d = 0; d < dims; ++d) cells *= t_grids[d].size();

    std::atomic<long> failed{0};
    auto values = indexed_map(cells, [&](std::size_t idx) {
        std::vector<double> x(dims);
        std::size_t rest = idx;
        for (std::size_t d = dims; d-- > 0;) {
            const std::size_t i = rest % t_grids[d].size();
            rest /= t_grids[d].size();
            x[d] = ranges[d].to_x(t_grids[d][i]);
        }
        double v;
        try {
            v = objective(x);
        } catch (const std::exception&) {
            failed.fetch_add(1);
            return -kInf;
        }
        if (std::isnan(v)) {
            failed.fetch_add(1);
            return -kInf;
        }
        return v;
    });
    failures += failed.load();

    // Deterministic reduction: scan in lexicographic cell order, replace only
    // on strictly greater value, so ties keep the lexicographically smallest
    // witness regardless of evaluation order.
    GridBest best;
    std::vector<double> x(dims), t(dims);
    for (std::size_t idx = 0; idx < cells; ++idx) {
        std::size_t rest = idx;
        for (std::size_t d = dims; d-- > 0;) {
            const std::size_t i = rest % t_grids[d].size();
            rest /= t_grids[d].size();
            t[d] = t_grids[d][i];
            x[d] = ranges[d].to_x(t[d]);
        }
        const double v = values[idx];
        if (std::isinf(v) && v > 0) {
            best.hit_infinite = true;
            best.value = kInf;
            best.point = x;
            best.t_point = t;
            return best;
        }
        if (v > best.value) {
            best.value = v;
            best.point = x;
            best.t_point = t;
        }
    }
    return best;
}

}  // namespace detail

// Multi-scale coarse-to-fine maximization of `objective` over the box given
// by `axes`. Laddered axes have their upper bound capped by each scale-ladder
// rung in turn; growth of the per-rung maxima by more than
// divergence_factor over divergence_transitions consecutive rungs marks the
// objective divergent. Evaluation failures count as -inf.
inline SupEstimate sup_search(const Objective& objective, const std::vector<Axis>& axes,
                              const SearchSpec& spec) {
    spec.validate();
    if (axes.empty()) throw EmptyDomain("sup_search: no axes");
    for (const auto& ax : axes) {
        if (!(ax.lo < ax.hi)) throw EmptyDomain("sup_search: empty axis range");
        if (ax.spacing == Axis::Spacing::Log && ax.lo <= 0)
            throw InvalidParams("sup_search: log axis needs positive bounds");
    }

    const bool any_laddered =
        std::any_of(axes.begin(), axes.end(), [](const Axis& a) { return a.laddered; });
    std::vector<double> rungs = any_laddered ? spec.scale_ladder : std::vector<double>{1.0};

    SupEstimate est;
    std::vector<std::pair<double, double>> rung_maxima;

    for (double rung : rungs) {
        std::vector<detail::AxisRange> ranges;
        ranges.reserve(axes.size());
        bool degenerate = false;
        for (const auto& ax : axes) {
            double lo = ax.lo, hi = ax.hi;
            if (ax.laddered) hi = std::min(hi, rung);
            if (hi <= lo) degenerate = true;
            if (ax.spacing == Axis::Spacing::Log)
                ranges.push_back({std::log(lo), std::log(std::max(hi, lo)), ax.spacing});
            else
                ranges.push_back({lo, std::max(hi, lo), ax.spacing});
        }
        if (degenerate) continue;

        detail::GridBest best =
            detail::evaluate_grid(objective, ranges, spec.coarse_grid, est.failed_evaluations);

        // Local refinement: re-grid around the incumbent with one coarse cell
        // of slack per axis, clamped to the rung box.
        int rounds = 0;
        while (!best.hit_infinite && best.value > -kInf && rounds < spec.refine_rounds) {
            std::vector<detail::AxisRange> local(ranges);
            for (std::size_t d = 0; d < ranges.size(); ++d) {
                const double spacing = (ranges[d].t_hi - ranges[d].t_lo) /
                                       std::max(1, spec.coarse_grid - 1) /
                                       std::pow(2.0, rounds);
                local[d].t_lo = std::max(ranges[d].t_lo, best.t_point[d] - spacing);
                local[d].t_hi = std::min(ranges[d].t_hi, best.t_point[d] + spacing);
                if (local[d].t_hi < local[d].t_lo) local[d].t_hi = local[d].t_lo;
            }
            detail::GridBest refined =
                detail::evaluate_grid(objective, local, spec.coarse_grid, est.failed_evaluations);
            if (refined.hit_infinite) {
                best = refined;
                break;
            }
            if (refined.value > best.value) best = refined;
            ++rounds;
        }
        est.refinement_levels = std::max(est.refinement_levels, rounds);

        if (best.hit_infinite) {
            est.value = kInf;
            est.witness = best.point;
            est.divergent = true;
            est.divergence_evidence.emplace_back(rung, kInf);
            return est;
        }
        if (best.value > est.value ||
            (best.value == est.value && !best.point.empty() &&
             (est.witness.empty() || detail::lex_less(best.point, est.witness)))) {
            if (best.value > est.value) {
                est.value = best.value;
                est.witness = best.point;
            }
        }
        rung_maxima.emplace_back(rung, best.value);
    }

    if (est.value == -kInf) throw AllEvaluationsFailed("sup_search: every probe failed");

    // Divergence: a run of divergence_transitions consecutive rung-to-rung
    // growths by at least divergence_factor.
    if (any_laddered && rung_maxima.size() >= 2) {
        int run = 0;
        std::size_t run_start = 0;
        for (std::size_t k = 0; k + 1 < rung_maxima.size(); ++k) {
            const double a = rung_maxima[k].second, b = rung_maxima[k + 1].second;
            if (a > 0 && b >= spec.divergence_factor * a) {
                if (run == 0) run_start = k;
                ++run;
                if (run >= spec.divergence_transitions) {
                    est.divergent = true;
                    est.divergence_evidence.assign(rung_maxima.begin() + run_start,
                                                   rung_maxima.begin() + k + 2);
                }
            } else {
                run = 0;
            }
        }
    }
    if (!est.divergent) est.divergence_evidence = rung_maxima;
    return est;
}

// ---------------------------------------------------------------------------
// Log-log least squares, shared by the fit-style diagnostics.

struct LogLogFit {
    double exponent = 0;  // slope
    double constant = 0;  // exp(intercept)
    double residual = 0;  // RMS residual in log space
    bool degenerate = false;
};

inline LogLogFit fit_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
    LogLogFit fit;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
        if (xs[i] > 0 && ys[i] > 0) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    }
    if (lx.size() < 2) {
        fit.degenerate = true;
        return fit;
    }
    const double n = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0) {
        fit.degenerate = true;
        return fit;
    }
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.constant = std::exp(intercept);
    double rss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (intercept + fit.exponent * lx[i]);
        rss += r * r;
    }
    fit.residual = std::sqrt(rss / n);
    return fit;
}

}  // namespace onesided

#include "qkd/analysis.hpp"

#include <cmath>
#include <limits>

namespace qkd {

double SchemeMetrics::ratio() const {
    if (p_d == 0.0) return std::numeric_limits<double>::infinity();
    return eta_e / p_d;
}

SchemeMetrics scheme_metrics(const SchemeConfig& config) {
    SchemeMetrics mx;
    mx.scheme = config.scheme;
    mx.n = config.superposition_count();
    switch (config.scheme) {
        case Scheme::Bb84:
            mx.eta_p = 0.25;   // 1/2 input coupler times 1/2 basis agreement
            mx.eta_e = 0.585;  // Breidbart intercept/resend information bound
            mx.p_d = 0.25;
            break;
        case Scheme::BltPlus:
            mx.eta_p = 0.625;
            mx.eta_e = 0.2;
            mx.p_d = 0.4;
            break;
        case Scheme::Iwy:
        case Scheme::Blt: {
            const double n = static_cast<double>(mx.n);
            mx.eta_p = 1.0 - 1.0 / n;
            // Eve measures exactly one of the N-1 adjacent differences.
            mx.eta_e = 1.0 / (n - 1.0);
            mx.p_d = (n - 2.0) / (2.0 * (n - 1.0));
            mx.extrapolated = config.m != 2;
            break;
        }
    }
    return mx;
}

double mu_r(double p_o) {
    if (!(p_o >= 0.0 && p_o <= 1.0))
        throw std::invalid_argument("mu_r: p_o must lie in [0, 1]");
    if (p_o == 0.0 || p_o == 1.0) return 1.0;  // p log p -> 0
    return 1.0 + (1.0 - p_o) * std::log2(1.0 - p_o) + p_o * std::log2(p_o);
}

double key_fraction(const SchemeMetrics& metrics, double p_o) {
    if (!(p_o >= 0.0 && p_o <= 0.5))
        throw std::invalid_argument("key_fraction: p_o must lie in [0, 1/2]");
    const double discard = p_o == 0.0 ? 0.0 : metrics.eta_e * p_o / metrics.p_d;
    return std::max(0.0, metrics.eta_p * (mu_r(p_o) - discard));
}

double crossover(const SchemeMetrics& a, const SchemeMetrics& b, double lo, double hi) {
    if (!(lo >= 0.0 && hi <= 0.5 && lo < hi))
        throw std::invalid_argument("crossover: bracket must satisfy 0 <= lo < hi <= 1/2");
    const auto g = [&](double p) { return key_fraction(a, p) - key_fraction(b, p); };

    // Scan for a strict sign change; the clamped tails where both curves sit
    // at zero must not count as a crossover.
    constexpr int kScanIntervals = 512;
    double x0 = lo;
    double g0 = g(lo);
    double left = 0.0, right = 0.0, g_left = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= kScanIntervals; ++i) {
        const double x1 = lo + (hi - lo) * i / kScanIntervals;
        const double g1 = g(x1);
        if (g0 != 0.0 && g1 != 0.0 && std::signbit(g0) != std::signbit(g1)) {
            left = x0;
            right = x1;
            g_left = g0;
            bracketed = true;
            break;
        }
        x0 = x1;
        g0 = g1;
    }
    if (!bracketed)
        throw BracketError("crossover: key-fraction difference does not change sign on the bracket");

    for (int iter = 0; iter < 200 && right - left > 1e-6; ++iter) {
        const double mid = 0.5 * (left + right);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (std::signbit(gm) == std::signbit(g_left)) {
            left = mid;
            g_left = gm;
        } else {
            right = mid;
        }
    }
    return 0.5 * (left + right);
}

MultiphotonLeakage multiphoton_leakage(Scheme scheme, double n_bar) {
    if (!(n_bar >= 0.0))
        throw std::invalid_argument("multiphoton_leakage: n_bar must be non-negative");
    MultiphotonLeakage out;
    out.outside_weak_regime = n_bar > 0.3;
    switch (scheme) {
        case Scheme::Bb84:
        case Scheme::Iwy:
            out.fraction = n_bar / 4.0;
            break;
        case Scheme::Blt:
            out.fraction = n_bar / 6.0;
            break;
        case Scheme::BltPlus:
            break;  // no known bound
    }
    return out;
}

std::array<SchemeMetrics, 4> canonical_metrics() {
    return {scheme_metrics(SchemeConfig::make(Scheme::Bb84)),
            scheme_metrics(SchemeConfig::make(Scheme::Iwy, 2)),
            scheme_metrics(SchemeConfig::make(Scheme::Blt, 2)),
            scheme_metrics(SchemeConfig::make(Scheme::BltPlus, 2))};
}

std::vector<SweepRow> sweep(const std::vector<double>& p_o_grid) {
    if (p_o_grid.empty()) throw std::invalid_argument("sweep: empty grid");
    for (std::size_t i = 0; i < p_o_grid.size(); ++i) {
        if (!(p_o_grid[i] >= 0.0 && p_o_grid[i] <= 0.5))
            throw std::invalid_argument("sweep: grid values must lie in [0, 1/2]");
        if (i > 0 && !(p_o_grid[i] > p_o_grid[i - 1]))
            throw std::invalid_argument("sweep: grid must increase strictly");
    }
    const auto metrics = canonical_metrics();
    std::vector<SweepRow> rows;
    rows.reserve(p_o_grid.size());
    for (double p : p_o_grid) {
        SweepRow row;
        row.p_o = p;
        row.mu_r = mu_r(p);
        for (std::size_t k = 0; k < metrics.size(); ++k) {
            const double discard = p == 0.0 ? 0.0 : metrics[k].eta_e * p / metrics[k].p_d;
            const double raw = metrics[k].eta_p * (row.mu_r - discard);
            row.r_k[k] = std::max(0.0, raw);
            row.clamped[k] = raw < 0.0;
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<double> linear_grid(double min, double max, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("linear_grid: step must be positive");
    if (!(min >= 0.0 && max <= 0.5 && min <= max))
        throw std::invalid_argument("linear_grid: range must lie in [0, 1/2]");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double p = min + i * step;
        if (p > max + step * 1e-9) break;
        grid.push_back(std::min(p, 0.5));
    }
    return grid;
}

}  // namespace qkd

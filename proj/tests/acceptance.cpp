// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Every tolerance is pinned here, in code.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qkd/adversary.hpp"
#include "qkd/analysis.hpp"
#include "qkd/protocol.hpp"
#include "qkd/report.hpp"

using namespace qkd;

namespace {

int workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

// 1. eta_p over 1e5 trains: 1/4, 2/3, 3/4, 5/8 within +-0.01
Check criterion1() {
    Check c;
    const struct {
        Scheme scheme;
        int m;
        double eta_p;
    } cases[] = {{Scheme::Bb84, 1, 0.25},
                 {Scheme::Iwy, 2, 2.0 / 3.0},
                 {Scheme::Blt, 2, 0.75},
                 {Scheme::BltPlus, 2, 0.625}};
    for (const auto& k : cases) {
        const auto rec = run_session(SchemeConfig::make(k.scheme, k.m), 100000, ChannelModel{},
                                     std::nullopt, 20260801, workers());
        const double hat = empirical_metrics(rec).eta_p_hat;
        c.expect(std::abs(hat - k.eta_p) <= 0.01,
                 fmt("%s eta_p_hat=%.4f vs %.4f", scheme_name(k.scheme), hat, k.eta_p));
    }
    return c;
}

// 2. estimate_attack_params over 1e5 trains: (1/2,1/4) iwy, (1/3,1/3) blt,
//    (1/5,2/5) blt_plus; bb84 p_d=1/4 and guess success cos^2(pi/8); +-0.01
Check criterion2() {
    Check c;
    const struct {
        Scheme scheme;
        int m;
        double eta_e;
        double p_d;
    } cases[] = {{Scheme::Iwy, 2, 0.5, 0.25},
                 {Scheme::Blt, 2, 1.0 / 3.0, 1.0 / 3.0},
                 {Scheme::BltPlus, 2, 0.2, 0.4}};
    for (const auto& k : cases) {
        const auto est = estimate_attack_params(SchemeConfig::make(k.scheme, k.m), 100000, 31, workers());
        c.expect(std::abs(est.eta_e_hat - k.eta_e) <= 0.01,
                 fmt("%s eta_e_hat=%.4f vs %.4f", scheme_name(k.scheme), est.eta_e_hat, k.eta_e));
        c.expect(std::abs(est.p_d_hat - k.p_d) <= 0.01,
                 fmt("%s p_d_hat=%.4f vs %.4f", scheme_name(k.scheme), est.p_d_hat, k.p_d));
    }
    const auto bb84 = estimate_attack_params(SchemeConfig::make(Scheme::Bb84), 100000, 31, workers());
    const double guess_target = (2.0 + std::sqrt(2.0)) / 4.0;
    c.expect(std::abs(bb84.p_d_hat - 0.25) <= 0.01, fmt("bb84 p_d_hat=%.4f vs 0.25", bb84.p_d_hat));
    c.expect(std::abs(bb84.guess_success_hat - guess_target) <= 0.01,
             fmt("bb84 guess=%.4f vs %.4f", bb84.guess_success_hat, guess_target));
    return c;
}

// 3. eve_fraction_hat / p_o_hat = eta_e / p_d within +-0.05 for the train
//    schemes at attack fractions 0.2, 0.5, 1.0 with zero intrinsic noise
Check criterion3() {
    Check c;
    const struct {
        Scheme scheme;
        double ratio;
    } cases[] = {{Scheme::Iwy, 2.0}, {Scheme::Blt, 1.0}, {Scheme::BltPlus, 0.5}};
    for (const auto& k : cases) {
        for (const double f : {0.2, 0.5, 1.0}) {
            const auto rec = run_session(SchemeConfig::make(k.scheme, 2), 1000000,
                                         ChannelModel{0.0, f}, AttackStrategy{AttackKind::SwitchPair},
                                         5150, workers());
            const auto m = empirical_metrics(rec);
            const double ratio = m.eve_fraction_hat / m.p_o_hat;
            c.expect(std::abs(ratio - k.ratio) <= 0.05,
                     fmt("%s f=%.1f ratio=%.4f vs %.2f", scheme_name(k.scheme), f, ratio, k.ratio));
        }
    }
    return c;
}

// 4. eta_p scaling: 1 - 2^-m (blt) and 1 - 1/(m+1) (iwy) for m = 1..6,
//    within 4 sigma binomial bounds over 1e5 trains
Check criterion4() {
    Check c;
    constexpr std::int64_t kTrains = 100000;
    for (int m = 1; m <= 6; ++m) {
        for (const Scheme scheme : {Scheme::Blt, Scheme::Iwy}) {
            const auto config = SchemeConfig::make(scheme, m);
            const double eta = scheme == Scheme::Blt ? 1.0 - std::ldexp(1.0, -m)
                                                     : 1.0 - 1.0 / (m + 1.0);
            const auto rec = run_session(config, kTrains, ChannelModel{}, std::nullopt,
                                         900 + static_cast<std::uint64_t>(m), workers());
            const double hat = empirical_metrics(rec).eta_p_hat;
            const double sigma = std::sqrt(eta * (1.0 - eta) / static_cast<double>(kTrains));
            c.expect(std::abs(hat - eta) <= 4.0 * sigma,
                     fmt("%s m=%d eta_p_hat=%.5f vs %.5f (4sigma=%.5f)", scheme_name(scheme), m, hat,
                         eta, 4.0 * sigma));
        }
    }
    return c;
}

// 5. sweep over [0, 0.25]: R_k(0) equals the eta_p set exactly, blt maximal
//    for p_o <= 0.12, blt_plus maximal on [0.14, 0.25], blt/blt_plus root at
//    0.128 +- 0.003
Check criterion5() {
    Check c;
    const auto metrics = canonical_metrics();
    const auto rows = sweep(linear_grid(0.0, 0.25, 0.005));
    c.expect(rows.size() == 51, fmt("rows=%zu vs 51", rows.size()));

    const double eta_set[4] = {0.25, 2.0 / 3.0, 0.75, 0.625};
    for (std::size_t k = 0; k < 4; ++k) {
        c.expect(rows[0].r_k[k] == metrics[k].eta_p, fmt("R_k(0)[%zu] != eta_p bit-for-bit", k));
        c.expect(std::abs(rows[0].r_k[k] - eta_set[k]) <= 1e-15,
                 fmt("R_k(0)[%zu]=%.17g vs %.17g", k, rows[0].r_k[k], eta_set[k]));
    }

    for (const auto& row : rows) {
        if (row.p_o <= 0.12 + 1e-12) {
            for (std::size_t k = 0; k < 4; ++k)
                if (k != 2)
                    c.expect(row.r_k[2] > row.r_k[k],
                             fmt("blt not maximal at p_o=%.3f", row.p_o));
        }
        if (row.p_o >= 0.14 - 1e-12) {
            for (std::size_t k = 0; k < 4; ++k)
                if (k != 3)
                    c.expect(row.r_k[3] > row.r_k[k],
                             fmt("blt_plus not maximal at p_o=%.3f", row.p_o));
        }
    }

    const double root = crossover(metrics[2], metrics[3], 0.05, 0.25);
    c.expect(std::abs(root - 0.128) <= 0.003, fmt("blt/blt_plus root=%.6f vs 0.128+-0.003", root));
    return c;
}

// 6. iwy/blt_plus crossover at 0.032 +- 0.005
Check criterion6() {
    Check c;
    const auto metrics = canonical_metrics();
    const double root = crossover(metrics[1], metrics[3], 0.005, 0.1);
    c.expect(std::abs(root - 0.032) <= 0.005, fmt("iwy/blt_plus root=%.6f vs 0.032+-0.005", root));
    return c;
}

// 7. property suite: unitarity 1e-12, zero-noise key agreement over 1e4
//    trains for all schemes, byte-identical records per seed, cascade
//    equivalence m <= 6, mu_r symmetry and endpoints
Check criterion7() {
    Check c;
    RngStream rng(77);

    // unitarity across random trains, delays, and internal phases
    for (int rep = 0; rep < 300; ++rep) {
        const int n = 1 + static_cast<int>(rng.uniform_int(32));
        PhasePattern p;
        p.quarter_turns.resize(static_cast<std::size_t>(n));
        for (auto& q : p.quarter_turns) q = static_cast<std::uint8_t>(rng.uniform_int(4));
        const DelaySpec d{1 + static_cast<int>(rng.uniform_int(4)),
                          static_cast<int>(rng.uniform_int(4))};
        const double total = interferometer_distribution(build_train(n, p), d).total();
        c.expect(std::abs(total - 1.0) <= 1e-12, fmt("unitarity off by %.2e", total - 1.0));
    }

    // zero-noise key agreement, exact, every scheme
    for (const Scheme scheme : {Scheme::Bb84, Scheme::Iwy, Scheme::Blt, Scheme::BltPlus}) {
        const auto rec = run_session(SchemeConfig::make(scheme, 2), 10000, ChannelModel{},
                                     std::nullopt, 808, workers());
        c.expect(rec.alice_key.bits == rec.bob_key.bits,
                 fmt("%s keys disagree without noise", scheme_name(scheme)));
        c.expect(rec.alice_key.size() > 0, fmt("%s produced no key", scheme_name(scheme)));
    }

    // seed determinism, including across worker counts
    const auto config = SchemeConfig::make(Scheme::BltPlus, 2);
    const ChannelModel channel{0.01, 0.3};
    const AttackStrategy strategy{AttackKind::SwitchPair};
    const auto r1 = run_session(config, 20000, channel, strategy, 424242, 1);
    const auto r2 = run_session(config, 20000, channel, strategy, 424242, 1);
    const auto r4 = run_session(config, 20000, channel, strategy, 424242, 4);
    c.expect(serialize(r1) == serialize(r2), "records differ across identical runs");
    c.expect(serialize(r1) == serialize(r4), "records differ across worker counts");

    // cascade equivalence for m <= 6
    for (int m = 1; m <= 6; ++m) {
        for (int rep = 0; rep < 5; ++rep) {
            PhasePattern p;
            p.quarter_turns.resize(std::size_t{1} << m);
            for (auto& q : p.quarter_turns) q = static_cast<std::uint8_t>(2 * rng.coin());
            const auto cascade = serial_transmitter_train(m, p);
            const auto direct = build_train(1 << m, p);
            for (std::size_t j = 0; j < cascade.length(); ++j)
                c.expect(std::abs(cascade.amplitudes[j] - direct.amplitudes[j]) <= 1e-12,
                         fmt("cascade m=%d bin %zu deviates", m, j));
        }
    }

    // mu_r endpoints and symmetry
    c.expect(mu_r(0.0) == 1.0, "mu_r(0) != 1");
    c.expect(mu_r(0.5) == 0.0, "mu_r(1/2) != 0");
    for (int rep = 0; rep < 100; ++rep) {
        const double p = rng.uniform();
        c.expect(std::abs(mu_r(p) - mu_r(1.0 - p)) <= 1e-12, fmt("mu_r asymmetric at %.6f", p));
    }
    return c;
}

// 8. multiphoton leakage: n/4 (bb84, iwy) and n/6 (blt) exactly
Check criterion8() {
    Check c;
    for (const double n_bar : {0.05, 0.1, 0.2}) {
        c.expect(multiphoton_leakage(Scheme::Bb84, n_bar).fraction == n_bar / 4.0,
                 fmt("bb84 leakage(%.2f) != n/4", n_bar));
        c.expect(multiphoton_leakage(Scheme::Iwy, n_bar).fraction == n_bar / 4.0,
                 fmt("iwy leakage(%.2f) != n/4", n_bar));
        c.expect(multiphoton_leakage(Scheme::Blt, n_bar).fraction == n_bar / 6.0,
                 fmt("blt leakage(%.2f) != n/6", n_bar));
    }
    return c;
}

}  // namespace

int main() {
    const struct {
        const char* name;
        std::function<Check()> run;
    } criteria[] = {
        {"protocol efficiency eta_p (Monte Carlo, 1e5 trains, +-0.01)", criterion1},
        {"attack parameters (eta_e, p_d) and bb84 Breidbart (+-0.01)", criterion2},
        {"eve_fraction/p_o equals eta_e/p_d at f in {0.2,0.5,1.0} (+-0.05)", criterion3},
        {"eta_p scaling law for m = 1..6 (4 sigma)", criterion4},
        {"sweep: exact intercepts, dominance windows, blt/blt_plus root 0.128+-0.003", criterion5},
        {"iwy/blt_plus crossover root 0.032+-0.005", criterion6},
        {"properties: unitarity, key agreement, determinism, cascade, mu_r", criterion7},
        {"multiphoton leakage n/4 and n/6, exact", criterion8},
    };

    int failures = 0;
    int index = 0;
    for (const auto& criterion : criteria) {
        ++index;
        Check result;
        try {
            result = criterion.run();
        } catch (const std::exception& e) {
            result.ok = false;
            result.detail = std::string("exception: ") + e.what();
        }
        if (result.ok) {
            std::printf("[PASS] criterion %d: %s\n", index, criterion.name);
        } else {
            ++failures;
            std::printf("[FAIL] criterion %d: %s -- %s\n", index, criterion.name,
                        result.detail.c_str());
        }
    }
    if (failures == 0)
        std::printf("all %d acceptance criteria passed\n", index);
    else
        std::printf("%d of %d acceptance criteria failed\n", failures, index);
    return failures == 0 ? 0 : 1;
}

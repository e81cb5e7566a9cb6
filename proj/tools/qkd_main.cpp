// Command-line front end: Monte Carlo simulation, attack estimation,
// key-fraction sweeps and crossover roots, CSV and SVG emission.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qkd/adversary.hpp"
#include "qkd/analysis.hpp"
#include "qkd/protocol.hpp"
#include "qkd/report.hpp"

namespace {

constexpr int kExitInvalidConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitIo = 4;

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + path);
}

// `key = value` files mirroring the long flag names, `#` comments. Values
// apply only where the same flag was not given on the command line.
class ConfigApplier {
public:
    static ConfigApplier load(const std::string& path) {
        ConfigApplier cfg;
        if (path.empty()) return cfg;
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("cannot read config file: " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": expected `key = value`");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    void apply(const std::string& key, bool flag_given, std::string& out) {
        const auto* v = take(key, flag_given);
        if (v) out = *v;
    }

    void apply(const std::string& key, bool flag_given, double& out) {
        const auto* v = take(key, flag_given);
        if (!v) return;
        char* end = nullptr;
        const double parsed = std::strtod(v->c_str(), &end);
        if (v->empty() || end != v->c_str() + v->size())
            throw std::invalid_argument("config key `" + key + "`: not a number: " + *v);
        out = parsed;
    }

    void apply(const std::string& key, bool flag_given, int& out) {
        std::int64_t wide = out;
        apply(key, flag_given, wide);
        out = static_cast<int>(wide);
    }

    void apply(const std::string& key, bool flag_given, std::int64_t& out) {
        const auto* v = take(key, flag_given);
        if (!v) return;
        char* end = nullptr;
        const long long parsed = std::strtoll(v->c_str(), &end, 10);
        if (v->empty() || end != v->c_str() + v->size())
            throw std::invalid_argument("config key `" + key + "`: not an integer: " + *v);
        out = parsed;
    }

    void apply(const std::string& key, bool flag_given, std::uint64_t& out) {
        const auto* v = take(key, flag_given);
        if (!v) return;
        char* end = nullptr;
        const unsigned long long parsed = std::strtoull(v->c_str(), &end, 10);
        if (v->empty() || end != v->c_str() + v->size())
            throw std::invalid_argument("config key `" + key + "`: not an integer: " + *v);
        out = parsed;
    }

    void finish(const std::string& subcommand) const {
        for (const auto& [key, value] : values_)
            if (used_.count(key) == 0)
                throw std::invalid_argument("config key `" + key + "` is not a `" + subcommand +
                                            "` option");
    }

private:
    const std::string* take(const std::string& key, bool flag_given) {
        const auto it = values_.find(key);
        if (it == values_.end()) return nullptr;
        used_.insert(key);  // a flag-overridden key is still a valid key
        return flag_given ? nullptr : &it->second;
    }

    static std::string trim(const std::string& s) {
        const auto begin = s.find_first_not_of(" \t\r");
        if (begin == std::string::npos) return "";
        const auto end = s.find_last_not_of(" \t\r");
        return s.substr(begin, end - begin + 1);
    }

    std::map<std::string, std::string> values_;
    std::set<std::string> used_;
};

void require_seed(const CLI::App* sub, const ConfigApplier& cfg) {
    if (sub->count("--seed") == 0 && !cfg.has("seed"))
        throw std::invalid_argument(
            std::string(sub->get_name()) +
            ": --seed is required; a wall-clock default would break reproducibility");
}

std::vector<qkd::Scheme> selected_schemes(const std::string& token) {
    if (token == "all")
        return {qkd::Scheme::Bb84, qkd::Scheme::Iwy, qkd::Scheme::Blt, qkd::Scheme::BltPlus};
    const auto scheme = qkd::parse_scheme(token);
    if (!scheme) throw std::invalid_argument("unknown scheme: " + token);
    return {*scheme};
}

qkd::Scheme single_scheme(const std::string& token) {
    const auto scheme = qkd::parse_scheme(token);
    if (!scheme) throw std::invalid_argument("unknown scheme: " + token);
    return *scheme;
}

void validate_positive(const char* what, std::int64_t value) {
    if (value < 1) throw std::invalid_argument(std::string(what) + " must be >= 1");
}

double binomial_sigma(double target, std::int64_t n) {
    if (n <= 0) return 0.0;
    return std::sqrt(std::max(target * (1.0 - target), 1e-12) / static_cast<double>(n));
}

struct SimulateOpts {
    std::string scheme = "all";
    int m = 2;
    std::int64_t trains = 100000;
    std::uint64_t seed = 0;
    double flip = 0.0;
    double attack_fraction = 0.0;
    int workers = 1;
    std::string out;
    std::string config;
};

int run_simulate(const SimulateOpts& o) {
    validate_positive("--trains", o.trains);
    validate_positive("--workers", o.workers);
    std::string csv = "scheme,m,n_trains,seed,eta_p_hat,p_o_hat,eve_fraction_hat,sifted_bits\n";
    for (const qkd::Scheme scheme : selected_schemes(o.scheme)) {
        const auto config = qkd::SchemeConfig::make(scheme, o.m);
        const qkd::ChannelModel channel{o.flip, o.attack_fraction};
        qkd::validate(channel);
        std::optional<qkd::AttackStrategy> adversary;
        if (o.attack_fraction > 0.0)
            adversary = qkd::AttackStrategy{scheme == qkd::Scheme::Bb84 ? qkd::AttackKind::Breidbart
                                                                        : qkd::AttackKind::SwitchPair};
        const auto record = qkd::run_session(config, o.trains, channel, adversary, o.seed, o.workers);
        const auto hat = qkd::empirical_metrics(record);
        const auto analytic = qkd::scheme_metrics(config);

        // Expected share of sifted bits coming from intercepted trains. Odd
        // train lengths lose the pass-through fraction 1/N to suppression.
        const int n = config.superposition_count();
        const double pass = (scheme != qkd::Scheme::Bb84 && n % 2 == 1) ? 1.0 / n : 0.0;
        const double f = o.attack_fraction;
        const double share = f * (1.0 - pass) / (f * (1.0 - pass) + (1.0 - f));
        const double attack_error = share * analytic.p_d;
        const double expected_p_o = o.flip + attack_error - 2.0 * o.flip * attack_error;
        std::printf("simulate scheme=%s m=%d trains=%lld seed=%llu flip=%g attack_fraction=%g\n",
                    qkd::scheme_name(scheme), config.m, static_cast<long long>(o.trains),
                    static_cast<unsigned long long>(o.seed), o.flip, o.attack_fraction);
        std::printf("  sifted_bits=%zu suppressed_trains=%lld\n", record.alice_key.size(),
                    static_cast<long long>(record.suppressed_trains));
        std::printf("  eta_p_hat=%.6g          analytic eta_p=%.6g\n", hat.eta_p_hat, analytic.eta_p);
        std::printf("  p_o_hat=%.6g            expected about %.6g\n", hat.p_o_hat, expected_p_o);
        std::printf("  eve_fraction_hat=%.6g   expected about %.6g\n", hat.eve_fraction_hat,
                    scheme == qkd::Scheme::Bb84 ? 0.0 : share * analytic.eta_e);

        csv += qkd::scheme_name(scheme);
        csv += ',' + std::to_string(config.m) + ',' + std::to_string(o.trains) + ',' +
               std::to_string(o.seed) + ',' + qkd::format_sig9(hat.eta_p_hat) + ',' +
               qkd::format_sig9(hat.p_o_hat) + ',' + qkd::format_sig9(hat.eve_fraction_hat) + ',' +
               std::to_string(record.alice_key.size()) + '\n';
    }
    if (!o.out.empty()) write_file(o.out, csv);
    return 0;
}

struct AttackOpts {
    std::string scheme = "all";
    int m = 2;
    std::int64_t trains = 100000;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out;
    std::string config;
};

int run_attack(const AttackOpts& o) {
    validate_positive("--workers", o.workers);
    std::string csv =
        "scheme,m,n_trains,seed,sifted_bits,eta_e_hat,eta_e_target,eta_e_sigma_dev,"
        "p_d_hat,p_d_target,p_d_sigma_dev,guess_success_hat\n";
    for (const qkd::Scheme scheme : selected_schemes(o.scheme)) {
        const auto config = qkd::SchemeConfig::make(scheme, o.m);
        const auto est = qkd::estimate_attack_params(config, o.trains, o.seed, o.workers);
        const auto analytic = qkd::scheme_metrics(config);
        const bool bb84 = scheme == qkd::Scheme::Bb84;

        const double p_d_dev =
            (est.p_d_hat - analytic.p_d) / binomial_sigma(analytic.p_d, est.sifted_bits);
        std::printf("attack scheme=%s m=%d trains=%lld seed=%llu\n", qkd::scheme_name(scheme),
                    config.m, static_cast<long long>(o.trains),
                    static_cast<unsigned long long>(o.seed));
        std::printf("  sifted_bits=%lld\n", static_cast<long long>(est.sifted_bits));

        double eta_dev = std::nan("");
        if (bb84) {
            static const double kGuessTarget = (2.0 + std::sqrt(2.0)) / 4.0;  // cos^2(pi/8)
            const double guess_dev =
                (est.guess_success_hat - kGuessTarget) / binomial_sigma(kGuessTarget, est.sifted_bits);
            std::printf("  p_d_hat=%.6g            target=%.6g  deviation=%+.2f sigma\n", est.p_d_hat,
                        analytic.p_d, p_d_dev);
            std::printf("  guess_success_hat=%.6g  target=%.6g  deviation=%+.2f sigma\n",
                        est.guess_success_hat, kGuessTarget, guess_dev);
            std::printf("  eta_e=%.6g is the Breidbart information bound used by the key-fraction analysis\n",
                        analytic.eta_e);
        } else {
            eta_dev = (est.eta_e_hat - analytic.eta_e) / binomial_sigma(analytic.eta_e, est.sifted_bits);
            std::printf("  eta_e_hat=%.6g          target=%.6g  deviation=%+.2f sigma\n", est.eta_e_hat,
                        analytic.eta_e, eta_dev);
            std::printf("  p_d_hat=%.6g            target=%.6g  deviation=%+.2f sigma\n", est.p_d_hat,
                        analytic.p_d, p_d_dev);
            if (analytic.extrapolated)
                std::printf("  note: targets extrapolated as eta_e=1/(N-1), p_d=(N-2)/(2(N-1))\n");
        }

        csv += qkd::scheme_name(scheme);
        csv += ',' + std::to_string(config.m) + ',' + std::to_string(o.trains) + ',' +
               std::to_string(o.seed) + ',' + std::to_string(est.sifted_bits) + ',' +
               qkd::format_sig9(bb84 ? std::nan("") : est.eta_e_hat) + ',' +
               qkd::format_sig9(bb84 ? std::nan("") : analytic.eta_e) + ',' +
               qkd::format_sig9(eta_dev) + ',' + qkd::format_sig9(est.p_d_hat) + ',' +
               qkd::format_sig9(analytic.p_d) + ',' + qkd::format_sig9(p_d_dev) + ',' +
               qkd::format_sig9(est.guess_success_hat) + '\n';
    }
    if (!o.out.empty()) write_file(o.out, csv);
    return 0;
}

struct SweepOpts {
    double po_min = 0.0;
    double po_max = 0.25;
    double po_step = 0.005;
    std::string out;
    std::string svg;
    std::string config;
};

int run_sweep(const SweepOpts& o) {
    const auto rows = qkd::sweep(qkd::linear_grid(o.po_min, o.po_max, o.po_step));
    const std::string csv = qkd::sweep_csv(rows);
    if (o.out.empty()) {
        std::fwrite(csv.data(), 1, csv.size(), stdout);
    } else {
        write_file(o.out, csv);
        std::printf("wrote %zu rows to %s\n", rows.size(), o.out.c_str());
    }
    if (!o.svg.empty()) {
        write_file(o.svg, qkd::sweep_svg(rows));
        std::printf("wrote chart to %s\n", o.svg.c_str());
    }
    return 0;
}

struct CrossoverOpts {
    std::string scheme_a;
    std::string scheme_b;
    int m = 2;
    double po_min = 0.0;
    double po_max = 0.5;
    std::string config;
};

int run_crossover(const CrossoverOpts& o) {
    const auto a = qkd::scheme_metrics(qkd::SchemeConfig::make(single_scheme(o.scheme_a), o.m));
    const auto b = qkd::scheme_metrics(qkd::SchemeConfig::make(single_scheme(o.scheme_b), o.m));
    double root = 0.0;
    try {
        root = qkd::crossover(a, b, o.po_min, o.po_max);
    } catch (const qkd::BracketError&) {
        std::printf("no crossover in (%g, %g)\n", o.po_min, o.po_max);
        return kExitRuntime;
    }
    const double probe = std::max(o.po_min, root - 1e-4);
    const bool a_leads_below = qkd::key_fraction(a, probe) > qkd::key_fraction(b, probe);
    std::printf("crossover(%s, %s) p_o = %.6f\n", o.scheme_a.c_str(), o.scheme_b.c_str(), root);
    std::printf("  %s retains more key below the root, %s above it\n",
                a_leads_below ? o.scheme_a.c_str() : o.scheme_b.c_str(),
                a_leads_below ? o.scheme_b.c_str() : o.scheme_a.c_str());
    return 0;
}

struct MetricsOpts {
    std::string scheme = "all";
    int m = 2;
    double nbar = 0.0;
    std::string out;
    std::string config;
};

int run_metrics(const MetricsOpts& o) {
    std::string csv = "scheme,m,n,eta_p,eta_e,p_d,ratio,extrapolated,multiphoton_leakage\n";
    std::printf("%-10s %3s %5s %-12s %-12s %-12s %-10s\n", "scheme", "m", "N", "eta_p", "eta_e",
                "p_d", "eta_e/p_d");
    for (const qkd::Scheme scheme : selected_schemes(o.scheme)) {
        const auto config = qkd::SchemeConfig::make(scheme, o.m);
        const auto mx = qkd::scheme_metrics(config);
        std::printf("%-10s %3d %5d %-12.6g %-12.6g %-12.6g %-10.6g", qkd::scheme_name(scheme),
                    config.m, mx.n, mx.eta_p, mx.eta_e, mx.p_d, mx.ratio());
        if (mx.extrapolated) std::printf("  (eta_e, p_d extrapolated)");
        if (scheme == qkd::Scheme::Bb84) std::printf("  (eta_e is an information bound)");

        double leak = std::nan("");
        if (o.nbar > 0.0) {
            const auto ml = qkd::multiphoton_leakage(scheme, o.nbar);
            if (ml.fraction) {
                leak = *ml.fraction;
                std::printf("  multiphoton_leakage=%.6g", leak);
            } else {
                std::printf("  multiphoton_leakage=n/a");
            }
            if (ml.outside_weak_regime)
                std::printf("  [warning: n_bar=%g is outside the weak-pulse regime]", o.nbar);
        }
        std::printf("\n");

        csv += qkd::scheme_name(scheme);
        csv += ',' + std::to_string(config.m) + ',' + std::to_string(mx.n) + ',' +
               qkd::format_sig9(mx.eta_p) + ',' + qkd::format_sig9(mx.eta_e) + ',' +
               qkd::format_sig9(mx.p_d) + ',' + qkd::format_sig9(mx.ratio()) + ',' +
               (mx.extrapolated ? "1" : "0") + ',' + qkd::format_sig9(leak) + '\n';
    }
    if (!o.out.empty()) write_file(o.out, csv);
    return 0;
}

const std::vector<std::string> kSchemeTokens = {"bb84", "iwy", "blt", "blt_plus"};
const std::vector<std::string> kSchemeTokensAll = {"bb84", "iwy", "blt", "blt_plus", "all"};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-coded fiber QKD simulator and key-fraction analyzer"};
    app.require_subcommand(1);

    int rc = 0;

    SimulateOpts sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo key-exchange sessions");
    simulate->add_option("--scheme", sim.scheme, "Scheme or 'all'")
        ->check(CLI::IsMember(kSchemeTokensAll))
        ->capture_default_str();
    simulate->add_option("--m", sim.m, "Transmitter delay elements")->check(CLI::Range(1, 20))->capture_default_str();
    simulate->add_option("--trains", sim.trains, "Trains to send")->check(CLI::PositiveNumber)->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Random seed (required; may come from --config)");
    simulate->add_option("--flip", sim.flip, "Intrinsic detector-flip probability")->check(CLI::Range(0.0, 0.5))->capture_default_str();
    simulate->add_option("--attack-fraction", sim.attack_fraction, "Fraction of trains Eve intercepts")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    simulate->add_option("--workers", sim.workers, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    simulate->add_option("--out", sim.out, "Write a CSV summary here");
    simulate->add_option("--config", sim.config, "key = value file mirroring the flag names; flags override");
    simulate->callback([&] {
        ConfigApplier cfg = ConfigApplier::load(sim.config);
        cfg.apply("scheme", simulate->count("--scheme") > 0, sim.scheme);
        cfg.apply("m", simulate->count("--m") > 0, sim.m);
        cfg.apply("trains", simulate->count("--trains") > 0, sim.trains);
        cfg.apply("flip", simulate->count("--flip") > 0, sim.flip);
        cfg.apply("attack-fraction", simulate->count("--attack-fraction") > 0, sim.attack_fraction);
        cfg.apply("workers", simulate->count("--workers") > 0, sim.workers);
        cfg.apply("out", simulate->count("--out") > 0, sim.out);
        require_seed(simulate, cfg);
        cfg.apply("seed", simulate->count("--seed") > 0, sim.seed);
        cfg.finish("simulate");
        rc = run_simulate(sim);
    });

    AttackOpts atk;
    auto* attack = app.add_subcommand("attack", "Full-interception attack-parameter estimation");
    attack->add_option("--scheme", atk.scheme, "Scheme or 'all'")
        ->check(CLI::IsMember(kSchemeTokensAll))
        ->capture_default_str();
    attack->add_option("--m", atk.m, "Transmitter delay elements")->check(CLI::Range(1, 20))->capture_default_str();
    attack->add_option("--trains", atk.trains, "Trains to send (>= 1e4)")->check(CLI::PositiveNumber)->capture_default_str();
    attack->add_option("--seed", atk.seed, "Random seed (required; may come from --config)");
    attack->add_option("--workers", atk.workers, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    attack->add_option("--out", atk.out, "Write a CSV summary here");
    attack->add_option("--config", atk.config, "key = value file mirroring the flag names; flags override");
    attack->callback([&] {
        ConfigApplier cfg = ConfigApplier::load(atk.config);
        cfg.apply("scheme", attack->count("--scheme") > 0, atk.scheme);
        cfg.apply("m", attack->count("--m") > 0, atk.m);
        cfg.apply("trains", attack->count("--trains") > 0, atk.trains);
        cfg.apply("workers", attack->count("--workers") > 0, atk.workers);
        cfg.apply("out", attack->count("--out") > 0, atk.out);
        require_seed(attack, cfg);
        cfg.apply("seed", attack->count("--seed") > 0, atk.seed);
        cfg.finish("attack");
        rc = run_attack(atk);
    });

    SweepOpts swp;
    auto* sweep_cmd = app.add_subcommand("sweep", "Key-fraction curves over an error-rate grid");
    sweep_cmd->add_option("--po-min", swp.po_min, "Grid start")->check(CLI::Range(0.0, 0.5))->capture_default_str();
    sweep_cmd->add_option("--po-max", swp.po_max, "Grid end")->check(CLI::Range(0.0, 0.5))->capture_default_str();
    sweep_cmd->add_option("--po-step", swp.po_step, "Grid step")->check(CLI::Range(1e-6, 0.5))->capture_default_str();
    sweep_cmd->add_option("--out", swp.out, "CSV path (stdout when omitted)");
    sweep_cmd->add_option("--svg", swp.svg, "Also render an SVG chart here");
    sweep_cmd->add_option("--config", swp.config, "key = value file mirroring the flag names; flags override");
    sweep_cmd->callback([&] {
        ConfigApplier cfg = ConfigApplier::load(swp.config);
        cfg.apply("po-min", sweep_cmd->count("--po-min") > 0, swp.po_min);
        cfg.apply("po-max", sweep_cmd->count("--po-max") > 0, swp.po_max);
        cfg.apply("po-step", sweep_cmd->count("--po-step") > 0, swp.po_step);
        cfg.apply("out", sweep_cmd->count("--out") > 0, swp.out);
        cfg.apply("svg", sweep_cmd->count("--svg") > 0, swp.svg);
        cfg.finish("sweep");
        rc = run_sweep(swp);
    });

    CrossoverOpts xo;
    auto* crossover_cmd = app.add_subcommand("crossover", "Error rate where two key-fraction curves cross");
    crossover_cmd->add_option("scheme_a", xo.scheme_a, "First scheme")->required()->check(CLI::IsMember(kSchemeTokens));
    crossover_cmd->add_option("scheme_b", xo.scheme_b, "Second scheme")->required()->check(CLI::IsMember(kSchemeTokens));
    crossover_cmd->add_option("--m", xo.m, "Transmitter delay elements")->check(CLI::Range(1, 20))->capture_default_str();
    crossover_cmd->add_option("--po-min", xo.po_min, "Bracket start")->check(CLI::Range(0.0, 0.5))->capture_default_str();
    crossover_cmd->add_option("--po-max", xo.po_max, "Bracket end")->check(CLI::Range(0.0, 0.5))->capture_default_str();
    crossover_cmd->add_option("--config", xo.config, "key = value file mirroring the flag names; flags override");
    crossover_cmd->callback([&] {
        ConfigApplier cfg = ConfigApplier::load(xo.config);
        cfg.apply("m", crossover_cmd->count("--m") > 0, xo.m);
        cfg.apply("po-min", crossover_cmd->count("--po-min") > 0, xo.po_min);
        cfg.apply("po-max", crossover_cmd->count("--po-max") > 0, xo.po_max);
        cfg.finish("crossover");
        rc = run_crossover(xo);
    });

    MetricsOpts met;
    auto* metrics_cmd = app.add_subcommand("metrics", "Closed-form scheme constants");
    metrics_cmd->add_option("--scheme", met.scheme, "Scheme or 'all'")
        ->check(CLI::IsMember(kSchemeTokensAll))
        ->capture_default_str();
    metrics_cmd->add_option("--m", met.m, "Transmitter delay elements")->check(CLI::Range(1, 20))->capture_default_str();
    metrics_cmd->add_option("--nbar", met.nbar, "Mean photon number for leakage")->check(CLI::Range(0.0, 100.0))->capture_default_str();
    metrics_cmd->add_option("--out", met.out, "Write a CSV summary here");
    metrics_cmd->add_option("--config", met.config, "key = value file mirroring the flag names; flags override");
    metrics_cmd->callback([&] {
        ConfigApplier cfg = ConfigApplier::load(met.config);
        cfg.apply("scheme", metrics_cmd->count("--scheme") > 0, met.scheme);
        cfg.apply("m", metrics_cmd->count("--m") > 0, met.m);
        cfg.apply("nbar", metrics_cmd->count("--nbar") > 0, met.nbar);
        cfg.apply("out", metrics_cmd->count("--out") > 0, met.out);
        cfg.finish("metrics");
        rc = run_metrics(met);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalidConfig;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalidConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return rc;
}

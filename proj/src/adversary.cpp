#include "qkd/adversary.hpp"

#include <cmath>

namespace qkd {

SwitchInterceptResult switch_intercept_resend(const SchemeConfig& config, const PulseTrain& train,
                                              RngStream& rng) {
    if (config.scheme == Scheme::Bb84)
        throw std::invalid_argument(
            "switch_intercept_resend: the fast-switch attack applies to pulse-train schemes only");
    const int n = config.superposition_count();
    if (static_cast<int>(train.length()) != n)
        throw std::invalid_argument("switch_intercept_resend: train length mismatch");

    const SwitchSchedule schedule = SwitchSchedule::random_adjacent(n, rng);
    const DetectionEvent outcome = sample_detection(switch_overlap_distribution(train, schedule), rng);

    SwitchInterceptResult result;
    if (outcome.slot >= static_cast<int>(schedule.pairs.size()))
        return result;  // pass-through: nothing learned, train suppressed

    const auto [left, right] = schedule.pairs[static_cast<std::size_t>(outcome.slot)];
    (void)right;  // pairs are adjacent, so `left` names the boundary
    result.record.measured_boundary = left;
    result.record.known_difference = static_cast<std::uint8_t>(outcome.detector == Detector::D1);

    PhasePattern pattern;
    pattern.quarter_turns.assign(static_cast<std::size_t>(n), 0);
    for (int j = 1; j < n; ++j) {
        const int diff = (j - 1 == left) ? result.record.known_difference : rng.coin();
        pattern.quarter_turns[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
            (pattern.quarter_turns[static_cast<std::size_t>(j) - 1] + 2 * diff) % 4);
    }
    result.resent = build_train(n, pattern);
    result.record.resent_pattern = std::move(pattern);
    return result;
}

BreidbartResult breidbart_intercept(int alice_quarter_turns, RngStream& rng) {
    if (alice_quarter_turns < 0 || alice_quarter_turns > 3)
        throw std::invalid_argument(
            "breidbart_intercept: the phase must be one of the four protocol states");
    static const double kCos2Pi8 = (2.0 + std::sqrt(2.0)) / 4.0;
    // States 0 and pi/2 sit pi/4 away from the Breidbart state at pi/4; the
    // bit-1 states sit pi/4 away from the one at 5 pi/4.
    const bool near_plus = alice_quarter_turns <= 1;
    const double p_plus = near_plus ? kCos2Pi8 : 1.0 - kCos2Pi8;
    const bool plus = rng.bernoulli(p_plus);
    BreidbartResult r;
    r.guess_bit = plus ? 0 : 1;
    r.resent_eighth_turns = plus ? 1 : 5;
    return r;
}

AttackEstimate estimate_attack_params(const SchemeConfig& config, std::int64_t n_trains,
                                      std::uint64_t seed, int workers) {
    if (n_trains < 10000)
        throw std::invalid_argument("estimate_attack_params: need at least 1e4 trains");
    const AttackStrategy strategy{config.scheme == Scheme::Bb84 ? AttackKind::Breidbart
                                                                : AttackKind::SwitchPair};
    const SessionRecord record =
        run_session(config, n_trains, ChannelModel{0.0, 1.0}, strategy, seed, workers);
    const EmpiricalMetrics metrics = empirical_metrics(record);

    AttackEstimate est;
    est.eta_e_hat = metrics.eve_fraction_hat;
    est.p_d_hat = metrics.p_o_hat;
    est.sifted_bits = static_cast<std::int64_t>(record.alice_key.size());
    est.guess_success_hat =
        record.eve_guess_total > 0
            ? static_cast<double>(record.eve_guess_correct) / static_cast<double>(record.eve_guess_total)
            : std::nan("");
    return est;
}

}  // namespace qkd

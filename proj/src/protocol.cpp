#include "qkd/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>

#include "qkd/adversary.hpp"

namespace qkd {

const char* scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::Bb84: return "bb84";
        case Scheme::Iwy: return "iwy";
        case Scheme::Blt: return "blt";
        case Scheme::BltPlus: return "blt_plus";
    }
    return "?";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    if (name == "bb84") return Scheme::Bb84;
    if (name == "iwy") return Scheme::Iwy;
    if (name == "blt") return Scheme::Blt;
    if (name == "blt_plus") return Scheme::BltPlus;
    return std::nullopt;
}

int SchemeConfig::superposition_count() const {
    switch (scheme) {
        case Scheme::Bb84: return 2;
        case Scheme::Iwy: return m + 1;
        case Scheme::Blt: return 1 << m;
        case Scheme::BltPlus: return 4;
    }
    return 0;
}

SchemeConfig SchemeConfig::make(Scheme scheme, int m) {
    if (scheme == Scheme::Bb84) return SchemeConfig{scheme, 1};
    if (m < 1) throw std::invalid_argument("SchemeConfig: delay-element count m must be >= 1");
    if (m > 20) throw std::invalid_argument("SchemeConfig: m > 20 is not supported");
    if (scheme == Scheme::BltPlus && m != 2)
        throw UnsupportedConfigError("SchemeConfig: blt_plus is defined for m = 2 only");
    return SchemeConfig{scheme, m};
}

void validate(const ChannelModel& channel) {
    if (!(channel.flip_probability >= 0.0 && channel.flip_probability <= 0.5))
        throw std::invalid_argument("ChannelModel: flip_probability must lie in [0, 1/2]");
    if (!(channel.attack_fraction >= 0.0 && channel.attack_fraction <= 1.0))
        throw std::invalid_argument("ChannelModel: attack_fraction must lie in [0, 1]");
}

std::vector<std::uint8_t> boundary_bits(const PhasePattern& pattern) {
    if (pattern.size() < 2) return {};
    std::vector<std::uint8_t> bits(pattern.size() - 1);
    for (std::size_t j = 0; j + 1 < pattern.size(); ++j) {
        const int diff = (pattern.quarter_turns[j + 1] - pattern.quarter_turns[j] + 8) % 4;
        if (diff % 2 != 0) throw std::invalid_argument("boundary_bits: adjacent phases must differ by 0 or pi");
        bits[j] = static_cast<std::uint8_t>(diff / 2);
    }
    return bits;
}

Encoding encode_train(const SchemeConfig& config, RngStream& rng) {
    Encoding enc;
    if (config.scheme == Scheme::Bb84) {
        const int q = static_cast<int>(rng.uniform_int(4));
        enc.pattern.quarter_turns = {static_cast<std::uint8_t>(q)};
        enc.intended_bits = {static_cast<std::uint8_t>(bb84_bit(q))};
        return enc;
    }
    const int n = config.superposition_count();
    enc.pattern.quarter_turns.assign(static_cast<std::size_t>(n), 0);
    enc.intended_bits.resize(static_cast<std::size_t>(n) - 1);
    for (int j = 1; j < n; ++j) {
        const int bit = rng.coin();
        enc.intended_bits[static_cast<std::size_t>(j) - 1] = static_cast<std::uint8_t>(bit);
        enc.pattern.quarter_turns[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(
            (enc.pattern.quarter_turns[static_cast<std::size_t>(j) - 1] + 2 * bit) % 4);
    }
    return enc;
}

namespace {

Detector flip(Detector det) { return det == Detector::D0 ? Detector::D1 : Detector::D0; }

// cos^2(k * pi/8) for k = 0..7.
const double* cos2_eighths() {
    static const double sqrt2 = std::sqrt(2.0);
    static const double c = (2.0 + sqrt2) / 4.0;  // cos^2(pi/8)
    static const double s = (2.0 - sqrt2) / 4.0;  // sin^2(pi/8)
    static const double table[8] = {1.0, c, 0.5, s, 0.0, s, 0.5, c};
    return table;
}

}  // namespace

DetectionEvent bob_measure(const SchemeConfig& config, const PulseTrain& train,
                           const ChannelModel& channel, RngStream& rng) {
    if (config.scheme == Scheme::Bb84)
        throw std::invalid_argument("bob_measure: BB84 measures phase states, not pulse trains");
    if (static_cast<int>(train.length()) != config.superposition_count())
        throw std::invalid_argument("bob_measure: train length must equal the superposition count");

    std::optional<Branch> branch;
    int delay = 1;
    if (config.scheme == Scheme::BltPlus) {
        branch = rng.coin() ? Branch::Delay2 : Branch::Delay1;  // 50/50 input coupler
        delay = (*branch == Branch::Delay2) ? 2 : 1;
    }
    DetectionEvent event = sample_detection(
        interferometer_distribution(train, DelaySpec{delay, 0}), rng);
    event.branch = branch;
    if (channel.flip_probability > 0.0 && rng.bernoulli(channel.flip_probability))
        event.detector = flip(event.detector);
    return event;
}

Bb84Outcome bob_measure_bb84(int state_eighth_turns, const ChannelModel& channel, RngStream& rng) {
    Bb84Outcome out;
    out.bob_basis = rng.coin();
    out.central = rng.coin() == 1;  // interfering slot with probability 1/2
    if (!out.central) return out;
    const int delta = ((state_eighth_turns - 2 * out.bob_basis) % 8 + 8) % 8;
    const double p_d0 = cos2_eighths()[delta];
    out.detector = rng.uniform() < p_d0 ? Detector::D0 : Detector::D1;
    if (channel.flip_probability > 0.0 && rng.bernoulli(channel.flip_probability))
        out.detector = flip(out.detector);
    return out;
}

std::optional<SiftResult> sift_event(const SchemeConfig& config, const DetectionEvent& event,
                                     const Encoding& encoding) {
    if (config.scheme == Scheme::Bb84)
        throw std::invalid_argument("sift_event: use sift_bb84_outcome for BB84");
    const int n = config.superposition_count();
    const int delay = (event.branch && *event.branch == Branch::Delay2) ? 2 : 1;
    if (event.slot < 0 || event.slot >= n + delay)
        throw std::invalid_argument("sift_event: slot outside the distribution range");
    if (event.slot < delay || event.slot > n - 1) return std::nullopt;  // edge slot

    const auto& bits = encoding.intended_bits;
    SiftResult r;
    r.bob_bit = static_cast<std::uint8_t>(event.detector == Detector::D1);
    r.alice_bit = delay == 1
                      ? bits[static_cast<std::size_t>(event.slot) - 1]
                      : static_cast<std::uint8_t>(bits[static_cast<std::size_t>(event.slot) - 2] ^
                                                  bits[static_cast<std::size_t>(event.slot) - 1]);
    return r;
}

std::optional<SiftResult> sift_bb84_outcome(const Bb84Outcome& outcome, const Encoding& encoding) {
    if (!outcome.central) return std::nullopt;
    const int q = encoding.pattern.quarter_turns.at(0);
    if (bb84_basis(q) != outcome.bob_basis) return std::nullopt;
    SiftResult r;
    r.alice_bit = encoding.intended_bits.at(0);
    r.bob_bit = static_cast<std::uint8_t>(outcome.detector == Detector::D1);
    return r;
}

std::pair<SiftedKey, SiftedKey> sift(const SchemeConfig& config,
                                     std::span<const DetectionEvent> events,
                                     std::span<const Encoding> encodings) {
    if (events.size() != encodings.size())
        throw std::invalid_argument("sift: events and encodings must be aligned by train");
    SiftedKey alice, bob;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto r = sift_event(config, events[i], encodings[i]);
        if (!r) continue;
        const SiftedKey::Origin origin{static_cast<std::int64_t>(i), events[i].slot};
        alice.bits.push_back(r->alice_bit);
        alice.positions.push_back(origin);
        bob.bits.push_back(r->bob_bit);
        bob.positions.push_back(origin);
    }
    return {std::move(alice), std::move(bob)};
}

std::pair<SiftedKey, SiftedKey> sift_bb84(std::span<const Bb84Outcome> outcomes,
                                          std::span<const Encoding> encodings) {
    if (outcomes.size() != encodings.size())
        throw std::invalid_argument("sift_bb84: outcomes and encodings must be aligned by train");
    SiftedKey alice, bob;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto r = sift_bb84_outcome(outcomes[i], encodings[i]);
        if (!r) continue;
        const SiftedKey::Origin origin{static_cast<std::int64_t>(i), 1};
        alice.bits.push_back(r->alice_bit);
        alice.positions.push_back(origin);
        bob.bits.push_back(r->bob_bit);
        bob.positions.push_back(origin);
    }
    return {std::move(alice), std::move(bob)};
}

namespace {

struct ShardResult {
    std::vector<std::uint8_t> alice_bits;
    std::vector<std::uint8_t> bob_bits;
    std::vector<std::uint8_t> known;
    std::vector<SiftedKey::Origin> origins;
    std::int64_t edge = 0;
    std::int64_t mismatch = 0;
    std::int64_t suppressed = 0;
    std::int64_t guess_correct = 0;
    std::int64_t guess_total = 0;
};

constexpr std::int64_t kShardSize = 8192;  // fixed: worker count never shapes the transcript

ShardResult run_shard(const SchemeConfig& config, std::int64_t first_train, std::int64_t count,
                      const ChannelModel& channel, const std::optional<AttackStrategy>& adversary,
                      std::uint64_t seed, std::uint64_t shard_index) {
    RngStream rng = RngStream::for_shard(seed, shard_index);
    ShardResult res;
    const int n = config.superposition_count();

    for (std::int64_t t = 0; t < count; ++t) {
        const std::int64_t train_index = first_train + t;
        const Encoding enc = encode_train(config, rng);

        if (config.scheme == Scheme::Bb84) {
            int state = 2 * enc.pattern.quarter_turns[0];
            std::optional<BreidbartResult> eve;
            if (adversary && rng.bernoulli(channel.attack_fraction)) {
                eve = breidbart_intercept(enc.pattern.quarter_turns[0], rng);
                state = eve->resent_eighth_turns;
            }
            const Bb84Outcome outcome = bob_measure_bb84(state, channel, rng);
            if (!outcome.central) {
                ++res.edge;
                continue;
            }
            if (bb84_basis(enc.pattern.quarter_turns[0]) != outcome.bob_basis) {
                ++res.mismatch;
                continue;
            }
            res.alice_bits.push_back(enc.intended_bits[0]);
            res.bob_bits.push_back(static_cast<std::uint8_t>(outcome.detector == Detector::D1));
            res.known.push_back(0);  // Breidbart knowledge is probabilistic, never certain
            res.origins.push_back({train_index, 1});
            if (eve) {
                ++res.guess_total;
                res.guess_correct += eve->guess_bit == enc.intended_bits[0];
            }
            continue;
        }

        PulseTrain train = config.scheme == Scheme::Iwy
                               ? parallel_transmitter_train(config.m, enc.pattern)
                               : build_train(n, enc.pattern);

        std::optional<EveRecord> eve;
        if (adversary && rng.bernoulli(channel.attack_fraction)) {
            SwitchInterceptResult intercept = switch_intercept_resend(config, train, rng);
            eve = std::move(intercept.record);
            if (!intercept.resent) {
                ++res.suppressed;  // pass-through outcome: Eve swallowed the photon
                continue;
            }
            train = *std::move(intercept.resent);
        }

        const DetectionEvent event = bob_measure(config, train, channel, rng);
        const auto sifted = sift_event(config, event, enc);
        if (!sifted) {
            ++res.edge;
            continue;
        }
        bool known = false;
        if (eve && eve->measured_boundary) {
            const bool delay1 = !event.branch || *event.branch == Branch::Delay1;
            known = delay1 && *eve->measured_boundary == event.slot - 1;
        }
        res.alice_bits.push_back(sifted->alice_bit);
        res.bob_bits.push_back(sifted->bob_bit);
        res.known.push_back(known ? 1 : 0);
        res.origins.push_back({train_index, event.slot});
    }
    return res;
}

}  // namespace

SessionRecord run_session(const SchemeConfig& config, std::int64_t n_trains,
                          const ChannelModel& channel, std::optional<AttackStrategy> adversary,
                          std::uint64_t seed, int workers) {
    if (n_trains < 1) throw std::invalid_argument("run_session: n_trains must be >= 1");
    validate(channel);
    if (adversary) {
        const bool breidbart = adversary->kind == AttackKind::Breidbart;
        if (breidbart != (config.scheme == Scheme::Bb84))
            throw std::invalid_argument(
                "run_session: Breidbart applies to bb84 only, the switch attack to the train schemes only");
    }
    if (workers < 1) workers = 1;

    const std::int64_t n_shards = (n_trains + kShardSize - 1) / kShardSize;
    std::vector<ShardResult> parts(static_cast<std::size_t>(n_shards));
    auto process = [&](std::int64_t s) {
        const std::int64_t first = s * kShardSize;
        parts[static_cast<std::size_t>(s)] =
            run_shard(config, first, std::min(kShardSize, n_trains - first), channel, adversary,
                      seed, static_cast<std::uint64_t>(s));
    };

    if (workers == 1 || n_shards == 1) {
        for (std::int64_t s = 0; s < n_shards; ++s) process(s);
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::thread> pool;
        const int n_threads = static_cast<int>(std::min<std::int64_t>(workers, n_shards));
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&] {
                for (std::int64_t s; (s = next.fetch_add(1)) < n_shards;) process(s);
            });
        for (auto& th : pool) th.join();
    }

    SessionRecord rec;
    rec.config = config;
    rec.trains_sent = n_trains;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.alice_bits.size();
    rec.alice_key.bits.reserve(total);
    rec.alice_key.positions.reserve(total);
    rec.bob_key.bits.reserve(total);
    rec.bob_key.positions.reserve(total);
    rec.eve_known_mask.reserve(total);
    for (const auto& p : parts) {
        rec.alice_key.bits.insert(rec.alice_key.bits.end(), p.alice_bits.begin(), p.alice_bits.end());
        rec.bob_key.bits.insert(rec.bob_key.bits.end(), p.bob_bits.begin(), p.bob_bits.end());
        rec.alice_key.positions.insert(rec.alice_key.positions.end(), p.origins.begin(), p.origins.end());
        rec.bob_key.positions.insert(rec.bob_key.positions.end(), p.origins.begin(), p.origins.end());
        rec.eve_known_mask.insert(rec.eve_known_mask.end(), p.known.begin(), p.known.end());
        rec.discarded_edge_detections += p.edge;
        rec.discarded_basis_mismatch += p.mismatch;
        rec.suppressed_trains += p.suppressed;
        rec.eve_guess_correct += p.guess_correct;
        rec.eve_guess_total += p.guess_total;
    }
    return rec;
}

EmpiricalMetrics empirical_metrics(const SessionRecord& record) {
    const std::size_t sifted = record.alice_key.size();
    if (sifted == 0 || record.bob_key.size() != sifted || record.eve_known_mask.size() != sifted)
        throw EmptyKeyError("empirical_metrics: session produced no sifted key");
    std::int64_t errors = 0;
    std::int64_t known = 0;
    for (std::size_t i = 0; i < sifted; ++i) {
        errors += record.alice_key.bits[i] != record.bob_key.bits[i];
        known += record.eve_known_mask[i];
    }
    EmpiricalMetrics m;
    m.eta_p_hat = static_cast<double>(sifted) / static_cast<double>(record.trains_sent);
    m.p_o_hat = static_cast<double>(errors) / static_cast<double>(sifted);
    m.eve_fraction_hat = static_cast<double>(known) / static_cast<double>(sifted);
    return m;
}

std::string serialize(const SessionRecord& record) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "scheme=%s m=%d trains=%lld\n", scheme_name(record.config.scheme),
                  record.config.m, static_cast<long long>(record.trains_sent));
    out += line;
    std::snprintf(line, sizeof line,
                  "edge=%lld mismatch=%lld suppressed=%lld guess_correct=%lld guess_total=%lld\n",
                  static_cast<long long>(record.discarded_edge_detections),
                  static_cast<long long>(record.discarded_basis_mismatch),
                  static_cast<long long>(record.suppressed_trains),
                  static_cast<long long>(record.eve_guess_correct),
                  static_cast<long long>(record.eve_guess_total));
    out += line;
    std::snprintf(line, sizeof line, "sifted=%zu\n", record.alice_key.size());
    out += line;
    for (std::size_t i = 0; i < record.alice_key.size(); ++i) {
        std::snprintf(line, sizeof line, "%lld,%d,%d,%d,%d\n",
                      static_cast<long long>(record.alice_key.positions[i].train),
                      record.alice_key.positions[i].slot, record.alice_key.bits[i],
                      record.bob_key.bits[i], record.eve_known_mask[i]);
        out += line;
    }
    return out;
}

}  // namespace qkd

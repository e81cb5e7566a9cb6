#include "qkd/optics.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace qkd {

Complex PhasePattern::unit(int quarter_turns) {
    static const Complex table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[((quarter_turns % 4) + 4) % 4];
}

double PulseTrain::total_probability() const {
    double sum = 0.0;
    for (const Complex& a : amplitudes) sum += std::norm(a);
    return sum;
}

bool PulseTrain::is_normalized(double tol) const {
    return std::abs(total_probability() - 1.0) <= tol;
}

DetectionDistribution::DetectionDistribution(int n_slots)
    : n_slots_(n_slots), p_(static_cast<std::size_t>(n_slots) * 2, 0.0) {
    if (n_slots <= 0) throw std::invalid_argument("DetectionDistribution: need at least one slot");
}

double DetectionDistribution::probability(int slot, Detector det) const {
    if (slot < 0 || slot >= n_slots_)
        throw std::invalid_argument("DetectionDistribution: slot out of range");
    return p_[static_cast<std::size_t>(slot) * 2 + static_cast<std::size_t>(det)];
}

void DetectionDistribution::set(int slot, Detector det, double p) {
    if (slot < 0 || slot >= n_slots_)
        throw std::invalid_argument("DetectionDistribution: slot out of range");
    if (p < 0.0) throw std::invalid_argument("DetectionDistribution: negative probability");
    p_[static_cast<std::size_t>(slot) * 2 + static_cast<std::size_t>(det)] = p;
}

double DetectionDistribution::total() const {
    double sum = 0.0;
    for (double v : p_) sum += v;
    return sum;
}

SwitchSchedule SwitchSchedule::fixed_adjacent(int n_bins) {
    if (n_bins <= 0) throw std::invalid_argument("SwitchSchedule: need at least one bin");
    SwitchSchedule s;
    int b = 0;
    for (; b + 1 < n_bins; b += 2) s.pairs.emplace_back(b, b + 1);
    if (b < n_bins) s.pass_through.push_back(b);
    return s;
}

SwitchSchedule SwitchSchedule::random_adjacent(int n_bins, RngStream& rng) {
    if (n_bins <= 0) throw std::invalid_argument("SwitchSchedule: need at least one bin");
    if (n_bins % 2 == 0) return fixed_adjacent(n_bins);
    // A maximal adjacent pairing of an odd path leaves exactly one bin with
    // an even index unpaired; pick that bin uniformly.
    const int unpaired = 2 * static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>((n_bins + 1) / 2)));
    SwitchSchedule s;
    for (int b = 0; b + 1 < unpaired; b += 2) s.pairs.emplace_back(b, b + 1);
    for (int b = unpaired + 1; b + 1 < n_bins; b += 2) s.pairs.emplace_back(b, b + 1);
    s.pass_through.push_back(unpaired);
    return s;
}

PulseTrain build_train(int n_pulses, const PhasePattern& pattern) {
    if (n_pulses <= 0) throw std::invalid_argument("build_train: n_pulses must be positive");
    if (pattern.size() != static_cast<std::size_t>(n_pulses))
        throw std::invalid_argument("build_train: pattern length must equal n_pulses");
    PulseTrain train;
    train.amplitudes.resize(static_cast<std::size_t>(n_pulses));
    const double magnitude = 1.0 / std::sqrt(static_cast<double>(n_pulses));
    for (int j = 0; j < n_pulses; ++j)
        train.amplitudes[static_cast<std::size_t>(j)] =
            magnitude * PhasePattern::unit(pattern.quarter_turns[static_cast<std::size_t>(j)]);
    return train;
}

PulseTrain serial_transmitter_train(int m, const PhasePattern& pattern) {
    if (m <= 0 || m > 20) throw std::invalid_argument("serial_transmitter_train: m must lie in 1..20");
    const std::size_t n = std::size_t{1} << m;
    if (pattern.size() != n)
        throw std::invalid_argument("serial_transmitter_train: pattern length must be 2^m");

    // One pulse through the delay cascade; stage k is a two-tap kernel,
    // out[j] = (x[j] + x[j - 2^k]) / sqrt(2), keeping a single output port.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<Complex> x{Complex{1.0, 0.0}};
    for (int k = 0; k < m; ++k) {
        const std::size_t d = std::size_t{1} << k;
        std::vector<Complex> out(x.size() + d, Complex{0.0, 0.0});
        for (std::size_t j = 0; j < x.size(); ++j) {
            out[j] += x[j] * inv_sqrt2;
            out[j + d] += x[j] * inv_sqrt2;
        }
        x = std::move(out);
    }

    // The phase modulator sits after the cascade and addresses each bin.
    for (std::size_t j = 0; j < n; ++j) x[j] *= PhasePattern::unit(pattern.quarter_turns[j]);

    PulseTrain train;
    train.amplitudes = std::move(x);
    return train;
}

PulseTrain parallel_transmitter_train(int m, const PhasePattern& pattern) {
    if (m <= 0 || m > 1 << 20) throw std::invalid_argument("parallel_transmitter_train: m must be positive");
    if (pattern.size() != static_cast<std::size_t>(m) + 1)
        throw std::invalid_argument("parallel_transmitter_train: pattern length must be m + 1");
    if (pattern.quarter_turns[0] % 4 != 0)
        throw std::invalid_argument("parallel_transmitter_train: the direct path has no modulator; the first phase is fixed to 0");
    return build_train(m + 1, pattern);
}

DetectionDistribution interferometer_distribution(const PulseTrain& train, const DelaySpec& delay) {
    if (delay.delay_bins < 1)
        throw std::invalid_argument("interferometer_distribution: delay_bins must be >= 1");
    if (!train.is_normalized())
        throw std::invalid_argument("interferometer_distribution: train must carry unit probability");

    const int n = static_cast<int>(train.length());
    const int d = delay.delay_bins;
    const Complex arm = PhasePattern::unit(delay.internal_phase_quarter_turns);

    DetectionDistribution dist(n + d);
    for (int j = 0; j < n + d; ++j) {
        const Complex direct = j < n ? train.amplitudes[static_cast<std::size_t>(j)] : Complex{};
        const Complex delayed =
            (j >= d && j - d < n) ? arm * train.amplitudes[static_cast<std::size_t>(j - d)] : Complex{};
        dist.set(j, Detector::D0, std::norm(0.5 * (direct + delayed)));
        dist.set(j, Detector::D1, std::norm(0.5 * (direct - delayed)));
    }
    return dist;
}

DetectionDistribution switch_overlap_distribution(const PulseTrain& train,
                                                  const SwitchSchedule& schedule) {
    const int n = static_cast<int>(train.length());
    std::vector<int> covered(static_cast<std::size_t>(n), 0);
    auto touch = [&](int bin) {
        if (bin < 0 || bin >= n)
            throw std::invalid_argument("switch_overlap_distribution: schedule bin out of range");
        ++covered[static_cast<std::size_t>(bin)];
    };
    for (const auto& [p, q] : schedule.pairs) {
        if (p == q) throw std::invalid_argument("switch_overlap_distribution: pair bins must be distinct");
        touch(p);
        touch(q);
    }
    for (int b : schedule.pass_through) touch(b);
    for (int c : covered)
        if (c != 1)
            throw std::invalid_argument("switch_overlap_distribution: schedule must cover every bin exactly once");
    if (!train.is_normalized())
        throw std::invalid_argument("switch_overlap_distribution: train must carry unit probability");

    DetectionDistribution dist(static_cast<int>(schedule.slot_count()));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    int slot = 0;
    for (const auto& [p, q] : schedule.pairs) {
        const Complex a = train.amplitudes[static_cast<std::size_t>(p)];
        const Complex b = train.amplitudes[static_cast<std::size_t>(q)];
        dist.set(slot, Detector::D0, std::norm(inv_sqrt2 * (a + b)));
        dist.set(slot, Detector::D1, std::norm(inv_sqrt2 * (a - b)));
        ++slot;
    }
    for (int b : schedule.pass_through) {
        // Lone pulse at the recombiner: 50/50, the label carries no phase.
        const double half = 0.5 * std::norm(train.amplitudes[static_cast<std::size_t>(b)]);
        dist.set(slot, Detector::D0, half);
        dist.set(slot, Detector::D1, half);
        ++slot;
    }
    return dist;
}

DetectionEvent sample_detection(const DetectionDistribution& dist, RngStream& rng) {
    const double total = dist.total();
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("sample_detection: distribution must sum to 1");

    double u = rng.uniform() * total;
    DetectionEvent last;
    for (int slot = 0; slot < dist.slot_count(); ++slot) {
        for (Detector det : {Detector::D0, Detector::D1}) {
            const double p = dist.probability(slot, det);
            if (p <= 0.0) continue;
            last = DetectionEvent{slot, det, std::nullopt};
            u -= p;
            if (u < 0.0) return last;
        }
    }
    return last;  // numerical dust: the final outcome absorbs it
}

}  // namespace qkd

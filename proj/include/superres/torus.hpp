#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

namespace superres {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps a real coordinate onto [0, 1), identifying 0 and 1.
inline double wrap_unit(double v) {
    double w = v - std::floor(v);
    return (w >= 1.0) ? w - 1.0 : w;
}

/// A point on the unit circle, stored canonically in [0, 1).
struct TorusPoint {
    double value = 0.0;

    TorusPoint() = default;
    explicit TorusPoint(double t) : value(wrap_unit(t)) {}
};

/// Circle metric: min(|s-t|, 1-|s-t|), always in [0, 1/2].
inline double wrap_distance(TorusPoint s, TorusPoint t) {
    double d = std::fabs(s.value - t.value);
    return std::min(d, 1.0 - d);
}

struct Spike {
    TorusPoint location;
    Complex amplitude;
};

/// An atomic measure: a finite list of weighted Dirac spikes on the circle.
/// Spikes are stored sorted by location; locations closer than kMergeTolerance
/// on the circle are treated as one spike and their amplitudes added.
class SpikeTrain {
public:
    /// Two locations count as the same spike below this circle distance.
    static constexpr double kMergeTolerance = 1e-12;

    SpikeTrain() = default;

    explicit SpikeTrain(std::vector<Spike> spikes) {
        std::sort(spikes.begin(), spikes.end(), [](const Spike& a, const Spike& b) {
            return a.location.value < b.location.value;
        });
        for (const Spike& s : spikes) {
            if (!spikes_.empty() &&
                wrap_distance(spikes_.back().location, s.location) < kMergeTolerance) {
                spikes_.back().amplitude += s.amplitude;
            } else {
                spikes_.push_back(s);
            }
        }
        // The sort leaves wrap-around neighbours (near 0 and near 1) at opposite
        // ends; they may still be one spike on the circle.
        if (spikes_.size() >= 2 &&
            wrap_distance(spikes_.front().location, spikes_.back().location) < kMergeTolerance) {
            spikes_.front().amplitude += spikes_.back().amplitude;
            spikes_.pop_back();
        }
    }

    const std::vector<Spike>& spikes() const { return spikes_; }
    std::size_t size() const { return spikes_.size(); }
    bool empty() const { return spikes_.empty(); }

private:
    std::vector<Spike> spikes_;
};

/// Total-variation norm of an atomic measure: the sum of amplitude moduli.
inline double tv_norm(const SpikeTrain& x) {
    double s = 0.0;
    for (const Spike& sp : x.spikes()) s += std::abs(sp.amplitude);
    return s;
}

/// Smallest pairwise circle distance between support points. Empty for fewer
/// than two spikes (the infimum over an empty pair set is +inf, so separation
/// tests pass vacuously).
inline std::optional<double> min_separation(const SpikeTrain& t) {
    const auto& s = t.spikes();
    if (s.size() < 2) return std::nullopt;
    // Sorted on the circle, so the minimum is attained between neighbours
    // (including the wrap-around pair).
    double best = wrap_distance(s.front().location, s.back().location);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        best = std::min(best, wrap_distance(s[i].location, s[i + 1].location));
    }
    return best;
}

/// Train with all amplitudes multiplied by c.
inline SpikeTrain scaled(const SpikeTrain& x, Complex c) {
    std::vector<Spike> out = x.spikes();
    for (Spike& s : out) s.amplitude *= c;
    return SpikeTrain(std::move(out));
}

/// h = x - x_est as a spike train. Coincident locations (within the merge
/// tolerance) cancel by amplitude addition; exactly-zero amplitudes are dropped.
inline SpikeTrain subtract(const SpikeTrain& x, const SpikeTrain& x_est) {
    std::vector<Spike> all = x.spikes();
    all.reserve(all.size() + x_est.size());
    for (const Spike& s : x_est.spikes()) all.push_back({s.location, -s.amplitude});
    SpikeTrain merged{std::move(all)};
    std::vector<Spike> kept;
    for (const Spike& s : merged.spikes()) {
        if (std::abs(s.amplitude) != 0.0) kept.push_back(s);
    }
    return SpikeTrain(std::move(kept));
}

inline SpikeTrain add(const SpikeTrain& x, const SpikeTrain& z) {
    return subtract(x, scaled(z, Complex(-1.0, 0.0)));
}

}  // namespace superres

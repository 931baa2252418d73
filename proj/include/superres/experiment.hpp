#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "superres/errors.hpp"
#include "superres/json_io.hpp"
#include "superres/measurement.hpp"
#include "superres/metrics.hpp"
#include "superres/rng.hpp"
#include "superres/solver.hpp"
#include "superres/svg.hpp"
#include "superres/torus.hpp"

namespace superres {

struct SignalSpec {
    enum class Kind { Explicit, Random };
    enum class AmplitudeLaw { UnitModulus, LogUniformModulus };

    Kind kind = Kind::Random;
    SpikeTrain explicit_train;        // Kind::Explicit
    int spike_count = 5;              // Kind::Random
    double min_sep_multiplier = 2.0;  // required Delta(T) in units of lambda_lo
    AmplitudeLaw law = AmplitudeLaw::UnitModulus;
};

struct ExperimentConfig {
    int f_lo = 20;
    std::vector<int> f_hi_list{40};
    SignalSpec signal;
    NoiseSpec noise = NoiseSpec::none();
    double snr_db = 0.0;  // > 0: pick Gaussian sigma per instance for this SNR
    int trials = 1;
    std::uint64_t seed = 0;
    SolverOptions solver;
    std::string out_csv;
    std::string out_svg;
};

/// One row of a sweep. tv_far_lo / tv_far_hi use the partitions at lambda_lo
/// and lambda_hi; i_near is the weighted second moment at lambda_lo.
struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    int f_lo = 0;
    int f_hi = 0;
    double srf = 0.0;
    double sigma = 0.0;
    double delta = 0.0;
    double smoothed_l1 = 0.0;
    double smoothed_l1_err_est = 0.0;
    double tv_far_lo = 0.0;
    double tv_far_hi = 0.0;
    double i_near = 0.0;
    double support_hausdorff = 0.0;
    double amp_rel_error = 0.0;
    double objective = 0.0;
    double gap = 0.0;
    double psd_violation = 0.0;
    double trace_violation = 0.0;
    std::uint64_t iterations = 0;
    std::string status = "ok";
};

/// Cap on total draws when rejection-sampling a separated support.
inline constexpr int kRejectionCap = 100000;

/// k spikes with min separation >= min_sep (circle metric) by rejection
/// sampling; amplitudes per the law (unit modulus with uniform phase, or
/// log-uniform modulus in [0.1, 1]).
inline SpikeTrain random_spike_train(Rng& rng, int k, double min_sep,
                                     SignalSpec::AmplitudeLaw law) {
    if (k < 1) throw std::invalid_argument("random_spike_train: need k >= 1");
    for (int attempt = 0; attempt < kRejectionCap; ++attempt) {
        std::vector<double> locs(static_cast<std::size_t>(k));
        for (double& t : locs) t = rng.uniform();
        std::sort(locs.begin(), locs.end());
        bool ok = true;
        for (int i = 0; i < k && ok; ++i) {
            const double gap = (i + 1 < k) ? locs[static_cast<std::size_t>(i + 1)] - locs[static_cast<std::size_t>(i)]
                                           : locs.front() + 1.0 - locs.back();
            if (gap < min_sep) ok = false;
        }
        if (!ok) continue;
        std::vector<Spike> spikes;
        spikes.reserve(static_cast<std::size_t>(k));
        for (double t : locs) {
            const double phase = kTwoPi * rng.uniform();
            double mag = 1.0;
            if (law == SignalSpec::AmplitudeLaw::LogUniformModulus) {
                mag = std::exp(std::log(0.1) + rng.uniform() * (std::log(1.0) - std::log(0.1)));
            }
            spikes.push_back({TorusPoint(t), std::polar(mag, phase)});
        }
        return SpikeTrain(std::move(spikes));
    }
    throw std::runtime_error("random_spike_train: rejection sampling cap reached; "
                             "too many spikes for the requested separation");
}

/// Hausdorff distance between two supports in the circle metric. Empty vs
/// nonempty counts as the circle diameter 1/2; empty vs empty is 0.
inline double support_hausdorff(const std::vector<TorusPoint>& a,
                                const std::vector<TorusPoint>& b) {
    if (a.empty() && b.empty()) return 0.0;
    if (a.empty() || b.empty()) return 0.5;
    auto one_sided = [](const std::vector<TorusPoint>& from, const std::vector<TorusPoint>& to) {
        double worst = 0.0;
        for (const TorusPoint& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const TorusPoint& q : to) best = std::min(best, wrap_distance(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

/// Matched amplitude error relative to tv_norm(x): each true spike pairs with
/// the nearest estimated spike within half of lambda_lo (contributing the
/// amplitude difference; an unmatched true spike contributes its full
/// modulus), and estimated spikes left unmatched contribute theirs.
inline double amplitude_relative_error(const SpikeTrain& truth, const SpikeTrain& estimate,
                                       double lambda_lo) {
    const double denom = tv_norm(truth);
    if (denom == 0.0) return tv_norm(estimate) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    std::vector<bool> used(estimate.size(), false);
    double num = 0.0;
    for (const Spike& s : truth.spikes()) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = 0;
        for (std::size_t j = 0; j < estimate.size(); ++j) {
            const double d = wrap_distance(s.location, estimate.spikes()[j].location);
            if (!used[j] && d < best) {
                best = d;
                best_j = j;
            }
        }
        if (best <= 0.5 * lambda_lo) {
            used[best_j] = true;
            num += std::abs(estimate.spikes()[best_j].amplitude - s.amplitude);
        } else {
            num += std::abs(s.amplitude);
        }
    }
    for (std::size_t j = 0; j < estimate.size(); ++j) {
        if (!used[j]) num += std::abs(estimate.spikes()[j].amplitude);
    }
    return num / denom;
}

namespace detail {

inline std::vector<TorusPoint> support_of(const SpikeTrain& x) {
    std::vector<TorusPoint> pts;
    pts.reserve(x.size());
    for (const Spike& s : x.spikes()) pts.push_back(s.location);
    return pts;
}

inline double sigma_for_snr(const VectorXcd& clean, double snr_db) {
    // SNR(dB) = 10 log10( ||clean||^2 / E||eps||^2 ), E||eps||^2 = 2 n sigma^2.
    const double n = double(clean.size());
    return clean.norm() / std::sqrt(2.0 * n * std::pow(10.0, snr_db / 10.0));
}

}  // namespace detail

/// Runs the sweep. All randomness derives from the config seed: trial i uses
/// the subseed mix64(seed, i), from which the signal stream and the noise
/// stream are split. Each trial is a single instance (signal, noise, solve)
/// evaluated against every f_hi in the list, so per-trial comparisons across
/// f_hi see the same recovery. Per-trial solver failures are recorded in the
/// status column and do not abort the sweep.
inline std::vector<TrialRecord> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const TrialRecord&)>& emit = nullptr) {
    std::vector<TrialRecord> records;
    const double lambda_lo = 1.0 / config.f_lo;

    for (int trial = 0; trial < config.trials; ++trial) {
        const std::uint64_t subseed = mix64(config.seed, static_cast<std::uint64_t>(trial));

        SpikeTrain x;
        if (config.signal.kind == SignalSpec::Kind::Explicit) {
            x = config.signal.explicit_train;
        } else {
            Rng signal_rng(mix64(subseed, 1));
            x = random_spike_train(signal_rng, config.signal.spike_count,
                                   config.signal.min_sep_multiplier * lambda_lo,
                                   config.signal.law);
        }

        NoiseSpec noise = config.noise;
        if (noise.kind == NoiseSpec::Kind::GaussianSpectral) {
            noise.seed = mix64(subseed, 2);
            if (config.snr_db > 0.0) {
                noise.sigma = detail::sigma_for_snr(forward(x, config.f_lo), config.snr_db);
            }
        }
        const Measurement m = measure(x, config.f_lo, noise);

        TrialRecord base;
        base.trial = trial;
        base.seed = subseed;
        base.f_lo = config.f_lo;
        base.sigma = noise.kind == NoiseSpec::Kind::GaussianSpectral ? noise.sigma : 0.0;
        base.delta = m.delta;

        SpikeTrain estimate;
        bool solved = false;
        try {
            const RecoveryResult rec = recover(m, config.solver);
            estimate = rec.estimate;
            base.objective = rec.dual.objective;
            base.gap = rec.dual.gap;
            base.psd_violation = rec.dual.psd_violation;
            base.trace_violation = rec.dual.trace_violation;
            base.iterations = rec.dual.iterations;
            base.status = rec.degenerate_dual ? "degenerate_dual" : "ok";
            solved = true;
        } catch (const std::exception& e) {
            base.status = std::string("error: ") + e.what();
        }

        const SpikeTrain h = subtract(x, estimate);
        const std::vector<TorusPoint> truth_support = detail::support_of(x);

        for (int f_hi : config.f_hi_list) {
            TrialRecord rec = base;
            rec.f_hi = f_hi;
            rec.srf = srf(config.f_lo, f_hi);
            if (solved) {
                const QuadratureResult q = smoothed_l1_error_quad(h, f_hi);
                rec.smoothed_l1 = q.value;
                rec.smoothed_l1_err_est = q.error_estimate;
                const auto lo_part =
                    near_far_decomposition(h, truth_support, lambda_lo, lambda_lo);
                const auto hi_part =
                    near_far_decomposition(h, truth_support, 1.0 / f_hi, lambda_lo);
                rec.tv_far_lo = lo_part.tv_far;
                rec.tv_far_hi = hi_part.tv_far;
                rec.i_near = lo_part.i_near;
                rec.support_hausdorff =
                    support_hausdorff(truth_support, detail::support_of(estimate));
                rec.amp_rel_error = amplitude_relative_error(x, estimate, lambda_lo);
            } else {
                rec.smoothed_l1 = rec.smoothed_l1_err_est = rec.tv_far_lo = rec.tv_far_hi =
                    rec.i_near = rec.support_hausdorff = rec.amp_rel_error =
                        std::numeric_limits<double>::quiet_NaN();
            }
            if (emit) emit(rec);
            records.push_back(std::move(rec));
        }
    }
    return records;
}

struct ScalingFit {
    double slope = 0.0;   // log-log slope of median smoothed_l1 vs SRF
    double c0_hat = 0.0;  // max over records of error / (SRF^2 delta)
    double ratio_min = 0.0, ratio_max = 0.0;
    std::vector<double> srf_values;
    std::vector<double> medians;
};

/// Least-squares slope of log(median error) against log(SRF), plus the
/// empirical stability constant. Needs at least three distinct SRF values.
inline ScalingFit fit_scaling(const std::vector<TrialRecord>& records) {
    std::vector<double> srfs;
    for (const TrialRecord& r : records) {
        if (r.status != "ok") continue;
        if (std::find(srfs.begin(), srfs.end(), r.srf) == srfs.end()) srfs.push_back(r.srf);
    }
    std::sort(srfs.begin(), srfs.end());
    if (srfs.size() < 3) throw InsufficientSpread(srfs.size());

    ScalingFit fit;
    fit.srf_values = srfs;
    fit.ratio_min = std::numeric_limits<double>::infinity();
    for (double s : srfs) {
        std::vector<double> errs;
        for (const TrialRecord& r : records) {
            if (r.status == "ok" && r.srf == s) errs.push_back(r.smoothed_l1);
        }
        std::sort(errs.begin(), errs.end());
        const std::size_t mid = errs.size() / 2;
        const double median = errs.size() % 2 == 1 ? errs[mid]
                                                   : 0.5 * (errs[mid - 1] + errs[mid]);
        fit.medians.push_back(median);
    }
    for (const TrialRecord& r : records) {
        if (r.status != "ok" || !(r.delta > 0.0)) continue;
        const double ratio = theorem_bound_check(r.smoothed_l1, r.srf, r.delta);
        fit.c0_hat = std::max(fit.c0_hat, ratio);
        fit.ratio_min = std::min(fit.ratio_min, ratio);
        fit.ratio_max = std::max(fit.ratio_max, ratio);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(srfs.size());
    for (std::size_t i = 0; i < srfs.size(); ++i) {
        const double lx = std::log(srfs[i]);
        const double ly = std::log(std::max(fit.medians[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

/// Fixed CSV schema for sweep records (column order is part of the contract).
inline const char* kCsvHeader =
    "trial,seed,f_lo,f_hi,srf,sigma,delta,smoothed_l1,smoothed_l1_err_est,"
    "tv_far_lo,tv_far_hi,i_near,support_hausdorff,amp_rel_error,objective,gap,"
    "psd_violation,trace_violation,iterations,status";

inline std::string csv_row(const TrialRecord& r) {
    char buf[768];
    std::snprintf(buf, sizeof(buf),
                  "%d,%llu,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                  "%.17g,%.17g,%.17g,%.17g,%llu,%s",
                  r.trial, static_cast<unsigned long long>(r.seed), r.f_lo, r.f_hi, r.srf,
                  r.sigma, r.delta, r.smoothed_l1, r.smoothed_l1_err_est, r.tv_far_lo,
                  r.tv_far_hi, r.i_near, r.support_hausdorff, r.amp_rel_error, r.objective,
                  r.gap, r.psd_violation, r.trace_violation,
                  static_cast<unsigned long long>(r.iterations), r.status.c_str());
    return buf;
}

inline std::string to_csv(const std::vector<TrialRecord>& records) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const TrialRecord& r : records) {
        out += csv_row(r);
        out += '\n';
    }
    return out;
}

/// Log-log chart of median smoothed error vs SRF with a reference SRF^2 line.
inline std::string sweep_chart(const ScalingFit& fit) {
    svg::Series data{"median smoothed L1", "#1f6fb2", fit.srf_values, fit.medians};
    svg::Series ref{"C * SRF^2", "#c44e52", fit.srf_values, {}};
    if (!fit.medians.empty()) {
        const double c = fit.medians.front() / (fit.srf_values.front() * fit.srf_values.front());
        for (double s : fit.srf_values) ref.y.push_back(c * s * s);
    }
    char title[128];
    std::snprintf(title, sizeof(title), "error vs SRF (fitted slope %.3f)", fit.slope);
    return svg::line_chart({data, ref}, title, "SRF", "smoothed L1 error", true, true);
}

/// JSON round-trip for configs (the CLI reads these and lets flags override).
inline json to_json(const ExperimentConfig& c) {
    json signal;
    if (c.signal.kind == SignalSpec::Kind::Explicit) {
        signal = {{"explicit", to_json(c.signal.explicit_train)}};
    } else {
        signal = {{"random",
                   {{"k", c.signal.spike_count},
                    {"min_sep_multiplier", c.signal.min_sep_multiplier},
                    {"amplitude_law",
                     c.signal.law == SignalSpec::AmplitudeLaw::UnitModulus ? "unit_modulus"
                                                                           : "log_uniform"}}}};
    }
    json noise;
    switch (c.noise.kind) {
        case NoiseSpec::Kind::None: noise = {{"kind", "none"}}; break;
        case NoiseSpec::Kind::GaussianSpectral:
            noise = {{"kind", "gaussian"}, {"sigma", c.noise.sigma}, {"gamma", c.noise.gamma}};
            break;
        case NoiseSpec::Kind::ExplicitSpectral:
            noise = {{"kind", "explicit"},
                     {"values", complex_vector_to_json(c.noise.values)},
                     {"delta", c.noise.delta}};
            break;
    }
    return {{"f_lo", c.f_lo},          {"f_hi_list", c.f_hi_list}, {"signal", signal},
            {"noise", noise},          {"snr_db", c.snr_db},       {"trials", c.trials},
            {"seed", c.seed},          {"out_csv", c.out_csv},     {"out_svg", c.out_svg}};
}

inline ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    c.f_lo = j.value("f_lo", c.f_lo);
    if (j.contains("f_hi_list")) c.f_hi_list = j.at("f_hi_list").get<std::vector<int>>();
    if (j.contains("signal")) {
        const json& s = j.at("signal");
        if (s.contains("explicit")) {
            c.signal.kind = SignalSpec::Kind::Explicit;
            c.signal.explicit_train = spike_train_from_json(s.at("explicit"));
        } else if (s.contains("random")) {
            const json& r = s.at("random");
            c.signal.kind = SignalSpec::Kind::Random;
            c.signal.spike_count = r.value("k", c.signal.spike_count);
            c.signal.min_sep_multiplier = r.value("min_sep_multiplier", c.signal.min_sep_multiplier);
            const std::string law = r.value("amplitude_law", std::string("unit_modulus"));
            c.signal.law = law == "log_uniform" ? SignalSpec::AmplitudeLaw::LogUniformModulus
                                                : SignalSpec::AmplitudeLaw::UnitModulus;
        }
    }
    if (j.contains("noise")) {
        const json& n = j.at("noise");
        const std::string kind = n.value("kind", std::string("none"));
        if (kind == "gaussian") {
            c.noise = NoiseSpec::gaussian(n.value("sigma", 0.0), n.value("gamma", 0.0), 0);
        } else if (kind == "explicit") {
            c.noise = NoiseSpec::explicit_spectral(complex_vector_from_json(n.at("values")),
                                                   n.value("delta", 0.0));
        } else {
            c.noise = NoiseSpec::none();
        }
    }
    c.snr_db = j.value("snr_db", c.snr_db);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.out_csv = j.value("out_csv", c.out_csv);
    c.out_svg = j.value("out_svg", c.out_svg);
    return c;
}

}  // namespace superres

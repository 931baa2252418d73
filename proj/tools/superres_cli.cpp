// Command-line front end: recover | sweep | certify | oracle.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "superres/experiment.hpp"
#include "superres/json_io.hpp"

using namespace superres;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

void emit_json(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        write_text(out_path, j.dump(2) + "\n");
    }
}

struct CommonFlags {
    std::optional<int> f_lo;
    std::optional<double> sigma, gamma, delta, support_tol, snr_db;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::vector<int> f_hi;
    std::string out, svg_out, config_path, signal_path, measurement_path;
    bool strict_separation = false;
    int grid_density = 64;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags override its values)");
    cmd->add_option("--f-lo", f.f_lo, "observed cutoff frequency");
    cmd->add_option("--f-hi", f.f_hi, "target cutoff frequencies")->delimiter(',');
    cmd->add_option("--sigma", f.sigma, "Gaussian spectral noise level");
    cmd->add_option("--gamma", f.gamma, "noise budget slack factor");
    cmd->add_option("--delta", f.delta, "explicit noise budget override");
    cmd->add_option("--snr-db", f.snr_db, "choose sigma per instance for this SNR");
    cmd->add_option("--seed", f.seed, "root seed");
    cmd->add_option("--trials", f.trials, "number of trials");
    cmd->add_option("--support-tol", f.support_tol, "threshold on 1-|q|^2 for support detection");
    cmd->add_option("--grid-density", f.grid_density, "verification grid density (x f_lo)");
    cmd->add_flag("--strict-separation", f.strict_separation,
                  "fail below the 2*lambda_lo separation instead of warning");
    cmd->add_option("--out", f.out, "output file (default: stdout / config value)");
}

ExperimentConfig make_config(const CommonFlags& f) {
    ExperimentConfig c;
    if (!f.config_path.empty()) c = config_from_json(load_json(f.config_path));
    if (f.f_lo) c.f_lo = *f.f_lo;
    if (!f.f_hi.empty()) c.f_hi_list = f.f_hi;
    if (f.sigma || f.gamma) {
        const double sigma = f.sigma.value_or(c.noise.sigma);
        const double gamma = f.gamma.value_or(c.noise.gamma);
        c.noise = NoiseSpec::gaussian(sigma, gamma, 0);
    }
    if (f.snr_db) c.snr_db = *f.snr_db;
    if (f.seed) c.seed = *f.seed;
    if (f.trials) c.trials = *f.trials;
    if (f.support_tol) c.solver.support_tol = *f.support_tol;
    if (!f.signal_path.empty()) {
        c.signal.kind = SignalSpec::Kind::Explicit;
        c.signal.explicit_train = spike_train_from_json(load_json(f.signal_path));
    }
    if (!f.out.empty()) c.out_csv = f.out;
    return c;
}

/// Builds the single measurement a `recover`/`oracle` run works on.
Measurement instance_measurement(const CommonFlags& f, SpikeTrain* truth_out) {
    if (!f.measurement_path.empty()) {
        Measurement m = measurement_from_json(load_json(f.measurement_path));
        if (f.delta) m.delta = *f.delta;
        return m;
    }
    ExperimentConfig c = make_config(f);
    SpikeTrain x;
    if (c.signal.kind == SignalSpec::Kind::Explicit) {
        x = c.signal.explicit_train;
    } else {
        Rng rng(mix64(c.seed, 1));
        x = random_spike_train(rng, c.signal.spike_count,
                               c.signal.min_sep_multiplier / c.f_lo, c.signal.law);
    }
    if (truth_out) *truth_out = x;
    NoiseSpec noise = c.noise;
    if (noise.kind == NoiseSpec::Kind::GaussianSpectral) {
        noise.seed = mix64(c.seed, 2);
        if (c.snr_db > 0.0) {
            noise.sigma = detail::sigma_for_snr(forward(x, c.f_lo), c.snr_db);
        }
    }
    Measurement m = measure(x, c.f_lo, noise);
    if (f.delta) m.delta = *f.delta;
    return m;
}

int cmd_recover(const CommonFlags& f) {
    SpikeTrain truth;
    const Measurement m = instance_measurement(f, &truth);
    ExperimentConfig c = make_config(f);
    const RecoveryResult rec = recover(m, c.solver);

    json out = to_json(rec);
    out["measurement"] = to_json(m);
    if (!truth.empty()) out["truth"] = to_json(truth);
    emit_json(out, f.out);

    if (!f.svg_out.empty()) {
        std::vector<svg::Series> series;
        svg::Series est{"estimate", "#1f6fb2", {}, {}};
        for (const Spike& s : rec.estimate.spikes()) {
            est.x.push_back(s.location.value);
            est.y.push_back(std::abs(s.amplitude));
        }
        series.push_back(est);
        if (!truth.empty()) {
            svg::Series tr{"truth", "#c44e52", {}, {}};
            for (const Spike& s : truth.spikes()) {
                tr.x.push_back(s.location.value);
                tr.y.push_back(std::abs(s.amplitude));
            }
            series.push_back(tr);
        }
        write_text(f.svg_out, svg::stem_chart(series, "recovered spike train"));
    }
    return 0;
}

int cmd_sweep(const CommonFlags& f) {
    ExperimentConfig c = make_config(f);
    std::ofstream csv;
    if (!c.out_csv.empty()) {
        csv.open(c.out_csv, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open " + c.out_csv);
        csv << kCsvHeader << "\n";
    }
    const auto records = run_experiment(c, [&](const TrialRecord& r) {
        if (csv.is_open()) csv << csv_row(r) << "\n" << std::flush;
    });
    if (csv.is_open()) csv.close();

    std::size_t failures = 0;
    for (const auto& r : records) {
        if (r.status != "ok") ++failures;
    }
    std::printf("sweep: %zu records, %zu non-ok\n", records.size(), failures);
    try {
        const ScalingFit fit = fit_scaling(records);
        std::printf("fit: slope %.4f, C0_hat %.4f, ratio range [%.4g, %.4g]\n", fit.slope,
                    fit.c0_hat, fit.ratio_min, fit.ratio_max);
        const std::string svg_path = !f.svg_out.empty() ? f.svg_out : c.out_svg;
        if (!svg_path.empty()) write_text(svg_path, sweep_chart(fit));
    } catch (const InsufficientSpread&) {
        std::printf("fit: skipped (needs >= 3 distinct SRF values)\n");
    }
    return 0;
}

int cmd_certify(const CommonFlags& f, const std::vector<double>& support_values,
                const std::string& support_file, const std::string& signs_file,
                std::optional<std::uint64_t> random_signs) {
    if (!f.f_lo) throw std::runtime_error("certify: --f-lo is required");
    std::vector<TorusPoint> support;
    for (double t : support_values) support.emplace_back(t);
    if (!support_file.empty()) {
        for (const auto& e : load_json(support_file)) support.emplace_back(e.get<double>());
    }
    if (support.empty()) throw std::runtime_error("certify: empty support");

    VectorXcd v = VectorXcd::Ones(static_cast<Eigen::Index>(support.size()));
    if (!signs_file.empty()) {
        v = complex_vector_from_json(load_json(signs_file));
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] /= std::abs(v[i]);
    } else if (random_signs) {
        Rng rng(*random_signs);
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::polar(1.0, kTwoPi * rng.uniform());
    }

    CertificateOptions opts;
    opts.strict_separation = f.strict_separation;
    opts.grid_density = f.grid_density;
    const InterpolationSystem sys = build_system(support, *f.f_lo, opts);
    const CertificateReport q_rep = build_q(sys, v, opts);
    const CertificateReport q1_rep = build_q1(sys, v, opts);
    const VerificationSummary summary = verify_certificate(q_rep, support, *f.f_lo, f.grid_density);

    json out = {{"q", to_json(q_rep, sys)},
                {"q1", to_json(q1_rep, sys)},
                {"verification",
                 {{"max_far", summary.max_far},
                  {"far_margin", summary.far_margin},
                  {"c_a_hat", summary.c_a_hat},
                  {"c_lemma5_hat", summary.c_lemma5_hat},
                  {"grid_points", summary.grid_points}}}};
    emit_json(out, f.out);
    return 0;
}

int cmd_oracle(const CommonFlags& f, int grid_size, bool compare) {
    const Measurement m = instance_measurement(f, nullptr);
    if (grid_size <= 0) grid_size = 64 * m.f_lo;
    ExperimentConfig c = make_config(f);
    const GridLassoResult res = grid_lasso_oracle(m, grid_size, c.solver);

    json out = {{"value", res.value},
                {"duality_gap", res.duality_gap},
                {"grid_size", grid_size},
                {"iterations", res.iterations}};
    if (compare) {
        const DualSolution ds = solve_dual(m, c.solver);
        out["sdp_objective"] = ds.objective;
        out["difference"] = res.value - ds.objective;
    }
    emit_json(out, f.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"total-variation super-resolution of spike trains from low-pass Fourier data"};
    app.require_subcommand(1);

    CommonFlags rf, sf, cf, of;

    CLI::App* rec = app.add_subcommand("recover", "solve one instance, write a JSON result");
    add_common(rec, rf);
    rec->add_option("--signal", rf.signal_path, "ground-truth spike train (JSON)");
    rec->add_option("--measurement", rf.measurement_path, "measurement file (JSON, skips synthesis)");
    rec->add_option("--svg", rf.svg_out, "stem chart output path");

    CLI::App* sw = app.add_subcommand("sweep", "run seeded trials over f_hi, write CSV (+SVG)");
    add_common(sw, sf);
    sw->add_option("--signal", sf.signal_path, "explicit signal for every trial (JSON)");
    sw->add_option("--svg", sf.svg_out, "scaling chart output path");

    std::vector<double> support_values;
    std::string support_file, signs_file;
    std::optional<std::uint64_t> random_signs;
    CLI::App* ce = app.add_subcommand("certify", "build and audit dual certificates on a support");
    add_common(ce, cf);
    ce->add_option("--support", support_values, "support points on [0,1)")->delimiter(',');
    ce->add_option("--support-file", support_file, "JSON array of support points");
    ce->add_option("--signs-file", signs_file, "JSON [re,im] sign pattern (normalized)");
    ce->add_option("--random-signs", random_signs, "random unit sign pattern from this seed");

    int grid_size = 0;
    bool compare = false;
    CLI::App* orc = app.add_subcommand("oracle", "grid-Lasso cross-check of the SDP value");
    add_common(orc, of);
    orc->add_option("--signal", of.signal_path, "ground-truth spike train (JSON)");
    orc->add_option("--measurement", of.measurement_path, "measurement file (JSON)");
    orc->add_option("--grid-size", grid_size, "grid size (default 64*f_lo)");
    orc->add_flag("--compare", compare, "also solve the SDP and report the difference");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rec->parsed()) return cmd_recover(rf);
        if (sw->parsed()) return cmd_sweep(sf);
        if (ce->parsed()) return cmd_certify(cf, support_values, support_file, signs_file, random_signs);
        if (orc->parsed()) return cmd_oracle(of, grid_size, compare);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "superres/experiment.hpp"

using namespace superres;
using Catch::Approx;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.f_lo = 8;
    c.f_hi_list = {16, 32};
    c.signal.kind = SignalSpec::Kind::Random;
    c.signal.spike_count = 2;
    c.signal.min_sep_multiplier = 2.0;
    c.noise = NoiseSpec::gaussian(0.05, 0.1, 0);
    c.trials = 2;
    c.seed = 7;
    return c;
}

}  // namespace

TEST_CASE("random_spike_train honors the separation constraint") {
    Rng rng(3);
    for (int rep = 0; rep < 25; ++rep) {
        SpikeTrain x = random_spike_train(rng, 5, 0.06, SignalSpec::AmplitudeLaw::UnitModulus);
        REQUIRE(x.size() == 5);
        CHECK(*min_separation(x) >= 0.06);
        for (const Spike& s : x.spikes()) CHECK(std::abs(s.amplitude) == Approx(1.0));
    }
    // k spikes at separation 2*lambda need k <= f_lo/2; far beyond that the
    // cap has to fire
    CHECK_THROWS_AS(random_spike_train(rng, 30, 2.0 / 16, SignalSpec::AmplitudeLaw::UnitModulus),
                    std::runtime_error);
}

TEST_CASE("log-uniform amplitude law stays in [0.1, 1]") {
    Rng rng(11);
    SpikeTrain x = random_spike_train(rng, 40, 0.0001, SignalSpec::AmplitudeLaw::LogUniformModulus);
    for (const Spike& s : x.spikes()) {
        CHECK(std::abs(s.amplitude) >= 0.1);
        CHECK(std::abs(s.amplitude) <= 1.0);
    }
}

TEST_CASE("support_hausdorff") {
    std::vector<TorusPoint> a{TorusPoint(0.1), TorusPoint(0.5)};
    std::vector<TorusPoint> b{TorusPoint(0.12), TorusPoint(0.48)};
    CHECK(support_hausdorff(a, b) == Approx(0.02).margin(1e-12));
    CHECK(support_hausdorff(a, a) == 0.0);
    CHECK(support_hausdorff({}, {}) == 0.0);
    CHECK(support_hausdorff(a, {}) == 0.5);
}

TEST_CASE("amplitude_relative_error") {
    SpikeTrain truth({{TorusPoint(0.2), Complex(1, 0)}, {TorusPoint(0.6), Complex(0, 2)}});
    CHECK(amplitude_relative_error(truth, truth, 0.05) == Approx(0.0));

    SpikeTrain off({{TorusPoint(0.2), Complex(0.9, 0)}, {TorusPoint(0.6), Complex(0, 2)}});
    CHECK(amplitude_relative_error(truth, off, 0.05) == Approx(0.1 / 3.0));

    // an unmatched spurious spike counts fully
    SpikeTrain spurious({{TorusPoint(0.2), Complex(1, 0)},
                         {TorusPoint(0.6), Complex(0, 2)},
                         {TorusPoint(0.9), Complex(0.3, 0)}});
    CHECK(amplitude_relative_error(truth, spurious, 0.05) == Approx(0.3 / 3.0));
}

TEST_CASE("run_experiment noiseless recovery is tight") {
    ExperimentConfig c;
    c.f_lo = 12;
    c.f_hi_list = {24};
    c.signal.kind = SignalSpec::Kind::Explicit;
    c.signal.explicit_train = SpikeTrain({{TorusPoint(0.1), Complex(1, 0)},
                                          {TorusPoint(0.45), Complex(0, -1)},
                                          {TorusPoint(0.8), Complex(0.7, 0.7)}});
    c.noise = NoiseSpec::none();
    c.trials = 1;
    c.seed = 1;
    auto records = run_experiment(c);
    REQUIRE(records.size() == 1);
    CHECK(records[0].status == "ok");
    CHECK(records[0].smoothed_l1 <= 1e-3);
    CHECK(records[0].support_hausdorff <= 1e-4);
}

TEST_CASE("run_experiment is deterministic and monotone in f_hi per trial") {
    ExperimentConfig c = tiny_config();
    c.f_hi_list = {16, 32, 64};
    auto first = run_experiment(c);
    auto second = run_experiment(c);
    CHECK(to_csv(first) == to_csv(second));  // byte-identical

    REQUIRE(first.size() == 6);
    for (int trial = 0; trial < 2; ++trial) {
        for (int i = 1; i < 3; ++i) {
            const TrialRecord& prev = first[static_cast<std::size_t>(trial * 3 + i - 1)];
            const TrialRecord& cur = first[static_cast<std::size_t>(trial * 3 + i)];
            REQUIRE(prev.status == "ok");
            CHECK(cur.smoothed_l1 >= prev.smoothed_l1 - 1e-12);
        }
    }
}

TEST_CASE("fit_scaling") {
    SECTION("exact quadratic law") {
        std::vector<TrialRecord> records;
        for (double s : {2.0, 4.0, 8.0}) {
            TrialRecord r;
            r.srf = s;
            r.delta = 1.0;
            r.smoothed_l1 = s * s;
            records.push_back(r);
        }
        ScalingFit fit = fit_scaling(records);
        CHECK(fit.slope == Approx(2.0).margin(1e-12));
        CHECK(fit.c0_hat == Approx(1.0));
    }
    SECTION("constant error") {
        std::vector<TrialRecord> records;
        for (double s : {2.0, 4.0, 8.0}) {
            TrialRecord r;
            r.srf = s;
            r.delta = 1.0;
            r.smoothed_l1 = 0.7;
            records.push_back(r);
        }
        CHECK(fit_scaling(records).slope == Approx(0.0).margin(1e-12));
    }
    SECTION("insufficient spread") {
        std::vector<TrialRecord> records;
        for (double s : {2.0, 4.0}) {
            TrialRecord r;
            r.srf = s;
            r.smoothed_l1 = 1.0;
            records.push_back(r);
        }
        CHECK_THROWS_AS(fit_scaling(records), InsufficientSpread);
    }
}

TEST_CASE("csv schema golden file") {
    ExperimentConfig c = tiny_config();
    const std::string csv = to_csv(run_experiment(c));

    const std::string golden_path = std::string(TEST_DATA_DIR) + "/tiny_sweep.csv";
    std::ifstream in(golden_path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(csv == buf.str());
}

TEST_CASE("config json round trip") {
    ExperimentConfig c = tiny_config();
    c.snr_db = 25.0;
    c.out_csv = "out.csv";
    ExperimentConfig back = config_from_json(to_json(c));
    CHECK(back.f_lo == c.f_lo);
    CHECK(back.f_hi_list == c.f_hi_list);
    CHECK(back.trials == c.trials);
    CHECK(back.seed == c.seed);
    CHECK(back.snr_db == c.snr_db);
    CHECK(back.out_csv == c.out_csv);
    CHECK(back.noise.kind == NoiseSpec::Kind::GaussianSpectral);
    CHECK(back.noise.sigma == Approx(0.05));
    CHECK(back.signal.spike_count == 2);
}

TEST_CASE("spike train and measurement json round trips") {
    SpikeTrain x({{TorusPoint(0.25), Complex(1.5, -0.5)}, {TorusPoint(0.7), Complex(0, 1)}});
    SpikeTrain back = spike_train_from_json(to_json(x));
    REQUIRE(back.size() == 2);
    CHECK(back.spikes()[0].location.value == Approx(0.25));
    CHECK(back.spikes()[0].amplitude == Complex(1.5, -0.5));

    Measurement m = measure(x, 6, NoiseSpec::gaussian(0.1, 0.2, 4));
    Measurement mb = measurement_from_json(to_json(m));
    CHECK(mb.f_lo == m.f_lo);
    CHECK(mb.delta == Approx(m.delta));
    CHECK((mb.samples - m.samples).norm() == 0.0);
}

TEST_CASE("sweep chart is a self-contained svg") {
    ScalingFit fit;
    fit.srf_values = {2.0, 4.0, 8.0};
    fit.medians = {0.1, 0.4, 1.6};
    fit.slope = 2.0;
    const std::string svg = sweep_chart(fit);
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
}

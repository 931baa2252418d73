#pragma once

#include <json.hpp>
#include <vector>

#include "superres/certificate.hpp"
#include "superres/measurement.hpp"
#include "superres/solver.hpp"
#include "superres/torus.hpp"
#include "superres/trig_poly.hpp"

namespace superres {

using nlohmann::json;

/// Spike trains serialize as [{"t": location, "re": ..., "im": ...}, ...].
inline json to_json(const SpikeTrain& x) {
    json arr = json::array();
    for (const Spike& s : x.spikes()) {
        arr.push_back({{"t", s.location.value}, {"re", s.amplitude.real()},
                       {"im", s.amplitude.imag()}});
    }
    return arr;
}

inline SpikeTrain spike_train_from_json(const json& j) {
    std::vector<Spike> spikes;
    for (const auto& e : j) {
        spikes.push_back({TorusPoint(e.at("t").get<double>()),
                          Complex(e.at("re").get<double>(), e.at("im").get<double>())});
    }
    return SpikeTrain(std::move(spikes));
}

inline json complex_vector_to_json(const VectorXcd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back({v[i].real(), v[i].imag()});
    return arr;
}

inline VectorXcd complex_vector_from_json(const json& j) {
    VectorXcd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = Complex(j[i][0].get<double>(), j[i][1].get<double>());
    }
    return v;
}

/// Measurements serialize as {"f_lo", "delta", "samples"} with samples the
/// [re, im] pairs ordered k = -f_lo .. f_lo.
inline json to_json(const Measurement& m) {
    return {{"f_lo", m.f_lo}, {"delta", m.delta}, {"samples", complex_vector_to_json(m.samples)}};
}

inline Measurement measurement_from_json(const json& j) {
    Measurement m;
    m.f_lo = j.at("f_lo").get<int>();
    m.delta = j.at("delta").get<double>();
    m.samples = complex_vector_from_json(j.at("samples"));
    if (m.samples.size() != m.n()) {
        throw std::invalid_argument("measurement_from_json: samples length != 2 f_lo + 1");
    }
    return m;
}

inline json to_json(const TrigPoly& p) {
    VectorXcd c(static_cast<Eigen::Index>(p.coeffs().size()));
    for (std::size_t i = 0; i < p.coeffs().size(); ++i) c[static_cast<Eigen::Index>(i)] = p.coeffs()[i];
    return {{"cutoff", p.cutoff()}, {"coeffs", complex_vector_to_json(c)}};
}

inline json to_json(const RecoveryResult& r) {
    return {{"estimate", to_json(r.estimate)},
            {"dual_poly", to_json(r.dual_poly)},
            {"support_threshold_used", r.support_threshold_used},
            {"degenerate_dual", r.degenerate_dual},
            {"diagnostics",
             {{"objective", r.dual.objective},
              {"gap", r.dual.gap},
              {"psd_violation", r.dual.psd_violation},
              {"trace_violation", r.dual.trace_violation},
              {"iterations", r.dual.iterations}}}};
}

inline json to_json(const CertificateReport& rep, const InterpolationSystem& sys) {
    return {{"kind", rep.kind == CertificateKind::Q ? "q" : "q1"},
            {"f_lo", sys.f_lo},
            {"kappa", sys.kappa},
            {"support", [&] {
                 json arr = json::array();
                 for (const TorusPoint& t : sys.support) arr.push_back(t.value);
                 return arr;
             }()},
            {"alpha", complex_vector_to_json(rep.alpha)},
            {"beta", complex_vector_to_json(rep.beta)},
            {"interp_residual", rep.interp_residual},
            {"grid_max_offsupport", rep.grid_max_offsupport},
            {"near_bound_margin", rep.near_bound_margin},
            {"coeff_bounds",
             {{"alpha_inf", rep.coeff_bounds.first}, {"beta_inf", rep.coeff_bounds.second}}},
            {"system",
             {{"d0_condition", sys.d0_condition},
              {"schur_condition", sys.schur_condition},
              {"separation_ok", sys.separation_ok}}}};
}

}  // namespace superres

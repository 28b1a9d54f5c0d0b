#include "cbo/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbo {

std::string to_string(WeightFlowKind kind) {
    switch (kind) {
        case WeightFlowKind::DiracAtOne: return "dirac_at_one";
        case WeightFlowKind::Lebesgue: return "lebesgue";
        case WeightFlowKind::SampledDelay: return "sampled_delay";
    }
    return "unknown";
}

WeightFlowKind weight_flow_kind_from_string(const std::string& s) {
    if (s == "dirac_at_one") return WeightFlowKind::DiracAtOne;
    if (s == "lebesgue") return WeightFlowKind::Lebesgue;
    if (s == "sampled_delay") return WeightFlowKind::SampledDelay;
    throw std::invalid_argument("unknown weight flow kind: " + s);
}

double AtomList::mass_sum() const {
    double s = 0.0;
    for (double m : masses) s += m;
    return s;
}

AtomList atoms_at(const WeightFlow& flow, double t, int lebesgue_resolution) {
    if (!(t > 0.0)) throw std::invalid_argument("atoms_at: t must be positive");

    AtomList out;
    switch (flow.kind) {
        case WeightFlowKind::DiracAtOne:
            out.locations = {1.0};
            out.masses = {1.0};
            break;
        case WeightFlowKind::Lebesgue: {
            const int n = lebesgue_resolution;
            if (n < 1) throw std::invalid_argument("atoms_at: resolution must be >= 1");
            out.locations.resize(n);
            out.masses.assign(n, 1.0 / n);
            for (int k = 0; k < n; ++k) out.locations[k] = (k + 0.5) / n;
            break;
        }
        case WeightFlowKind::SampledDelay: {
            if (!(flow.tau > 0.0)) throw std::invalid_argument("atoms_at: tau must be positive");
            if (flow.theta < 0.0) throw std::invalid_argument("atoms_at: theta must be >= 0");
            const long n_t = static_cast<long>(std::ceil(t / flow.tau));
            if (n_t < 1) throw std::invalid_argument("atoms_at: empty sample grid");
            const double w = 1.0 / static_cast<double>(n_t);
            // Clamped locations coincide exactly at 0, so merging by equality
            // is reliable; positive locations are strictly increasing.
            for (long k = 0; k < n_t; ++k) {
                const double s = std::max((k * flow.tau - flow.theta) / t, 0.0);
                if (!out.locations.empty() && out.locations.back() == s)
                    out.masses.back() += w;
                else {
                    out.locations.push_back(s);
                    out.masses.push_back(w);
                }
            }
            break;
        }
    }
    return out;
}

AtomList atoms_at(const WeightFlow& flow, double t) {
    return atoms_at(flow, t, flow.lebesgue_resolution > 0 ? flow.lebesgue_resolution : 10000);
}

ClassReport class_diagnostic(const WeightFlow& flow, double eps, double frak_a, double frak_b,
                             const std::vector<double>& t_grid, int lebesgue_resolution) {
    if (!(eps > 0.0) || eps > 1.0)
        throw std::invalid_argument("class_diagnostic: eps must lie in (0, 1]");
    if (t_grid.empty()) throw std::invalid_argument("class_diagnostic: empty time grid");

    ClassReport rep;
    rep.eps = eps;
    rep.t_grid = t_grid;
    rep.threshold = frak_b > 0.0 ? frak_a / frak_b : std::numeric_limits<double>::infinity();

    for (double t : t_grid) {
        const double cap = std::pow(t, eps);
        double i1 = 0.0, i2 = 0.0, i3 = 0.0;
        if (flow.kind == WeightFlowKind::Lebesgue) {
            // Midpoint grid: every location is (k+1/2)/n and the pair gap g/n
            // occurs 2(n-g) times (n times for g=0), so the double integral
            // collapses to one pass instead of n^2 kernel evaluations.
            const long n = lebesgue_resolution;
            if (n < 1) throw std::invalid_argument("class_diagnostic: resolution must be >= 1");
            const double w = 1.0 / static_cast<double>(n);
            double pair_sum = static_cast<double>(n) * cap;
            for (long k = 0; k < n; ++k) {
                const double sing = std::pow((k + 0.5) * w, -eps);
                i1 += w * sing;
                i2 += w * std::min(cap, sing);
                if (k > 0)
                    pair_sum += 2.0 * static_cast<double>(n - k) *
                                std::min(cap, std::pow(k * w, -eps));
            }
            i3 = pair_sum * w * w;
        } else {
            const AtomList atoms = atoms_at(flow, t, lebesgue_resolution);
            const std::size_t n = atoms.size();
            for (std::size_t j = 0; j < n; ++j) {
                const double s = atoms.locations[j];
                const double m = atoms.masses[j];
                const double sing =
                    s > 0.0 ? std::pow(s, -eps) : std::numeric_limits<double>::infinity();
                i1 += m * (s > 0.0 ? sing : cap);  // singular point capped at t^eps
                i2 += m * std::min(cap, sing);
                for (std::size_t k = 0; k < n; ++k) {
                    const double gap = std::abs(s - atoms.locations[k]);
                    const double kern = gap > 0.0 ? std::min(cap, std::pow(gap, -eps)) : cap;
                    i3 += m * atoms.masses[k] * kern;
                }
            }
        }
        rep.i1.push_back(i1);
        rep.i2.push_back(i2);
        rep.i3.push_back(i3);
    }

    // Plausibility heuristics: the tail of i1 must sit below frak_a/frak_b,
    // and the truncated integrals must have stopped growing (tail max within
    // twice the overall median).
    const std::size_t n = t_grid.size();
    const std::size_t tail_start = n - std::max<std::size_t>(1, n / 4);
    auto tail_max = [&](const std::vector<double>& v) {
        double m = 0.0;
        for (std::size_t i = tail_start; i < n; ++i) m = std::max(m, v[i]);
        return m;
    };
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t k = v.size() / 2;
        return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
    };
    rep.pi1_plausible = tail_max(rep.i1) < rep.threshold;
    rep.pi2_plausible =
        tail_max(rep.i2) <= 2.0 * median(rep.i2) && tail_max(rep.i3) <= 2.0 * median(rep.i3);
    return rep;
}

}  // namespace cbo

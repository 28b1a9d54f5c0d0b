#include "cbo/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbo {

void WeightedEmpiricalMeasure::validate() const {
    if (points.empty()) throw std::invalid_argument("measure: no atoms");
    if (points.size() != masses.size())
        throw std::invalid_argument("measure: points/masses size mismatch");
    const std::size_t d = points.front().size();
    if (d == 0) throw std::invalid_argument("measure: zero-dimensional atom");
    double sum = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != d) throw std::invalid_argument("measure: ragged atom dimensions");
        if (!all_finite(points[i])) throw std::invalid_argument("measure: non-finite atom");
        if (!(masses[i] >= 0.0)) throw std::invalid_argument("measure: negative mass");
        sum += masses[i];
    }
    // summing n masses legitimately accumulates O(n) ulps of rounding
    const double tol = 1e-12 + 1e-15 * static_cast<double>(masses.size());
    if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("measure: masses must sum to 1");
}

double WeightedEmpiricalMeasure::second_moment() const {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += masses[i] * norm_sq(points[i]);
    return s;
}

State WeightedEmpiricalMeasure::mean() const {
    State m(dim(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int c = 0; c < dim(); ++c) m[c] += masses[i] * points[i][c];
    return m;
}

WeightedEmpiricalMeasure equal_mass_measure(std::vector<State> points) {
    WeightedEmpiricalMeasure mu;
    const double w = 1.0 / static_cast<double>(points.size());
    mu.masses.assign(points.size(), w);
    mu.points = std::move(points);
    return mu;
}

State consensus_point(const WeightedEmpiricalMeasure& mu, std::span<const double> f_values,
                      double alpha) {
    mu.validate();
    if (f_values.size() != mu.size())
        throw std::invalid_argument("consensus_point: f_values size mismatch");
    if (!(alpha > 0.0) || std::isinf(alpha))
        throw std::invalid_argument("consensus_point: alpha must be positive and finite");

    // Dominant positive-mass atom; zero-mass atoms cannot dominate or the
    // denominator could underflow to 0.
    std::size_t j_star = mu.size();
    double m_exp = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu.masses[i] <= 0.0) continue;
        if (!std::isfinite(f_values[i]))
            throw std::invalid_argument("consensus_point: non-finite objective value");
        const double e = -alpha * f_values[i];
        if (e > m_exp) {
            m_exp = e;
            j_star = i;
        }
    }
    if (j_star == mu.size()) throw std::invalid_argument("consensus_point: all masses are zero");

    const State& anchor = mu.points[j_star];
    const int d = mu.dim();
    State num(d, 0.0);
    double den = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const double w = mu.masses[i];
        if (w <= 0.0) continue;
        const double s = std::exp(-alpha * f_values[i] - m_exp);
        den += w * s;
        for (int c = 0; c < d; ++c) num[c] += w * s * (mu.points[i][c] - anchor[c]);
    }
    State out = anchor;
    for (int c = 0; c < d; ++c) out[c] += num[c] / den;
    return out;
}

ConsensusAccumulator::ConsensusAccumulator(double alpha, int dim) : alpha_(alpha), dim_(dim) {
    if (!(alpha > 0.0) || std::isinf(alpha))
        throw std::invalid_argument("accumulator: alpha must be positive and finite");
    if (dim < 1) throw std::invalid_argument("accumulator: dim must be >= 1");
    scaled_num_.assign(dim, 0.0);
}

void ConsensusAccumulator::insert(const State& x, double f_x, double weight) {
    check_dim(x, dim_, "accumulator insert");
    if (!all_finite(x) || !std::isfinite(f_x))
        throw std::invalid_argument("accumulator: non-finite insertion");
    if (weight < 0.0) throw std::invalid_argument("accumulator: negative weight");
    total_weight_ += weight;
    if (weight == 0.0) return;  // contributes nothing; must not re-base either

    const double e = -alpha_ * f_x;
    if (scaled_den_ == 0.0) {
        anchor_ = x;
        max_exponent_ = e;
        scaled_den_ = weight;  // e^{e-M} = 1 exactly
        return;                // x - anchor = 0
    }
    if (e > max_exponent_) {
        const double r = std::exp(max_exponent_ - e);
        for (double& v : scaled_num_) v *= r;
        scaled_den_ *= r;
        max_exponent_ = e;
    }
    const double s = std::exp(e - max_exponent_);
    scaled_den_ += weight * s;
    for (int c = 0; c < dim_; ++c) scaled_num_[c] += weight * s * (x[c] - anchor_[c]);
}

State ConsensusAccumulator::read() const {
    if (scaled_den_ <= 0.0)
        throw std::runtime_error("accumulator: consensus undefined without positive mass");
    State out = anchor_;
    for (int c = 0; c < dim_; ++c) out[c] += scaled_num_[c] / scaled_den_;
    return out;
}

ConsensusAccumulator ConsensusAccumulator::merge(std::span<const ConsensusAccumulator> parts) {
    if (parts.empty()) throw std::invalid_argument("accumulator merge: nothing to merge");
    ConsensusAccumulator out = parts.front();
    for (std::size_t p = 1; p < parts.size(); ++p) {
        const ConsensusAccumulator& a = parts[p];
        if (a.alpha_ != out.alpha_ || a.dim_ != out.dim_)
            throw std::invalid_argument("accumulator merge: mismatched alpha or dim");
        out.total_weight_ += a.total_weight_;
        if (a.scaled_den_ == 0.0) continue;
        if (out.scaled_den_ == 0.0) {
            out.anchor_ = a.anchor_;
            out.max_exponent_ = a.max_exponent_;
            out.scaled_num_ = a.scaled_num_;
            out.scaled_den_ = a.scaled_den_;
            continue;
        }
        if (a.max_exponent_ > out.max_exponent_) {
            const double r = std::exp(out.max_exponent_ - a.max_exponent_);
            for (double& v : out.scaled_num_) v *= r;
            out.scaled_den_ *= r;
            out.max_exponent_ = a.max_exponent_;
        }
        const double s = std::exp(a.max_exponent_ - out.max_exponent_);
        // a's sums are anchored at a.anchor_; shift them onto out's anchor.
        for (int c = 0; c < out.dim_; ++c)
            out.scaled_num_[c] +=
                s * (a.scaled_num_[c] + a.scaled_den_ * (a.anchor_[c] - out.anchor_[c]));
        out.scaled_den_ += s * a.scaled_den_;
    }
    return out;
}

State consensus_over_flow(std::span<const FlowSnapshot> snapshots, const AtomList& atoms,
                          double alpha) {
    if (snapshots.empty())
        throw std::invalid_argument("consensus_over_flow: no snapshots available");
    if (atoms.size() == 0) throw std::invalid_argument("consensus_over_flow: empty atom list");

    const int d = static_cast<int>(snapshots.front().y.size());
    ConsensusAccumulator acc(alpha, d);
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const double s = atoms.locations[j];
        // nearest stored fraction, ties to the earlier snapshot
        std::size_t lo = 0, hi = snapshots.size();
        while (lo < hi) {  // first index with snapshot.s >= s
            const std::size_t mid = (lo + hi) / 2;
            if (snapshots[mid].s < s)
                lo = mid + 1;
            else
                hi = mid;
        }
        std::size_t pick;
        if (lo == 0)
            pick = 0;
        else if (lo == snapshots.size())
            pick = snapshots.size() - 1;
        else {
            const double d_hi = snapshots[lo].s - s;
            const double d_lo = s - snapshots[lo - 1].s;
            pick = d_lo <= d_hi ? lo - 1 : lo;  // ties -> earlier
        }
        acc.insert(snapshots[pick].y, snapshots[pick].f, atoms.masses[j]);
    }
    return acc.read();
}

}  // namespace cbo

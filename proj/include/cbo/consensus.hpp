#pragma once

#include <span>
#include <vector>

#include "cbo/state.hpp"
#include "cbo/weights.hpp"

namespace cbo {

/// Finite weighted point cloud: locations in R^d with nonnegative masses
/// summing to 1 (within 1e-12).
struct WeightedEmpiricalMeasure {
    std::vector<State> points;
    std::vector<double> masses;

    std::size_t size() const { return points.size(); }
    int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
    void validate() const;  // throws on shape/mass violations
    double second_moment() const;
    State mean() const;
};

WeightedEmpiricalMeasure equal_mass_measure(std::vector<State> points);

/// Softmin-weighted mean  sum_i w_i x_i e^{-alpha f_i} / sum_i w_i e^{-alpha f_i}.
///
/// Evaluated in shifted form around the dominant atom a (the positive-mass
/// atom with the largest exponent):  a + sum w_i e^{-alpha f_i - M}(x_i - a) / den.
/// The shift keeps the evaluation finite for alpha up to 1e6 with |f| up to
/// 1e3, and returns the common point exactly when all atoms coincide.
State consensus_point(const WeightedEmpiricalMeasure& mu, std::span<const double> f_values,
                      double alpha);

/// Streaming version of consensus_point for occupation integrals: insertions
/// carry (state, f value, weight) and the running maximum exponent re-bases
/// the scaled sums whenever a new dominant exponent arrives.
class ConsensusAccumulator {
  public:
    ConsensusAccumulator(double alpha, int dim);

    void insert(const State& x, double f_x, double weight);
    /// Current consensus point; throws if no positive weight was inserted.
    State read() const;

    bool has_mass() const { return scaled_den_ > 0.0; }
    double total_weight() const { return total_weight_; }
    double alpha() const { return alpha_; }
    int dim() const { return dim_; }

    /// Combines per-particle accumulators into the consensus of the pooled
    /// occupation mass (re-bases everything to the common max exponent).
    static ConsensusAccumulator merge(std::span<const ConsensusAccumulator> parts);

  private:
    double alpha_;
    int dim_;
    State anchor_;               // state of the first positive-weight insertion
    double max_exponent_ = 0.0;  // M = max over insertions of -alpha f
    State scaled_num_;           // sum w e^{-alpha f - M} (x - anchor)
    double scaled_den_ = 0.0;    // sum w e^{-alpha f - M}
    double total_weight_ = 0.0;
};

/// Snapshot of a trajectory at time fraction s = t_snapshot / t_now in [0,1].
struct FlowSnapshot {
    double s = 0.0;
    State y;
    double f = 0.0;
};

/// Consensus of the flow-weighted history measure: each atom of `atoms` picks
/// the snapshot with the nearest time fraction (ties resolved to the earlier
/// snapshot) and contributes its mass there. Snapshots must be sorted by s.
State consensus_over_flow(std::span<const FlowSnapshot> snapshots, const AtomList& atoms,
                          double alpha);

}  // namespace cbo

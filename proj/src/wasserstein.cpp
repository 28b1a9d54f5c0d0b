#include "cbo/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "cbo/rng.hpp"

namespace cbo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Atom1d {
    double x;
    double m;
};

double quantile_cost(std::vector<Atom1d> a, std::vector<Atom1d> b) {
    auto by_loc = [](const Atom1d& p, const Atom1d& q) { return p.x < q.x; };
    std::sort(a.begin(), a.end(), by_loc);
    std::sort(b.begin(), b.end(), by_loc);
    double cost = 0.0;
    std::size_t i = 0, j = 0;
    double ra = a.empty() ? 0.0 : a[0].m;
    double rb = b.empty() ? 0.0 : b[0].m;
    while (i < a.size() && j < b.size()) {
        const double step = std::min(ra, rb);
        const double d = a[i].x - b[j].x;
        cost += step * d * d;
        ra -= step;
        rb -= step;
        if (ra <= 0.0 && ++i < a.size()) ra = a[i].m;
        if (rb <= 0.0 && ++j < b.size()) rb = b[j].m;
    }
    return cost;
}

std::vector<Atom1d> project(const WeightedEmpiricalMeasure& mu, const State& dir) {
    std::vector<Atom1d> out;
    out.reserve(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.masses[i] > 0.0) out.push_back({dot(mu.points[i], dir), mu.masses[i]});
    return out;
}

}  // namespace

double w2_quantile_1d(const WeightedEmpiricalMeasure& mu, const WeightedEmpiricalMeasure& nu) {
    mu.validate();
    nu.validate();
    if (mu.dim() != 1 || nu.dim() != 1)
        throw std::invalid_argument("w2_quantile_1d: measures must be one-dimensional");
    std::vector<Atom1d> a, b;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.masses[i] > 0.0) a.push_back({mu.points[i][0], mu.masses[i]});
    for (std::size_t i = 0; i < nu.size(); ++i)
        if (nu.masses[i] > 0.0) b.push_back({nu.points[i][0], nu.masses[i]});
    return std::sqrt(std::max(quantile_cost(std::move(a), std::move(b)), 0.0));
}

/*
 * Transportation problem by successive shortest augmenting paths with node
 * potentials. Sources are mu's atoms, sinks nu's; forward arcs are uncapped
 * (capacity lives in the residual supplies/demands), so each augmentation
 * saturates a source, a sink, or zeroes a used arc. Costs are squared
 * distances, hence nonnegative, and reduced costs stay nonnegative under the
 * standard potential update, so plain Dijkstra applies.
 */
double w2_exact_flow(const WeightedEmpiricalMeasure& mu, const WeightedEmpiricalMeasure& nu) {
    mu.validate();
    nu.validate();
    if (mu.dim() != nu.dim()) throw std::invalid_argument("w2: dimension mismatch");

    std::vector<const State*> xs, ys;
    std::vector<double> supply, demand;
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (mu.masses[i] > 0.0) {
            xs.push_back(&mu.points[i]);
            supply.push_back(mu.masses[i]);
        }
    for (std::size_t j = 0; j < nu.size(); ++j)
        if (nu.masses[j] > 0.0) {
            ys.push_back(&nu.points[j]);
            demand.push_back(nu.masses[j]);
        }
    const std::size_t n = xs.size(), m = ys.size();
    const std::size_t V = n + m;  // sources 0..n-1, sinks n..n+m-1

    std::vector<double> cost(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) cost[i * m + j] = dist_sq(*xs[i], *ys[j]);

    std::vector<double> flow(n * m, 0.0);
    std::vector<double> pot(V, 0.0);
    std::vector<double> dist_v(V);
    std::vector<int> parent(V);  // node we arrived from
    std::vector<char> done(V);

    const double mass_tol = 1e-15;
    double remaining = 1.0;
    long guard = 64 * static_cast<long>(V) + 256;

    while (remaining > 1e-12) {
        if (--guard < 0) throw std::runtime_error("w2_exact_flow: no progress (degenerate input?)");
        std::fill(dist_v.begin(), dist_v.end(), kInf);
        std::fill(done.begin(), done.end(), 0);
        std::fill(parent.begin(), parent.end(), -1);
        for (std::size_t i = 0; i < n; ++i)
            if (supply[i] > mass_tol) dist_v[i] = 0.0;

        std::size_t target = V;
        while (true) {
            std::size_t u = V;
            double best = kInf;
            for (std::size_t v = 0; v < V; ++v)
                if (!done[v] && dist_v[v] < best) {
                    best = dist_v[v];
                    u = v;
                }
            if (u == V) break;
            done[u] = 1;
            if (u >= n && demand[u - n] > mass_tol) {
                target = u;
                break;
            }
            if (u < n) {
                const std::size_t i = u;
                for (std::size_t j = 0; j < m; ++j) {
                    const double rc = std::max(cost[i * m + j] + pot[i] - pot[n + j], 0.0);
                    if (dist_v[i] + rc < dist_v[n + j]) {
                        dist_v[n + j] = dist_v[i] + rc;
                        parent[n + j] = static_cast<int>(i);
                    }
                }
            } else {
                const std::size_t j = u - n;
                for (std::size_t i = 0; i < n; ++i) {
                    if (flow[i * m + j] <= 0.0) continue;
                    const double rc = std::max(-cost[i * m + j] + pot[n + j] - pot[i], 0.0);
                    if (dist_v[u] + rc < dist_v[i]) {
                        dist_v[i] = dist_v[u] + rc;
                        parent[i] = static_cast<int>(u);
                    }
                }
            }
        }
        if (target == V) throw std::runtime_error("w2_exact_flow: infeasible (mass mismatch?)");

        // bottleneck: the target's demand, the root's supply, and every
        // backward arc's current flow along the path
        double delta = demand[target - n];
        for (std::size_t v = target; parent[v] != -1;) {
            const std::size_t p = parent[v];
            if (v < n && p >= n) delta = std::min(delta, flow[v * m + (p - n)]);
            v = p;
            if (parent[v] == -1) delta = std::min(delta, supply[v]);
        }

        for (std::size_t v = target; parent[v] != -1;) {
            const std::size_t p = parent[v];
            if (v >= n && p < n)
                flow[p * m + (v - n)] += delta;
            else if (v < n && p >= n)
                flow[v * m + (p - n)] -= delta;
            v = p;
            if (parent[v] == -1) supply[v] -= delta;
        }
        demand[target - n] -= delta;
        remaining -= delta;

        const double d_t = dist_v[target];
        for (std::size_t v = 0; v < V; ++v) pot[v] += std::min(dist_v[v], d_t);
    }

    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) total += flow[i * m + j] * cost[i * m + j];
    return std::sqrt(std::max(total, 0.0));
}

double w2_exact(const WeightedEmpiricalMeasure& mu, const WeightedEmpiricalMeasure& nu) {
    mu.validate();
    nu.validate();
    if (mu.dim() != nu.dim()) throw std::invalid_argument("w2: dimension mismatch");
    if (mu.dim() == 1) return w2_quantile_1d(mu, nu);
    if (mu.size() + nu.size() > kW2ExactBudget)
        throw BudgetExceeded("w2_exact: combined atom count exceeds the exact-solver budget");
    return w2_exact_flow(mu, nu);
}

double w2_sliced(const WeightedEmpiricalMeasure& mu, const WeightedEmpiricalMeasure& nu,
                 int n_projections, std::uint64_t seed) {
    mu.validate();
    nu.validate();
    if (mu.dim() != nu.dim()) throw std::invalid_argument("w2_sliced: dimension mismatch");
    if (n_projections < 1) throw std::invalid_argument("w2_sliced: need at least one projection");

    const int d = mu.dim();
    Rng rng(seed);
    State dir(d);
    double acc = 0.0;
    for (int p = 0; p < n_projections; ++p) {
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (int c = 0; c < d; ++c) {
                dir[c] = rng.normal();
                n2 += dir[c] * dir[c];
            }
        } while (n2 == 0.0);
        const double inv = 1.0 / std::sqrt(n2);
        for (int c = 0; c < d; ++c) dir[c] *= inv;
        acc += quantile_cost(project(mu, dir), project(nu, dir));
    }
    // Isotropic correction: a projection keeps 1/d of a squared displacement
    // in expectation, so the average is scaled back by d. Exact for d = 1.
    return std::sqrt(std::max(acc * d / n_projections, 0.0));
}

}  // namespace cbo

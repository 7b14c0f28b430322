#include "xlayer/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "xlayer/rng.hpp"

namespace xlayer {

RouteCandidateSet select_candidates(std::span<const TrialSummary> trials, double threshold) {
    if (threshold < 0.0) throw std::invalid_argument("select_candidates: negative threshold");
    const TrialSummary* best = nullptr;
    for (const auto& t : trials)
        if (t.status == JointStatus::local_min && (!best || t.total_power < best->total_power)) best = &t;
    if (!best) throw std::invalid_argument("select_candidates: no converged trial");

    RouteCandidateSet set;
    set.average_power = best->total_power / static_cast<double>(best->powers.size());
    const double limit = (1.0 + threshold) * best->total_power;
    for (const auto& t : trials) {
        if (t.status != JointStatus::local_min || t.total_power > limit) continue;
        set.candidates.push_back({t.trial, t.total_power, t.powers, t.paths});
    }
    return set;
}

namespace {

struct Problem {
    Eigen::MatrixXd q;  // P / (sqrt(N) P_av)
    Eigen::VectorXd b;  // 1 / sqrt(N)
};

Problem normalize(const RouteCandidateSet& set) {
    const auto n = static_cast<Eigen::Index>(set.node_count());
    const auto k = static_cast<Eigen::Index>(set.size());
    if (k == 0) throw std::invalid_argument("mixture: empty candidate set");
    if (!(set.average_power > 0.0)) throw std::invalid_argument("mixture: P_av must be positive");
    const double scale = 1.0 / (std::sqrt(static_cast<double>(n)) * set.average_power);
    Problem pr;
    pr.q.resize(n, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        const auto& p = set.candidates[static_cast<std::size_t>(c)].powers;
        if (static_cast<Eigen::Index>(p.size()) != n) throw std::invalid_argument("mixture: ragged candidates");
        for (Eigen::Index r = 0; r < n; ++r) pr.q(r, c) = p[static_cast<std::size_t>(r)] * scale;
    }
    pr.b = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    return pr;
}

Eigen::VectorXd to_eigen(std::span<const double> w) {
    return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double objective(const Problem& pr, const Eigen::VectorXd& w) { return (pr.q * w - pr.b).squaredNorm(); }

Eigen::VectorXd gradient(const Problem& pr, const Eigen::VectorXd& w) {
    return 2.0 * pr.q.transpose() * (pr.q * w - pr.b);
}

Eigen::VectorXd project(const Eigen::VectorXd& v) {
    const auto out = project_to_simplex(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
    return Eigen::Map<const Eigen::VectorXd>(out.data(), v.size());
}

// Least-squares on the support with sum(w) = 1, via the KKT system. The
// minimum-norm solution splits weight evenly between identical columns.
Eigen::VectorXd solve_on_support(const Problem& pr, const std::vector<Eigen::Index>& support) {
    const auto s = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(s + 1, s + 1);
    Eigen::VectorXd rhs(s + 1);
    for (Eigen::Index a = 0; a < s; ++a) {
        for (Eigen::Index c = 0; c < s; ++c)
            kkt(a, c) = 2.0 * pr.q.col(support[static_cast<std::size_t>(a)]).dot(pr.q.col(support[static_cast<std::size_t>(c)]));
        kkt(a, s) = 1.0;
        kkt(s, a) = 1.0;
        rhs(a) = 2.0 * pr.q.col(support[static_cast<std::size_t>(a)]).dot(pr.b);
    }
    rhs(s) = 1.0;
    const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(pr.q.cols());
    for (Eigen::Index a = 0; a < s; ++a) w(support[static_cast<std::size_t>(a)]) = sol(a);
    return w;
}

}  // namespace

double mixture_objective(const RouteCandidateSet& candidates, std::span<const double> w) {
    const Problem pr = normalize(candidates);
    return objective(pr, to_eigen(w));
}

std::vector<double> mixture_gradient(const RouteCandidateSet& candidates, std::span<const double> w) {
    const Problem pr = normalize(candidates);
    return to_std(gradient(pr, to_eigen(w)));
}

std::vector<double> project_to_simplex(std::span<const double> v) {
    if (v.empty()) return {};
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
        if (sorted[k] - t > 0.0) theta = t;
    }
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
    return out;
}

MixtureWeights optimize_mixture(const RouteCandidateSet& candidates) {
    const Problem pr = normalize(candidates);
    const Eigen::Index k = pr.q.cols();
    if (k == 1) return {{1.0}};

    const Eigen::MatrixXd hessian = 2.0 * pr.q.transpose() * pr.q;
    const double lipschitz = std::max(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hessian).eigenvalues().maxCoeff(),
                                      1e-300);
    const double step = 1.0 / lipschitz;

    // Accelerated projected gradient (FISTA) from the uniform point.
    Eigen::VectorXd w = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
    Eigen::VectorXd y = w;
    double momentum = 1.0;
    constexpr std::size_t kMaxIter = 200000;
    for (std::size_t it = 0; it < kMaxIter; ++it) {
        const Eigen::VectorXd next = project(y - step * gradient(pr, y));
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        y = next + ((momentum - 1.0) / next_momentum) * (next - w);
        w = next;
        momentum = next_momentum;
        const double pg_norm = lipschitz * (w - project(w - step * gradient(pr, w))).norm();
        if (pg_norm <= 1e-9) break;
    }

    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < k; ++i)
        if (w(i) > 1e-10) support.push_back(i);
    if (!support.empty()) {
        const Eigen::VectorXd polished = solve_on_support(pr, support);
        if (polished.minCoeff() >= 0.0 && objective(pr, polished) <= objective(pr, w) + 1e-15) w = polished;
    }
    w /= w.sum();
    return {to_std(w)};
}

PowerVector effective_node_powers(const RouteCandidateSet& candidates, const MixtureWeights& weights) {
    if (weights.w.size() != candidates.size()) throw std::invalid_argument("effective_node_powers: size mismatch");
    PowerVector out(candidates.node_count(), 0.0);
    for (std::size_t c = 0; c < candidates.size(); ++c)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights.w[c] * candidates.candidates[c].powers[i];
    return out;
}

std::vector<std::size_t> sample_schedule(const MixtureWeights& weights, std::size_t epochs, std::uint64_t seed) {
    std::vector<double> cdf(weights.w.size());
    std::partial_sum(weights.w.begin(), weights.w.end(), cdf.begin());
    Rng rng(seed);
    std::vector<std::size_t> out(epochs);
    for (auto& e : out) {
        const double u = rng.uniform() * cdf.back();
        e = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        e = std::min(e, cdf.size() - 1);
    }
    return out;
}

double node_power_variance(std::span<const double> p) {
    if (p.empty()) return 0.0;
    const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
    double acc = 0.0;
    for (double v : p) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(p.size());
}

}  // namespace xlayer

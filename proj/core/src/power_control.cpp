#include "xlayer/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace xlayer {

ActiveLinkSet::ActiveLinkSet(std::size_t n_nodes, std::vector<Link> links)
    : links_(std::move(links)), outgoing_(n_nodes) {
    std::sort(links_.begin(), links_.end());
    links_.erase(std::unique(links_.begin(), links_.end()), links_.end());
    for (const auto& l : links_) {
        if (l.from == l.to) throw std::invalid_argument("ActiveLinkSet: self-loop");
        if (l.from >= n_nodes || l.to >= n_nodes) throw std::out_of_range("ActiveLinkSet: node id out of range");
        outgoing_[l.from].push_back(l.to);
    }
}

bool ActiveLinkSet::contains(Link link) const {
    return std::binary_search(links_.begin(), links_.end(), link);
}

std::string to_string(PcStatus status) {
    switch (status) {
        case PcStatus::converged: return "converged";
        case PcStatus::infeasible: return "infeasible";
        case PcStatus::max_iter: return "max_iter";
    }
    return "unknown";
}

namespace {

constexpr double kResidualFloor = std::numeric_limits<double>::min();

double relative_residual(double current, double target) {
    return std::abs(current - target) / std::max(current, kResidualFloor);
}

// Power that brings one link to the target SIR under the 1/L model.
double link_requirement(Link link, const PowerVector& p, const LinkGainMatrix& gains, const PhyParams& phy) {
    const auto [i, j] = link;
    double interference = 0.0;
    for (NodeId k = 0; k < p.size(); ++k) {
        if (k == i || k == j) continue;
        interference += gains(k, j) * p[k];
    }
    return phy.target_sir / gains(i, j) *
           (interference / static_cast<double>(phy.spreading_gain) + phy.noise_power);
}

void check_shapes(const PowerVector& p0, const ActiveLinkSet& active, const LinkGainMatrix& gains) {
    if (p0.size() != active.node_count() || p0.size() != gains.size())
        throw std::invalid_argument("power control: size mismatch between powers, links and gains");
    for (double v : p0)
        if (!(v >= 0.0)) throw std::invalid_argument("power control: initial powers must be non-negative");
}

struct Step {
    PowerVector target;
    double max_residual = 0.0;
    bool over_cap = false;
};

template <typename TargetFn>
Step evaluate(const PowerVector& p, const ActiveLinkSet& active, double cap, TargetFn&& target_of) {
    Step step;
    step.target.assign(p.size(), 0.0);
    for (NodeId i = 0; i < p.size(); ++i) {
        const double t = active.transmits(i) ? target_of(i) : 0.0;
        step.target[i] = t;
        step.max_residual = std::max(step.max_residual, t == p[i] ? 0.0 : relative_residual(p[i], t));
        if (!(t <= cap)) step.over_cap = true;
    }
    return step;
}

}  // namespace

double interference_target(NodeId i, const PowerVector& p, const ActiveLinkSet& active,
                           const LinkGainMatrix& gains, const PhyParams& phy) {
    const auto out = active.outgoing(i);
    if (out.empty()) throw std::invalid_argument("interference_target: node has no outgoing links");
    double best = 0.0;
    for (NodeId j : out) best = std::max(best, link_requirement({i, j}, p, gains, phy));
    return best;
}

PcResult pc_iterate(const PowerVector& p0, const ActiveLinkSet& active, const LinkGainMatrix& gains,
                    const PhyParams& phy, const PcOptions& options) {
    check_shapes(p0, active, gains);
    PcResult result;
    PowerVector p = p0;
    for (NodeId i = 0; i < p.size(); ++i)
        if (!active.transmits(i)) p[i] = 0.0;
    result.trace.push_back(total_power(p));

    auto target_of = [&](NodeId i) { return interference_target(i, p, active, gains, phy); };

    while (true) {
        const Step step = evaluate(p, active, options.power_cap, target_of);
        if (step.max_residual <= options.tol) {
            result.status = PcStatus::converged;
            break;
        }
        if (result.iterations >= options.max_iter) {
            result.status = PcStatus::max_iter;
            break;
        }
        ++result.iterations;
        if (options.schedule == Schedule::synchronous) {
            p = step.target;
        } else {
            // Gauss-Seidel sweep: each node sees the updates made before it.
            for (NodeId i = 0; i < p.size(); ++i)
                if (active.transmits(i)) p[i] = target_of(i);
        }
        result.trace.push_back(total_power(p));
        if (std::any_of(p.begin(), p.end(), [&](double v) { return !(v <= options.power_cap); })) {
            result.status = PcStatus::infeasible;
            break;
        }
    }
    result.powers = std::move(p);
    return result;
}

PcMudResult pc_mud_iterate(const PowerVector& p0, const ActiveLinkSet& active, const LinkGainMatrix& gains,
                           const SpreadingCodebook& codebook, const PhyParams& phy,
                           const PcOptions& options, FilterMode mode) {
    check_shapes(p0, active, gains);
    if (codebook.size() != p0.size()) throw std::invalid_argument("pc_mud_iterate: codebook size mismatch");

    PcMudResult out;
    PowerVector p = p0;
    for (NodeId i = 0; i < p.size(); ++i)
        if (!active.transmits(i)) p[i] = 0.0;
    out.pc.trace.push_back(total_power(p));

    FilterBank filters;
    auto design = [&] {
        filters.clear();
        for (const Link& l : active.links()) {
            if (mode == FilterMode::lmmse) {
                auto f = lmmse_filter(l, p, gains, codebook, phy.noise_power);
                if (f.ill_conditioned()) ++out.ill_conditioned;
                filters.emplace(l, std::move(f.coeffs));
            } else {
                filters.emplace(l, codebook.sequence(l.from));
            }
        }
    };
    // Power update for fixed filters: P_i = max over links of
    // gamma*/h(i,j) * (sum_k P_k h(k,j) (c^T s_k)^2 + noise c^T c) / (c^T s_i)^2.
    auto target_of = [&](NodeId i) {
        double best = 0.0;
        for (NodeId j : active.outgoing(i)) {
            const Eigen::VectorXd& c = filters.at({i, j});
            const double own = c.dot(codebook.sequence(i));
            double denom = phy.noise_power * c.squaredNorm();
            for (NodeId k = 0; k < p.size(); ++k) {
                if (k == i || k == j || p[k] == 0.0) continue;
                const double x = c.dot(codebook.sequence(k));
                denom += p[k] * gains(k, j) * x * x;
            }
            const double need = own == 0.0 ? std::numeric_limits<double>::infinity()
                                            : phy.target_sir / gains(i, j) * denom / (own * own);
            best = std::max(best, need);
        }
        return best;
    };

    while (true) {
        design();
        const Step step = evaluate(p, active, options.power_cap, target_of);
        if (step.max_residual <= options.tol) {
            out.pc.status = PcStatus::converged;
            break;
        }
        if (out.pc.iterations >= options.max_iter) {
            out.pc.status = PcStatus::max_iter;
            break;
        }
        ++out.pc.iterations;
        p = step.target;
        out.pc.trace.push_back(total_power(p));
        if (step.over_cap) {
            out.pc.status = PcStatus::infeasible;
            break;
        }
    }
    out.pc.powers = std::move(p);
    out.filters = std::move(filters);
    return out;
}

}  // namespace xlayer

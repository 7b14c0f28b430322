#include "xlayer/phy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace xlayer {

namespace {

void check_link(Link link, std::size_t n) {
    if (link.from == link.to) throw std::invalid_argument("self-loop link");
    if (link.from >= n || link.to >= n) throw std::out_of_range("link endpoint out of range");
}

}  // namespace

double sir_matched(Link link, const PowerVector& p, const LinkGainMatrix& gains,
                   std::size_t spreading_gain, double noise_power) {
    check_link(link, p.size());
    const auto [i, j] = link;
    double interference = 0.0;
    for (NodeId k = 0; k < p.size(); ++k) {
        if (k == i || k == j) continue;
        interference += gains(k, j) * p[k];
    }
    return gains(i, j) * p[i] / (interference / static_cast<double>(spreading_gain) + noise_power);
}

Eigen::MatrixXd interference_covariance(Link link, const PowerVector& p, const LinkGainMatrix& gains,
                                        const SpreadingCodebook& codebook, double noise_power) {
    check_link(link, p.size());
    const auto L = static_cast<Eigen::Index>(codebook.spreading_gain());
    Eigen::MatrixXd a = noise_power * Eigen::MatrixXd::Identity(L, L);
    for (NodeId k = 0; k < p.size(); ++k) {
        if (k == link.from || k == link.to || p[k] == 0.0) continue;
        const auto s = codebook.sequence(k);
        a.selfadjointView<Eigen::Lower>().rankUpdate(s, p[k] * gains(k, link.to));
    }
    return a.selfadjointView<Eigen::Lower>();
}

LmmseFilter lmmse_filter(Link link, const PowerVector& p, const LinkGainMatrix& gains,
                         const SpreadingCodebook& codebook, double noise_power) {
    const Eigen::MatrixXd a = interference_covariance(link, p, gains, codebook, noise_power);
    const Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) throw std::runtime_error("lmmse_filter: covariance not positive definite");

    const Eigen::VectorXd s = codebook.sequence(link.from);
    Eigen::VectorXd a_inv_s = llt.solve(s);
    const double pi = p[link.from];
    const double scale = pi > 0.0 ? std::sqrt(pi) / (1.0 + pi * s.dot(a_inv_s)) : 1.0;
    return {scale * a_inv_s, llt.rcond()};
}

double sir_lmmse(Link link, const PowerVector& p, const Eigen::VectorXd& filter,
                 const LinkGainMatrix& gains, const SpreadingCodebook& codebook, double noise_power) {
    check_link(link, p.size());
    const auto [i, j] = link;
    const double own = filter.dot(codebook.sequence(i));
    const double signal = gains(i, j) * p[i] * own * own;
    if (signal == 0.0) return 0.0;
    double denom = noise_power * filter.squaredNorm();
    for (NodeId k = 0; k < p.size(); ++k) {
        if (k == i || k == j || p[k] == 0.0) continue;
        const double x = filter.dot(codebook.sequence(k));
        denom += p[k] * gains(k, j) * x * x;
    }
    return signal / denom;
}

double sir_matched_exact(Link link, const PowerVector& p, const LinkGainMatrix& gains,
                         const SpreadingCodebook& codebook, double noise_power) {
    return sir_lmmse(link, p, codebook.sequence(link.from), gains, codebook, noise_power);
}

double efficiency(double sir, std::size_t packet_bits) {
    if (sir < 0.0) throw std::invalid_argument("efficiency: negative SIR");
    if (std::isinf(sir)) return 1.0;
    // (1 - e^{-x})^M evaluated as exp(M * log(-expm1(-x))) for accuracy at both ends.
    const double per_bit = -std::expm1(-0.5 * sir);
    if (per_bit == 0.0) return 0.0;
    return std::exp(static_cast<double>(packet_bits) * std::log(per_bit));
}

double energy_per_bit_link(Link link, const PowerVector& p, double sir, double bit_rate,
                           std::size_t packet_bits) {
    if (!(bit_rate > 0.0)) throw std::invalid_argument("energy_per_bit_link: bit_rate must be positive");
    const double f = efficiency(sir, packet_bits);
    if (f == 0.0) return std::numeric_limits<double>::infinity();
    return p.at(link.from) / (bit_rate * f);
}

}  // namespace xlayer

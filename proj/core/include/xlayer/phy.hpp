#pragma once

#include <map>

#include <Eigen/Dense>

#include "xlayer/net_model.hpp"
#include "xlayer/types.hpp"

namespace xlayer {

/// Physical-layer constants shared by the SIR formulas.
struct PhyParams {
    std::size_t spreading_gain = 128;
    double noise_power = 1e-13;
    double target_sir = 12.5;

    static PhyParams from(const Scenario& s) { return {s.spreading_gain, s.noise_power, s.target_sir}; }
};

/// Receiver filter per active link, keyed by (transmitter, receiver).
using FilterBank = std::map<Link, Eigen::VectorXd>;

/// Matched-filter SIR with the random-sequence 1/L cross-correlation model.
/// Every node other than the link's endpoints interferes.
double sir_matched(Link link, const PowerVector& p, const LinkGainMatrix& gains,
                   std::size_t spreading_gain, double noise_power);

/// Reciprocal condition estimate below which a filter is reported as
/// ill-conditioned.
inline constexpr double kIllConditionedRcond = 1e-14;

struct LmmseFilter {
    Eigen::VectorXd coeffs;
    double rcond = 1.0;  // reciprocal condition estimate of A
    bool ill_conditioned() const { return rcond < kIllConditionedRcond; }
};

/// Interference-plus-noise covariance at `link.to` seen by `link.from`:
/// sum over k not in {from, to} of P_k h(k,to) s_k s_k^T, plus noise * I.
Eigen::MatrixXd interference_covariance(Link link, const PowerVector& p, const LinkGainMatrix& gains,
                                        const SpreadingCodebook& codebook, double noise_power);

/// LMMSE filter sqrt(P_i) / (1 + P_i s^T A^-1 s) * A^-1 s for the transmitter
/// of `link`, where A is interference_covariance(link). When P_i = 0 the
/// scale factor is dropped and A^-1 s is returned, since only the direction
/// affects the output SIR.
LmmseFilter lmmse_filter(Link link, const PowerVector& p, const LinkGainMatrix& gains,
                         const SpreadingCodebook& codebook, double noise_power);

/// Output SIR of a linear filter using the actual sequence cross-correlations.
double sir_lmmse(Link link, const PowerVector& p, const Eigen::VectorXd& filter,
                 const LinkGainMatrix& gains, const SpreadingCodebook& codebook, double noise_power);

/// sir_lmmse with c = s_i: a matched filter under exact cross-correlations.
double sir_matched_exact(Link link, const PowerVector& p, const LinkGainMatrix& gains,
                         const SpreadingCodebook& codebook, double noise_power);

/// Packet success probability (1 - exp(-sir/2))^M for noncoherent FSK.
double efficiency(double sir, std::size_t packet_bits);

/// Transmit energy per correctly received bit, P_i / (bit_rate * f(sir)).
/// Returns +infinity when f(sir) is zero.
double energy_per_bit_link(Link link, const PowerVector& p, double sir, double bit_rate,
                           std::size_t packet_bits);

}  // namespace xlayer

#pragma once

// Bell-pair purification under a Preskill phase, the <Z1 Z2> sector check,
// Werner-form helpers and the singlet-sector projection.
//
// Bell-diagonal weights are stored in the order (Psi-, Phi+, Phi-, Psi+).
// Qubit order inside a pair is (Alice, Bob).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "qcs/exceptions.hpp"
#include "qcs/format.hpp"
#include "qcs/qstate.hpp"
#include "qcs/rng.hpp"
#include "qcs/spin.hpp"

namespace qcs {

namespace bell {

inline StateVector psi_minus() {
    return StateVector(2, Eigen::Vector4cd(0, 1, -1, 0) / std::sqrt(2.0));
}
inline StateVector psi_plus() {
    return StateVector(2, Eigen::Vector4cd(0, 1, 1, 0) / std::sqrt(2.0));
}
inline StateVector phi_plus() {
    return StateVector(2, Eigen::Vector4cd(1, 0, 0, 1) / std::sqrt(2.0));
}
inline StateVector phi_minus() {
    return StateVector(2, Eigen::Vector4cd(1, 0, 0, -1) / std::sqrt(2.0));
}

/// Same order as BellDiagonalState::weights().
inline std::array<StateVector, 4> basis() {
    return {psi_minus(), phi_plus(), phi_minus(), psi_plus()};
}

}  // namespace bell

struct BellDiagonalState {
    double psi_minus = 1.0;
    double phi_plus = 0.0;
    double phi_minus = 0.0;
    double psi_plus = 0.0;

    static BellDiagonalState from_weights(const std::array<double, 4> &w) {
        BellDiagonalState s{w[0], w[1], w[2], w[3]};
        s.validate();
        return s;
    }

    /// x |Psi-><Psi-| + (1 - x) I / 4 written through its singlet fidelity F.
    static BellDiagonalState werner(double fidelity) {
        if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
            throw InvalidArgument("werner: fidelity must lie in [0, 1]");
        }
        const double rest = (1.0 - fidelity) / 3.0;
        return {fidelity, rest, rest, rest};
    }

    std::array<double, 4> weights() const {
        return {psi_minus, phi_plus, phi_minus, psi_plus};
    }

    double fidelity() const {
        return psi_minus;
    }

    /// <Z1 Z2>: -1 on Psi+-, +1 on Phi+-.
    double zz() const {
        return phi_plus + phi_minus - psi_minus - psi_plus;
    }

    double sum() const {
        return psi_minus + phi_plus + phi_minus + psi_plus;
    }

    void validate(double tol = kTol) const {
        for (double w : weights()) {
            if (!(w >= -tol)) {
                throw InvariantViolation("Bell-diagonal weight is negative");
            }
        }
        if (std::abs(sum() - 1.0) > tol) {
            throw InvariantViolation("Bell-diagonal weights sum to " + format_double(sum()));
        }
    }

    /// exp(i pi Z_1 / 2) on Alice's qubit: Psi- <-> Psi+, Phi+ <-> Phi-.
    BellDiagonalState flipped() const {
        return {psi_plus, phi_minus, phi_plus, psi_minus};
    }

    DensityMatrix to_density_matrix() const {
        const auto b = bell::basis();
        const auto w = weights();
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            m += w[i] * b[i].amps() * b[i].amps().adjoint();
        }
        return DensityMatrix(2, std::move(m));
    }
};

/// exp(i phi Z_1 / 2)|Psi-> as a density matrix.
inline DensityMatrix preskill_input(double phi) {
    if (!(phi >= -std::numbers::pi - 1e-12 && phi <= std::numbers::pi + 1e-12)) {
        throw InvalidArgument("preskill_input: phi must lie in [-pi, pi]");
    }
    return DensityMatrix::from_pure(apply_single_qubit(bell::psi_minus(), 1, gates::z_rotation(phi)));
}

/// Bell-basis diagonal of a two-qubit state; singlet fidelity is unchanged.
inline BellDiagonalState bell_twirl(const DensityMatrix &rho) {
    if (rho.n_qubits() != 2) {
        throw InvalidArgument("bell_twirl: expected a two-qubit state");
    }
    rho.validate();
    const auto b = bell::basis();
    std::array<double, 4> w{};
    for (std::size_t i = 0; i < 4; ++i) {
        w[i] = (b[i].amps().adjoint() * rho.elems() * b[i].amps())(0, 0).real();
    }
    return BellDiagonalState::from_weights(w);
}

/// Average over identical rotations U x U: keeps F, spreads the rest evenly.
inline BellDiagonalState werner_twirl(const BellDiagonalState &s) {
    s.validate();
    return BellDiagonalState::werner(s.fidelity());
}

namespace detail {

/// sigma_y on Bob's qubits (2 and 4), CNOT 1->3 and 2->4 as one 16x16 unitary.
inline Eigen::MatrixXcd bilateral_gate() {
    const Eigen::MatrixXcd sy = embed_operator(4, 2, gates::y()) * embed_operator(4, 4, gates::y());
    return cnot_operator(4, 2, 4) * cnot_operator(4, 1, 3) * sy;
}

}  // namespace detail

struct RoundResult {
    BellDiagonalState state;
    double success_prob;
};

/// Two identical copies, bilateral CNOT, keep the source when the target
/// pair reads equal Z parity. No twirl; Bell-diagonal in, Bell-diagonal out.
inline RoundResult bilateral_cnot_step(const BellDiagonalState &in) {
    in.validate();
    const Eigen::MatrixXcd pair = in.to_density_matrix().elems();
    Eigen::MatrixXcd rho(16, 16);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            rho.block(4 * i, 4 * j, 4, 4) = pair(i, j) * pair;
        }
    }
    static const Eigen::MatrixXcd u = detail::bilateral_gate();
    rho = u * rho * u.adjoint();

    // Keep target outcomes 00 and 11 (bits of qubits 3, 4), trace them out.
    Eigen::MatrixXcd kept = Eigen::MatrixXcd::Zero(4, 4);
    for (std::size_t t : {std::size_t{0}, std::size_t{3}}) {
        for (std::size_t a = 0; a < 4; ++a) {
            for (std::size_t b = 0; b < 4; ++b) {
                kept(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) +=
                    rho(static_cast<Eigen::Index>(4 * a + t), static_cast<Eigen::Index>(4 * b + t));
            }
        }
    }
    const double prob = kept.trace().real();
    if (!(prob > 1e-15)) {
        throw InvariantViolation("bilateral_cnot_step: zero success probability");
    }
    // Undo sigma_y on Bob.
    const Eigen::MatrixXcd yb = embed_operator(2, 2, gates::y());
    kept = yb * kept * yb.adjoint() / prob;
    DensityMatrix out(2, std::move(kept));
    out.symmetrize();
    return {bell_twirl(out), prob};
}

/// One BBPSSW round: Werner twirl, then the bilateral CNOT step.
inline RoundResult bbpssw_round(const BellDiagonalState &in) {
    return bilateral_cnot_step(werner_twirl(in));
}

struct PurificationRound {
    int round;
    double fidelity;
    double success_prob;
    double zz;
};

struct PurificationTrace {
    double phi;
    bool flipped = false;
    std::vector<PurificationRound> rounds;  // round 0 is the input
    BellDiagonalState final_state;

    double final_fidelity() const {
        return rounds.back().fidelity;
    }
};

inline PurificationTrace purify(const BellDiagonalState &input, int rounds, double phi = 0.0, bool flipped = false) {
    if (rounds < 1) {
        throw InvalidArgument("purify: rounds must be >= 1");
    }
    PurificationTrace tr{phi, flipped, {}, input};
    tr.rounds.push_back({0, input.fidelity(), 1.0, input.zz()});
    BellDiagonalState s = input;
    for (int r = 1; r <= rounds; ++r) {
        const RoundResult res = bbpssw_round(s);
        s = res.state;
        tr.rounds.push_back({r, s.fidelity(), res.success_prob, s.zz()});
    }
    tr.final_state = s;
    return tr;
}

inline PurificationTrace purify_preskill(double phi, int rounds, bool flip = false) {
    BellDiagonalState s = bell_twirl(preskill_input(phi));
    if (flip) {
        s = s.flipped();
    }
    return purify(s, rounds, phi, flip);
}

/// phi_i = lo + i (hi - lo) / (points - 1).
inline std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1) {
        throw InvalidArgument("linear_grid: need at least one point");
    }
    std::vector<double> g;
    for (int i = 0; i < points; ++i) {
        g.push_back(points == 1 ? lo : lo + (hi - lo) * i / (points - 1));
    }
    return g;
}

inline std::vector<PurificationTrace> purify_sweep(const std::vector<double> &phi_grid, int rounds) {
    if (phi_grid.empty()) {
        throw InvalidArgument("purify_sweep: empty grid");
    }
    std::vector<PurificationTrace> out;
    for (double phi : phi_grid) {
        out.push_back(purify_preskill(phi, rounds));
    }
    return out;
}

inline void write_csv(std::ostream &os, const std::vector<PurificationTrace> &traces) {
    os << "phi,round,fidelity,success_prob,zz\n";
    for (const auto &t : traces) {
        for (const auto &r : t.rounds) {
            os << format_double(t.phi) << ',' << r.round << ',' << format_double(r.fidelity) << ','
               << format_double(r.success_prob) << ',' << format_double(r.zz) << '\n';
        }
    }
}

struct ZZEstimate {
    double mean;
    double stderr_;
    int samples;
};

/// Sampled <Z1 Z2>: each shot returns +1 with probability (1 + zz) / 2.
inline ZZEstimate estimate_zz(const BellDiagonalState &s, int samples, Rng &rng) {
    if (samples < 2) {
        throw InvalidArgument("estimate_zz: need at least two samples");
    }
    const double p = std::clamp((1.0 + s.zz()) / 2.0, 0.0, 1.0);
    std::binomial_distribution<int> draw(samples, p);
    const int k = draw(rng.engine());
    const double mean = (2.0 * k - samples) / samples;
    // Add-one smoothing keeps the error bar open when every sample agrees.
    const double ps = (k + 1.0) / (samples + 2.0);
    return {mean, 2.0 * std::sqrt(ps * (1.0 - ps) / samples), samples};
}

enum class SectorDecision { Keep, Flip, Indeterminate };

inline std::string to_string(SectorDecision d) {
    switch (d) {
        case SectorDecision::Keep:
            return "keep";
        case SectorDecision::Flip:
            return "flip";
        case SectorDecision::Indeterminate:
            return "indeterminate";
    }
    return "?";
}

struct SectorCheckOptions {
    double flip_threshold = -0.5;
    double max_stderr = 0.1;
};

inline SectorDecision sector_check(const ZZEstimate &e, const SectorCheckOptions &opt = {}) {
    if (!(e.stderr_ < opt.max_stderr)) {
        return SectorDecision::Indeterminate;
    }
    return e.mean > opt.flip_threshold ? SectorDecision::Flip : SectorDecision::Keep;
}

struct SectorCheckedPurification {
    PurificationTrace first;
    ZZEstimate estimate;
    SectorDecision decision;
    PurificationTrace final;  // equals `first` unless flipped
};

/// Purify, sample <Z1 Z2>, and on a flip decision rotate fresh pairs by
/// exp(i pi Z_1 / 2) and purify again. Sample count doubles while the
/// estimate is indeterminate, up to max_samples.
inline SectorCheckedPurification purify_with_sector_check(double phi, int rounds, int samples, Rng &rng,
                                                          const SectorCheckOptions &opt = {},
                                                          int max_samples = 1 << 20) {
    SectorCheckedPurification out{purify_preskill(phi, rounds), {}, SectorDecision::Indeterminate, {}};
    int m = samples;
    for (;;) {
        out.estimate = estimate_zz(out.first.final_state, m, rng);
        out.decision = sector_check(out.estimate, opt);
        if (out.decision != SectorDecision::Indeterminate || m >= max_samples) {
            break;
        }
        m = std::min(2 * m, max_samples);
    }
    out.final = out.decision == SectorDecision::Flip ? purify_preskill(phi, rounds, true) : out.first;
    return out;
}

/// x |Psi-><Psi-| + (1 - x) I / 4.
inline DensityMatrix werner_state(double x) {
    if (!(x >= -1.0 / 3.0 - kTol && x <= 1.0 + kTol)) {
        throw InvalidArgument("werner_state: x must lie in [-1/3, 1]");
    }
    const StateVector s = bell::psi_minus();
    Eigen::MatrixXcd m = x * s.amps() * s.amps().adjoint() + (1.0 - x) / 4.0 * Eigen::MatrixXcd::Identity(4, 4);
    return DensityMatrix(2, std::move(m));
}

struct WernerFit {
    double x;
    double residual;  // max |rho - werner_state(x)| over entries
};

/// Best Werner parameter from the singlet fidelity: x = (4F - 1) / 3.
inline WernerFit werner_fit(const DensityMatrix &rho) {
    if (rho.n_qubits() != 2) {
        throw InvalidArgument("werner_fit: expected a two-qubit state");
    }
    const StateVector s = bell::psi_minus();
    const double f = (s.amps().adjoint() * rho.elems() * s.amps())(0, 0).real();
    const double x = (4.0 * f - 1.0) / 3.0;
    const Eigen::MatrixXcd w = x * s.amps() * s.amps().adjoint() + (1.0 - x) / 4.0 * Eigen::MatrixXcd::Identity(4, 4);
    return {x, (rho.elems() - w).cwiseAbs().maxCoeff()};
}

inline Eigen::MatrixXcd singlet_projector(const SingletBasis &basis) {
    if (basis.vectors.empty()) {
        throw InvalidArgument("singlet_projector: empty basis");
    }
    const auto d = static_cast<Eigen::Index>(basis.vectors.front().dim());
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(d, d);
    for (const auto &v : basis.vectors) {
        p += v.amps() * v.amps().adjoint();
    }
    return p;
}

/// Weight of rho inside the singlet sector.
inline double singlet_weight(const DensityMatrix &rho, const SingletBasis &basis) {
    double w = 0.0;
    for (const auto &v : basis.vectors) {
        w += (v.amps().adjoint() * rho.elems() * v.amps())(0, 0).real();
    }
    return w;
}

/// Pi rho Pi / tr(Pi rho Pi) with Pi the singlet-sector projector.
inline DensityMatrix singlet_project(const DensityMatrix &rho, const SingletBasis &basis) {
    if (rho.n_qubits() != basis.n_qubits) {
        throw InvalidArgument("singlet_project: state and basis sizes differ");
    }
    const Eigen::MatrixXcd p = singlet_projector(basis);
    Eigen::MatrixXcd out = p * rho.elems() * p;
    const double w = out.trace().real();
    if (!(w > 1e-12)) {
        throw InvariantViolation("singlet_project: state has no weight in the singlet sector");
    }
    DensityMatrix r(rho.n_qubits(), out / w);
    r.symmetrize();
    return r;
}

}  // namespace qcs

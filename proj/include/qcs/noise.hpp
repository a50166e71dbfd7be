#pragma once

// Independent phase-flip noise, the worst-case systematic Z rotation, and
// fidelity against a pure target.

#include <Eigen/Dense>

#include <cmath>
#include <ostream>
#include <vector>

#include "qcs/exceptions.hpp"
#include "qcs/format.hpp"
#include "qcs/protocol.hpp"
#include "qcs/qstate.hpp"
#include "qcs/spin.hpp"

namespace qcs {

struct DephasingParams {
    double p = 0.0;

    void validate() const {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidArgument("dephasing probability must lie in [0, 1]");
        }
    }
};

/// Every qubit independently: rho -> (1 - p) rho + p Z rho Z.
/// Entry (i, j) picks up (1 - 2p) for each qubit where i and j differ.
inline DensityMatrix dephase(const DensityMatrix &rho, double p) {
    DephasingParams{p}.validate();
    const double f = 1.0 - 2.0 * p;
    std::vector<double> pw(static_cast<std::size_t>(rho.n_qubits()) + 1, 1.0);
    for (std::size_t k = 1; k < pw.size(); ++k) {
        pw[k] = pw[k - 1] * f;
    }
    Eigen::MatrixXcd m = rho.elems();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) *= pw[static_cast<std::size_t>(popcount(static_cast<std::size_t>(i ^ j)))];
        }
    }
    DensityMatrix out(rho.n_qubits(), std::move(m));
    out.symmetrize();
    return out;
}

inline double correlator(const DensityMatrix &rho, int qa, Pauli a, int qb, Pauli b) {
    return expectation(rho, PauliString::pair(rho.n_qubits(), qa, a, qb, b));
}

/// A_n = Tr(rho X_1 X_n) on the dephased supersinglet.
inline AmplitudeTable dephased_amplitudes(int n, double p) {
    check_even_qubits(n, 4);
    const DensityMatrix rho = dephase(DensityMatrix::from_pure(supersinglet(n)), p);
    std::vector<double> v;
    for (int party = 2; party <= n; ++party) {
        v.push_back(correlator(rho, 1, Pauli::X, party, Pauli::X));
    }
    return make_table(n, v);
}

inline void write_dephase_csv_header(std::ostream &os) {
    os << "N,p,party,group,amplitude\n";
}

inline void write_dephase_csv_rows(std::ostream &os, double p, const AmplitudeTable &t) {
    for (const auto &e : t.entries) {
        os << t.n_qubits << ',' << format_double(p) << ',' << e.party << ',' << to_string(e.group) << ','
           << format_double(e.amplitude) << '\n';
    }
}

/// exp(-i eps Z_1)|S>.
inline StateVector preskill_worst_case(const StateVector &singlet, double epsilon) {
    require_singlet(singlet, "preskill_worst_case");
    return apply_single_qubit(singlet, 1, gates::z_rotation(-2.0 * epsilon));
}

/// |<target|a>|^2.
inline double fidelity(const StateVector &a, const StateVector &target) {
    return std::norm(inner(target, a));
}

/// <target|rho|target>.
inline double fidelity(const DensityMatrix &rho, const StateVector &target) {
    if (rho.n_qubits() != target.n_qubits()) {
        throw InvalidArgument("fidelity: dimension mismatch");
    }
    return (target.amps().adjoint() * rho.elems() * target.amps())(0, 0).real();
}

}  // namespace qcs

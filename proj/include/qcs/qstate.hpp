#pragma once

// Dense state-vector and density-matrix kernel for up to 12 qubits.
//
// Bit order: qubit 1 (Alice) is the most significant bit of the basis index,
// so for n qubits qubit q lives at bit position n - q. basis_label() renders
// an index with qubit 1 on the left, e.g. index 3 of 4 qubits is "0011".

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qcs/exceptions.hpp"
#include "qcs/rng.hpp"

namespace qcs {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr int kMaxQubits = 12;
inline constexpr double kTol = 1e-10;
inline constexpr double kEigenTol = 1e-9;
inline constexpr cplx kI{0.0, 1.0};

inline void check_qubit_count(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw InvalidArgument("qubit count " + std::to_string(n) + " outside [1, " +
                              std::to_string(kMaxQubits) + "]");
    }
}

inline void check_qubit(int n, int q) {
    if (q < 1 || q > n) {
        throw InvalidArgument("qubit index " + std::to_string(q) + " outside [1, " + std::to_string(n) + "]");
    }
}

inline std::size_t qubit_mask(int n, int q) {
    return std::size_t{1} << (n - q);
}

inline int qubit_bit(std::size_t index, int n, int q) {
    return static_cast<int>((index >> (n - q)) & 1U);
}

inline std::string basis_label(std::size_t index, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int q = 1; q <= n; ++q) {
        if (qubit_bit(index, n, q)) {
            s[static_cast<std::size_t>(q - 1)] = '1';
        }
    }
    return s;
}

inline std::size_t basis_index(std::string_view bits) {
    std::size_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw InvalidArgument("basis label must contain only 0/1: " + std::string(bits));
        }
        index = (index << 1) | static_cast<std::size_t>(c == '1');
    }
    return index;
}

inline int popcount(std::size_t x) {
    return __builtin_popcountll(static_cast<unsigned long long>(x));
}

class StateVector {
  public:
    explicit StateVector(int n_qubits) : n_(n_qubits) {
        check_qubit_count(n_qubits);
        amps_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_qubits));
        amps_(0) = 1.0;
    }

    StateVector(int n_qubits, Eigen::VectorXcd amps) : n_(n_qubits), amps_(std::move(amps)) {
        check_qubit_count(n_qubits);
        if (static_cast<std::size_t>(amps_.size()) != (std::size_t{1} << n_qubits)) {
            throw InvalidArgument("amplitude count does not match 2^n");
        }
        check_finite();
    }

    static StateVector basis(int n_qubits, std::size_t index) {
        StateVector s(n_qubits);
        if (index >= s.dim()) {
            throw InvalidArgument("basis index out of range");
        }
        s.amps_(0) = 0.0;
        s.amps_(static_cast<Eigen::Index>(index)) = 1.0;
        return s;
    }

    static StateVector from_bits(std::string_view bits) {
        return basis(static_cast<int>(bits.size()), basis_index(bits));
    }

    int n_qubits() const {
        return n_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(amps_.size());
    }
    const Eigen::VectorXcd &amps() const {
        return amps_;
    }
    Eigen::VectorXcd &amps() {
        return amps_;
    }
    cplx operator[](std::size_t i) const {
        return amps_(static_cast<Eigen::Index>(i));
    }
    cplx amp(std::string_view bits) const {
        if (bits.size() != static_cast<std::size_t>(n_)) {
            throw InvalidArgument("basis label length mismatch");
        }
        return amps_(static_cast<Eigen::Index>(basis_index(bits)));
    }

    double norm_squared() const {
        return amps_.squaredNorm();
    }

    StateVector normalized() const {
        const double nrm = amps_.norm();
        if (!(nrm > 0.0)) {
            throw InvalidArgument("cannot normalize a zero vector");
        }
        return StateVector(n_, amps_ / nrm);
    }

    void check_finite() const {
        for (Eigen::Index i = 0; i < amps_.size(); ++i) {
            if (!std::isfinite(amps_(i).real()) || !std::isfinite(amps_(i).imag())) {
                throw InvariantViolation("non-finite amplitude at index " + std::to_string(i));
            }
        }
    }

  private:
    int n_;
    Eigen::VectorXcd amps_;
};

inline cplx inner(const StateVector &a, const StateVector &b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw InvalidArgument("inner product of states with different qubit counts");
    }
    return a.amps().dot(b.amps());
}

inline double overlap_modulus(const StateVector &a, const StateVector &b) {
    return std::abs(inner(a, b));
}

/// True when a and b are the same ray: |<a|b>| = |a||b| within tol.
inline bool equal_up_to_phase(const StateVector &a, const StateVector &b, double tol = kTol) {
    return std::abs(overlap_modulus(a, b) - a.amps().norm() * b.amps().norm()) < tol;
}

inline StateVector tensor(const StateVector &a, const StateVector &b) {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(a.dim() * b.dim()));
    for (std::size_t i = 0; i < a.dim(); ++i) {
        out.segment(static_cast<Eigen::Index>(i * b.dim()), static_cast<Eigen::Index>(b.dim())) = a[i] * b.amps();
    }
    return StateVector(a.n_qubits() + b.n_qubits(), std::move(out));
}

namespace gates {

inline Mat2 identity() {
    return Mat2::Identity();
}
inline Mat2 x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}
inline Mat2 y() {
    Mat2 m;
    m << 0, -kI, kI, 0;
    return m;
}
inline Mat2 z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}
inline Mat2 hadamard() {
    Mat2 m;
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}
/// exp(i * angle * Z / 2) = diag(e^{i angle/2}, e^{-i angle/2}).
inline Mat2 z_rotation(double angle) {
    Mat2 m = Mat2::Zero();
    m(0, 0) = std::exp(kI * (angle / 2));
    m(1, 1) = std::exp(-kI * (angle / 2));
    return m;
}
/// sigma^+ = |0><1| and sigma^- = |1><0| (raising toward the Z = +1 state).
inline Mat2 sigma_plus() {
    Mat2 m = Mat2::Zero();
    m(0, 1) = 1.0;
    return m;
}
inline Mat2 sigma_minus() {
    Mat2 m = Mat2::Zero();
    m(1, 0) = 1.0;
    return m;
}

/// Haar-random 2x2 unitary (QR of a complex Ginibre matrix with phase fix).
inline Mat2 random_unitary(Rng &rng) {
    Mat2 g;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            g(i, j) = cplx(rng.normal(), rng.normal());
        }
    }
    Eigen::HouseholderQR<Mat2> qr(g);
    Mat2 q = qr.householderQ();
    Mat2 r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < 2; ++j) {
        const cplx d = r(j, j);
        q.col(j) *= d / std::abs(d);
    }
    return q;
}

}  // namespace gates

inline bool is_unitary(const Mat2 &u, double tol = kTol) {
    return ((u.adjoint() * u) - Mat2::Identity()).cwiseAbs().maxCoeff() < tol;
}

/// Applies an arbitrary 2x2 operator to one tensor factor; no unitarity check.
inline StateVector apply_local_operator(const StateVector &state, int qubit, const Mat2 &op) {
    const int n = state.n_qubits();
    check_qubit(n, qubit);
    const std::size_t mask = qubit_mask(n, qubit);
    Eigen::VectorXcd out = state.amps();
    for (std::size_t i = 0; i < state.dim(); ++i) {
        if (i & mask) {
            continue;
        }
        const std::size_t j = i | mask;
        const cplx a0 = state[i];
        const cplx a1 = state[j];
        out(static_cast<Eigen::Index>(i)) = op(0, 0) * a0 + op(0, 1) * a1;
        out(static_cast<Eigen::Index>(j)) = op(1, 0) * a0 + op(1, 1) * a1;
    }
    return StateVector(n, std::move(out));
}

inline StateVector apply_single_qubit(const StateVector &state, int qubit, const Mat2 &u) {
    if (!is_unitary(u)) {
        throw InvalidArgument("apply_single_qubit: operator is not unitary within 1e-10");
    }
    return apply_local_operator(state, qubit, u);
}

inline StateVector apply_global_rotation(const StateVector &state, const Mat2 &u) {
    if (!is_unitary(u)) {
        throw InvalidArgument("apply_global_rotation: operator is not unitary within 1e-10");
    }
    StateVector out = state;
    for (int q = 1; q <= state.n_qubits(); ++q) {
        out = apply_local_operator(out, q, u);
    }
    return out;
}

enum class Pauli : char { I = 'I', X = 'X', Y = 'Y', Z = 'Z' };

inline Mat2 pauli_matrix(Pauli p) {
    switch (p) {
        case Pauli::X:
            return gates::x();
        case Pauli::Y:
            return gates::y();
        case Pauli::Z:
            return gates::z();
        default:
            return gates::identity();
    }
}

class PauliString {
  public:
    explicit PauliString(std::string_view letters) {
        if (letters.empty() || letters.size() > static_cast<std::size_t>(kMaxQubits)) {
            throw InvalidArgument("Pauli string length out of range");
        }
        for (char c : letters) {
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
                throw InvalidArgument(std::string("bad Pauli letter '") + c + "'");
            }
            letters_.push_back(static_cast<Pauli>(c));
        }
    }

    static PauliString single(int n, int q, Pauli p) {
        check_qubit_count(n);
        check_qubit(n, q);
        std::string s(static_cast<std::size_t>(n), 'I');
        s[static_cast<std::size_t>(q - 1)] = static_cast<char>(p);
        return PauliString(s);
    }

    static PauliString pair(int n, int q1, Pauli p1, int q2, Pauli p2) {
        check_qubit_count(n);
        check_qubit(n, q1);
        check_qubit(n, q2);
        if (q1 == q2) {
            throw InvalidArgument("Pauli pair on the same qubit");
        }
        std::string s(static_cast<std::size_t>(n), 'I');
        s[static_cast<std::size_t>(q1 - 1)] = static_cast<char>(p1);
        s[static_cast<std::size_t>(q2 - 1)] = static_cast<char>(p2);
        return PauliString(s);
    }

    int n_qubits() const {
        return static_cast<int>(letters_.size());
    }
    Pauli at(int q) const {
        return letters_.at(static_cast<std::size_t>(q - 1));
    }
    std::string str() const {
        std::string s;
        for (Pauli p : letters_) {
            s.push_back(static_cast<char>(p));
        }
        return s;
    }

    /// P|k> = phase(k) |k ^ flip_mask()>.
    std::size_t flip_mask() const {
        std::size_t m = 0;
        const int n = n_qubits();
        for (int q = 1; q <= n; ++q) {
            const Pauli p = at(q);
            if (p == Pauli::X || p == Pauli::Y) {
                m |= qubit_mask(n, q);
            }
        }
        return m;
    }
    cplx phase(std::size_t k) const {
        cplx ph = 1.0;
        const int n = n_qubits();
        for (int q = 1; q <= n; ++q) {
            const int b = qubit_bit(k, n, q);
            switch (at(q)) {
                case Pauli::Y:
                    ph *= b ? -kI : kI;
                    break;
                case Pauli::Z:
                    if (b) {
                        ph = -ph;
                    }
                    break;
                default:
                    break;
            }
        }
        return ph;
    }

  private:
    std::vector<Pauli> letters_;
};

class DensityMatrix {
  public:
    DensityMatrix(int n_qubits, Eigen::MatrixXcd elems) : n_(n_qubits), m_(std::move(elems)) {
        check_qubit_count(n_qubits);
        const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
        if (m_.rows() != d || m_.cols() != d) {
            throw InvalidArgument("density matrix shape does not match 2^n");
        }
        if (!m_.allFinite()) {
            throw InvariantViolation("non-finite density matrix entry");
        }
    }

    static DensityMatrix from_pure(const StateVector &psi) {
        return DensityMatrix(psi.n_qubits(), psi.amps() * psi.amps().adjoint());
    }

    static DensityMatrix maximally_mixed(int n_qubits) {
        check_qubit_count(n_qubits);
        const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
        return DensityMatrix(n_qubits, Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
    }

    int n_qubits() const {
        return n_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(m_.rows());
    }
    const Eigen::MatrixXcd &elems() const {
        return m_;
    }
    Eigen::MatrixXcd &elems() {
        return m_;
    }
    cplx operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    cplx trace() const {
        return m_.trace();
    }

    /// rho <- (rho + rho^dagger) / 2.
    DensityMatrix &symmetrize() {
        Eigen::MatrixXcd h = (m_ + m_.adjoint()) * 0.5;
        m_ = std::move(h);
        return *this;
    }

    double hermiticity_error() const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    }

    double min_eigenvalue() const {
        Eigen::MatrixXcd h = (m_ + m_.adjoint()) * 0.5;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    /// Throws InvariantViolation unless Hermitian, unit trace and positive.
    void validate(double tol = kTol, double eig_tol = kEigenTol) const {
        if (hermiticity_error() > tol) {
            throw InvariantViolation("density matrix not Hermitian");
        }
        if (std::abs(trace() - 1.0) > tol) {
            throw InvariantViolation("density matrix trace differs from 1");
        }
        if (min_eigenvalue() < -eig_tol) {
            throw InvariantViolation("density matrix has a negative eigenvalue");
        }
    }

    bool is_valid(double tol = kTol, double eig_tol = kEigenTol) const {
        try {
            validate(tol, eig_tol);
        } catch (const InvariantViolation &) {
            return false;
        }
        return true;
    }

  private:
    int n_;
    Eigen::MatrixXcd m_;
};

inline double expectation(const StateVector &psi, const PauliString &p) {
    if (p.n_qubits() != psi.n_qubits()) {
        throw InvalidArgument("expectation: Pauli string and state sizes differ");
    }
    const std::size_t f = p.flip_mask();
    cplx acc = 0.0;
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        acc += std::conj(psi[k ^ f]) * p.phase(k) * psi[k];
    }
    return acc.real();
}

inline double expectation(const DensityMatrix &rho, const PauliString &p) {
    if (p.n_qubits() != rho.n_qubits()) {
        throw InvalidArgument("expectation: Pauli string and density matrix sizes differ");
    }
    const std::size_t f = p.flip_mask();
    cplx acc = 0.0;
    for (std::size_t k = 0; k < rho.dim(); ++k) {
        acc += p.phase(k) * rho(k, k ^ f);
    }
    return acc.real();
}

/// <psi| op_a(qa) op_b(qb) |psi> for arbitrary 2x2 operators on distinct qubits.
inline cplx local_correlator(const StateVector &psi, int qa, const Mat2 &op_a, int qb, const Mat2 &op_b) {
    const StateVector phi = apply_local_operator(apply_local_operator(psi, qb, op_b), qa, op_a);
    return inner(psi, phi);
}

namespace detail {

/// Splits the qubits into a sorted kept list and the traced complement.
inline std::pair<std::vector<int>, std::vector<int>> split_qubits(int n, std::vector<int> keep) {
    if (keep.empty()) {
        throw InvalidArgument("partial_trace: keep set is empty");
    }
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int q : keep) {
        check_qubit(n, q);
    }
    std::vector<int> traced;
    for (int q = 1; q <= n; ++q) {
        if (!std::binary_search(keep.begin(), keep.end(), q)) {
            traced.push_back(q);
        }
    }
    return {keep, traced};
}

/// Full-register index for sub-register patterns (qubit order as listed, first is MSB).
inline std::vector<std::size_t> scatter_table(int n, const std::vector<int> &qubits) {
    const std::size_t count = std::size_t{1} << qubits.size();
    const int m = static_cast<int>(qubits.size());
    std::vector<std::size_t> table(count, 0);
    for (std::size_t pat = 0; pat < count; ++pat) {
        std::size_t idx = 0;
        for (int j = 0; j < m; ++j) {
            if ((pat >> (m - 1 - j)) & 1U) {
                idx |= qubit_mask(n, qubits[static_cast<std::size_t>(j)]);
            }
        }
        table[pat] = idx;
    }
    return table;
}

}  // namespace detail

/// Reduced density matrix on `keep` (sorted ascending; kept qubits renumbered 1..|keep|).
inline DensityMatrix partial_trace(const DensityMatrix &rho, std::vector<int> keep) {
    const int n = rho.n_qubits();
    auto [kept, traced] = detail::split_qubits(n, std::move(keep));
    const auto kt = detail::scatter_table(n, kept);
    const auto tt = detail::scatter_table(n, traced);
    const auto dk = static_cast<Eigen::Index>(kt.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    for (Eigen::Index a = 0; a < dk; ++a) {
        for (Eigen::Index b = 0; b < dk; ++b) {
            cplx acc = 0.0;
            for (std::size_t r : tt) {
                acc += rho(kt[static_cast<std::size_t>(a)] | r, kt[static_cast<std::size_t>(b)] | r);
            }
            out(a, b) = acc;
        }
    }
    return DensityMatrix(static_cast<int>(kept.size()), std::move(out));
}

inline DensityMatrix partial_trace(const StateVector &psi, std::vector<int> keep) {
    const int n = psi.n_qubits();
    auto [kept, traced] = detail::split_qubits(n, std::move(keep));
    const auto kt = detail::scatter_table(n, kept);
    const auto tt = detail::scatter_table(n, traced);
    const auto dk = static_cast<Eigen::Index>(kt.size());
    const auto dt = static_cast<Eigen::Index>(tt.size());
    Eigen::MatrixXcd block(dk, dt);
    for (Eigen::Index a = 0; a < dk; ++a) {
        for (Eigen::Index r = 0; r < dt; ++r) {
            block(a, r) = psi[kt[static_cast<std::size_t>(a)] | tt[static_cast<std::size_t>(r)]];
        }
    }
    return DensityMatrix(static_cast<int>(kept.size()), block * block.adjoint());
}

struct Projection {
    StateVector post;  // unnormalized
    double prob;
};

inline Projection project(const StateVector &psi, int qubit, const Vec2 &outcome) {
    if (std::abs(outcome.squaredNorm() - 1.0) > kTol) {
        throw InvalidArgument("project: outcome vector is not normalized");
    }
    const Mat2 proj = outcome * outcome.adjoint();
    StateVector post = apply_local_operator(psi, qubit, proj);
    const double prob = post.norm_squared();
    return {std::move(post), prob};
}

/// Projects and renormalizes; throws when the branch has zero probability.
inline StateVector project_normalized(const StateVector &psi, int qubit, const Vec2 &outcome) {
    Projection p = project(psi, qubit, outcome);
    if (!(p.prob > 1e-300)) {
        throw InvalidArgument("project: zero-probability branch cannot be renormalized");
    }
    return StateVector(psi.n_qubits(), p.post.amps() / std::sqrt(p.prob));
}

/// Orthonormal measurement frame; outcome +1 corresponds to `plus`.
struct Basis {
    Vec2 plus;
    Vec2 minus;

    static Basis z() {
        return {Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
    }
    static Basis x() {
        const double r = 1.0 / std::sqrt(2.0);
        return {Vec2(r, r), Vec2(r, -r)};
    }
    static Basis y() {
        const double r = 1.0 / std::sqrt(2.0);
        return {Vec2(r, kI * r), Vec2(r, -kI * r)};
    }

    void validate() const {
        if (std::abs(plus.squaredNorm() - 1.0) > kTol || std::abs(minus.squaredNorm() - 1.0) > kTol ||
            std::abs(plus.dot(minus)) > kTol) {
            throw InvalidArgument("measurement basis is not orthonormal");
        }
    }
};

struct Measurement {
    int outcome;  // +1 or -1
    StateVector post;
    double prob;
};

inline Measurement measure(const StateVector &psi, int qubit, const Basis &basis, Rng &rng) {
    basis.validate();
    Projection plus = project(psi, qubit, basis.plus);
    const double total = psi.norm_squared();
    const double p_plus = plus.prob / total;
    if (rng.uniform() < p_plus) {
        return {+1, StateVector(psi.n_qubits(), plus.post.amps() / std::sqrt(plus.prob)), p_plus};
    }
    Projection minus = project(psi, qubit, basis.minus);
    return {-1, StateVector(psi.n_qubits(), minus.post.amps() / std::sqrt(minus.prob)), minus.prob / total};
}

/// exp(-i H t) with H = omega * S^z: amplitude k picks up exp(-i omega t (n0 - n1) / 2).
inline StateVector evolve(const StateVector &psi, double t, double omega) {
    const int n = psi.n_qubits();
    Eigen::VectorXcd out = psi.amps();
    const double theta = omega * t;
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        const int n1 = popcount(k);
        const int n0 = n - n1;
        out(static_cast<Eigen::Index>(k)) *= std::exp(-kI * (theta * (n0 - n1) / 2.0));
    }
    return StateVector(n, std::move(out));
}

/// Full 2^n x 2^n matrix of a single-qubit operator on qubit q.
inline Eigen::MatrixXcd embed_operator(int n, int q, const Mat2 &op) {
    check_qubit(n, q);
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    const std::size_t mask = qubit_mask(n, q);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
        const int bi = qubit_bit(i, n, q);
        for (int bj = 0; bj < 2; ++bj) {
            const std::size_t j = bj ? (i | mask) : (i & ~mask);
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = op(bi, bj);
        }
    }
    return m;
}

inline Eigen::MatrixXcd cnot_operator(int n, int control, int target) {
    check_qubit(n, control);
    check_qubit(n, target);
    if (control == target) {
        throw InvalidArgument("CNOT control equals target");
    }
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
        const std::size_t j = qubit_bit(i, n, control) ? (i ^ qubit_mask(n, target)) : i;
        m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = 1.0;
    }
    return m;
}

/// Serializes as {"n_qubits": n, "amps": [[re, im], ...]} in basis-index order.
inline nlohmann::json to_json(const StateVector &psi) {
    nlohmann::json amps = nlohmann::json::array();
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        amps.push_back({psi[k].real(), psi[k].imag()});
    }
    return {{"n_qubits", psi.n_qubits()}, {"amps", std::move(amps)}};
}

inline StateVector state_from_json(const nlohmann::json &j) {
    const int n = j.at("n_qubits").get<int>();
    check_qubit_count(n);
    const auto &arr = j.at("amps");
    if (!arr.is_array() || arr.size() != (std::size_t{1} << n)) {
        throw InvalidArgument("state JSON: amps must hold 2^n_qubits entries");
    }
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const auto &e = arr[k];
        if (!e.is_array() || e.size() != 2) {
            throw InvalidArgument("state JSON: each amplitude must be [re, im]");
        }
        amps(static_cast<Eigen::Index>(k)) = cplx(e[0].get<double>(), e[1].get<double>());
    }
    return StateVector(n, std::move(amps));
}

}  // namespace qcs

#pragma once

// Collective spin machinery: S^x, S^y, S^z, S^2 for n spin-1/2 qubits,
// Dicke states, the supersinglet and its alternative forms, numeric
// singlet-subspace bases, and homogeneous singlets.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qcs/exceptions.hpp"
#include "qcs/qstate.hpp"
#include "qcs/rng.hpp"

namespace qcs {

enum class Axis { X, Y, Z };

inline char axis_name(Axis a) {
    return a == Axis::X ? 'x' : (a == Axis::Y ? 'y' : 'z');
}

inline Axis parse_axis(const std::string &s) {
    if (s == "x") {
        return Axis::X;
    }
    if (s == "y") {
        return Axis::Y;
    }
    if (s == "z") {
        return Axis::Z;
    }
    throw InvalidArgument("axis must be x, y or z, got '" + s + "'");
}

/// Exact binomial coefficient; throws on 64-bit overflow.
inline std::uint64_t binomial(int n, int k) {
    if (n < 0 || k < 0 || k > n) {
        throw InvalidArgument("binomial(" + std::to_string(n) + ", " + std::to_string(k) + ") undefined");
    }
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (int i = 1; i <= k; ++i) {
        acc = acc * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (acc > std::numeric_limits<std::uint64_t>::max()) {
            throw InvalidArgument("binomial overflow");
        }
    }
    return static_cast<std::uint64_t>(acc);
}

inline double log_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

/// C_h = binomial(2h, h) / (h + 1), the number of independent singlets on 2h qubits.
inline std::uint64_t catalan(int half_n) {
    if (half_n < 0) {
        throw InvalidArgument("catalan: negative argument");
    }
    // C_{k+1} = C_k * 2(2k+1) / (k+2), exact at every step.
    unsigned __int128 c = 1;
    for (int k = 0; k < half_n; ++k) {
        c = c * static_cast<unsigned>(2 * (2 * k + 1)) / static_cast<unsigned>(k + 2);
        if (c > std::numeric_limits<std::uint64_t>::max()) {
            throw InvalidArgument("catalan overflow at half_n = " + std::to_string(half_n));
        }
    }
    return static_cast<std::uint64_t>(c);
}

inline void check_even_qubits(int n, int min_n = 2) {
    if (n % 2 != 0 || n < min_n || n > kMaxQubits) {
        throw InvalidArgument("expected an even qubit count in [" + std::to_string(min_n) + ", " +
                              std::to_string(kMaxQubits) + "], got " + std::to_string(n));
    }
}

struct SpinOperators {
    int n_qubits;
    Eigen::MatrixXcd sx, sy, sz, s2;
};

/// Dense collective spin matrices. Memory grows as 4^n, so n is capped at 10.
inline SpinOperators spin_operators(int n) {
    check_qubit_count(n);
    if (n > 10) {
        throw InvalidArgument("dense spin operators are limited to n <= 10");
    }
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
    SpinOperators s{n, Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXcd::Zero(d, d),
                    Eigen::MatrixXcd::Zero(d, d)};
    for (int q = 1; q <= n; ++q) {
        s.sx += 0.5 * embed_operator(n, q, gates::x());
        s.sy += 0.5 * embed_operator(n, q, gates::y());
        s.sz += 0.5 * embed_operator(n, q, gates::z());
    }
    s.s2 = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
    return s;
}

/// S^j |psi> without forming matrices.
inline StateVector apply_total_spin(const StateVector &psi, Axis axis) {
    const int n = psi.n_qubits();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(psi.dim()));
    for (int q = 1; q <= n; ++q) {
        const std::size_t mask = qubit_mask(n, q);
        for (std::size_t k = 0; k < psi.dim(); ++k) {
            const int b = qubit_bit(k, n, q);
            switch (axis) {
                case Axis::Z:
                    out(static_cast<Eigen::Index>(k)) += (b ? -0.5 : 0.5) * psi[k];
                    break;
                case Axis::X:
                    out(static_cast<Eigen::Index>(k ^ mask)) += 0.5 * psi[k];
                    break;
                case Axis::Y:
                    // Y|0> = i|1>, Y|1> = -i|0>
                    out(static_cast<Eigen::Index>(k ^ mask)) += (b ? -0.5 * kI : 0.5 * kI) * psi[k];
                    break;
            }
        }
    }
    return StateVector(n, std::move(out));
}

inline StateVector apply_total_spin_squared(const StateVector &psi) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(psi.dim()));
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        acc += apply_total_spin(apply_total_spin(psi, a), a).amps();
    }
    return StateVector(psi.n_qubits(), std::move(acc));
}

inline double spin_squared_expectation(const StateVector &psi) {
    return inner(psi, apply_total_spin_squared(psi)).real();
}

/// max(|S^x psi|, |S^y psi|, |S^z psi|, |S^2 psi|); zero exactly for singlets.
inline double singlet_residual(const StateVector &psi) {
    double r = apply_total_spin_squared(psi).amps().norm();
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        r = std::max(r, apply_total_spin(psi, a).amps().norm());
    }
    return r;
}

inline bool is_singlet(const StateVector &psi, double tol = 1e-8) {
    return psi.n_qubits() % 2 == 0 && singlet_residual(psi) < tol;
}

struct DickeSpec {
    int m_qubits;
    int k;  // number of 1s (spin-down qubits)
};

/// Equal-weight superposition of all m-qubit strings with exactly k ones.
inline StateVector dicke_state(DickeSpec spec) {
    check_qubit_count(spec.m_qubits);
    if (spec.k < 0 || spec.k > spec.m_qubits) {
        throw InvalidArgument("dicke_state: k = " + std::to_string(spec.k) + " outside [0, " +
                              std::to_string(spec.m_qubits) + "]");
    }
    const double a = std::exp(-0.5 * log_binomial(spec.m_qubits, spec.k));
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << spec.m_qubits));
    for (std::size_t idx = 0; idx < static_cast<std::size_t>(amps.size()); ++idx) {
        if (popcount(idx) == spec.k) {
            amps(static_cast<Eigen::Index>(idx)) = a;
        }
    }
    return StateVector(spec.m_qubits, std::move(amps));
}

/// Sum_k (-1)^k / sqrt(N/2 + 1) |D_k^{N/2}> |D_{N/2-k}^{N/2}>.
inline StateVector supersinglet(int n) {
    check_even_qubits(n);
    const int half = n / 2;
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
    for (int k = 0; k <= half; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        acc += sign / std::sqrt(half + 1.0) * tensor(dicke_state({half, k}), dicke_state({half, half - k})).amps();
    }
    return StateVector(n, std::move(acc));
}

/// Same state from the permutation sum over balanced strings weighted by
/// (-1)^K K! (N/2 - K)!, with K the number of ones among the first N/2 qubits.
inline StateVector supersinglet_permutation_form(int n) {
    check_even_qubits(n);
    const int half = n / 2;
    const double norm = std::lgamma(half + 1.0) + 0.5 * std::log(half + 1.0);
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
    for (std::size_t idx = 0; idx < static_cast<std::size_t>(amps.size()); ++idx) {
        if (popcount(idx) != half) {
            continue;
        }
        const int k1 = popcount(idx >> half);
        const double mag = std::exp(std::lgamma(k1 + 1.0) + std::lgamma(half - k1 + 1.0) - norm);
        amps(static_cast<Eigen::Index>(idx)) = (k1 % 2 == 0) ? mag : -mag;
    }
    return StateVector(n, std::move(amps));
}

/// Single-qubit unitary taking |0>,|1> to the +/- eigenstates of the given axis.
inline Mat2 axis_frame(Axis axis) {
    const double r = 1.0 / std::sqrt(2.0);
    Mat2 u;
    switch (axis) {
        case Axis::X:
            u << r, r, r, -r;
            break;
        case Axis::Y:
            u << r, r, kI * r, -kI * r;
            break;
        case Axis::Z:
            u = Mat2::Identity();
            break;
    }
    return u;
}

/// Supersinglet assembled from spin-N/4 eigenstates quantized along `axis`.
inline StateVector supersinglet_in_basis(int n, Axis axis) {
    check_even_qubits(n);
    const int half = n / 2;
    const Mat2 u = axis_frame(axis);
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
    for (int k = 0; k <= half; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const StateVector a = apply_global_rotation(dicke_state({half, k}), u);
        const StateVector b = apply_global_rotation(dicke_state({half, half - k}), u);
        acc += sign / std::sqrt(half + 1.0) * tensor(a, b).amps();
    }
    return StateVector(n, std::move(acc));
}

struct SingletBasis {
    int n_qubits;
    std::vector<StateVector> vectors;
    double largest_null_singular_value = 0.0;
    double smallest_nonnull_singular_value = 0.0;

    std::size_t size() const {
        return vectors.size();
    }
};

/// Balanced (S^z = 0) basis strings in increasing index order.
inline std::vector<std::size_t> balanced_strings(int n) {
    std::vector<std::size_t> out;
    for (std::size_t idx = 0; idx < (std::size_t{1} << n); ++idx) {
        if (2 * popcount(idx) == n) {
            out.push_back(idx);
        }
    }
    return out;
}

/// S^2 restricted to the S^z = 0 sector, in the balanced_strings() basis.
/// S^2 = 3n/4 + sum_{i<j} (swap_ij + Z_i Z_j / 2).
inline Eigen::MatrixXd spin_squared_zero_sector(int n, const std::vector<std::size_t> &strings) {
    std::vector<std::ptrdiff_t> pos(std::size_t{1} << n, -1);
    for (std::size_t i = 0; i < strings.size(); ++i) {
        pos[strings[i]] = static_cast<std::ptrdiff_t>(i);
    }
    const auto d = static_cast<Eigen::Index>(strings.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
        const std::size_t s = strings[static_cast<std::size_t>(r)];
        double diag = 0.75 * n;
        for (int i = 1; i <= n; ++i) {
            for (int j = i + 1; j <= n; ++j) {
                const int bi = qubit_bit(s, n, i);
                const int bj = qubit_bit(s, n, j);
                diag += (bi == bj) ? 0.5 : -0.5;
                if (bi != bj) {
                    const std::size_t t = s ^ qubit_mask(n, i) ^ qubit_mask(n, j);
                    m(r, pos[t]) += 1.0;
                }
            }
        }
        m(r, r) += diag;
    }
    return m;
}

/// Orthonormal basis of the singlet sector by SVD null-space extraction.
///
/// Works inside the S^z = 0 sector, where the S^z rows of the stacked system
/// vanish identically, so only S^2 has to be decomposed. Fails when a singular
/// value lands in the ambiguous band [cutoff / 100, cutoff * 100].
inline SingletBasis singlet_subspace(int n, double cutoff = 1e-8) {
    check_even_qubits(n);
    const auto strings = balanced_strings(n);
    const Eigen::MatrixXd s2 = spin_squared_zero_sector(n, strings);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(s2, Eigen::ComputeFullV);
    const Eigen::VectorXd &sv = svd.singularValues();
    const Eigen::MatrixXd &v = svd.matrixV();

    SingletBasis basis{n, {}, 0.0, std::numeric_limits<double>::infinity()};
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) >= cutoff / 100 && sv(i) <= cutoff * 100) {
            throw InvariantViolation("singlet_subspace: ambiguous numerical rank, singular value " +
                                     std::to_string(sv(i)) + " near cutoff " + std::to_string(cutoff));
        }
        if (sv(i) < cutoff) {
            basis.largest_null_singular_value = std::max(basis.largest_null_singular_value, sv(i));
            Eigen::VectorXcd full = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
            for (std::size_t r = 0; r < strings.size(); ++r) {
                full(static_cast<Eigen::Index>(strings[r])) = v(static_cast<Eigen::Index>(r), i);
            }
            basis.vectors.emplace_back(n, std::move(full));
        } else {
            basis.smallest_nonnull_singular_value = std::min(basis.smallest_nonnull_singular_value, sv(i));
        }
    }
    return basis;
}

/// Normalized random complex combination of the basis vectors.
inline StateVector random_singlet(const SingletBasis &basis, Rng &rng) {
    if (basis.vectors.empty()) {
        throw InvalidArgument("random_singlet: empty singlet basis");
    }
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.vectors.front().dim()));
    for (const auto &v : basis.vectors) {
        acc += cplx(rng.normal(), rng.normal()) * v.amps();
    }
    return StateVector(basis.n_qubits, acc / acc.norm());
}

inline StateVector random_singlet(int n, Rng &rng) {
    return random_singlet(singlet_subspace(n), rng);
}

struct HomogeneousOptions {
    int restarts = 50;
    int max_iterations = 400;
    double tolerance = 1e-12;
};

struct HomogeneousSinglet {
    StateVector state;
    std::vector<double> phases;  // one per balanced string, balanced_strings() order
    double constraint_residual;  // Euclidean norm of the consistency-relation residuals
    int attempts;
};

namespace detail {

/// Neighbour lists for the consistency relations: for every weight n/2 +/- 1
/// string, the balanced strings reached by flipping one bit.
inline std::vector<std::vector<std::size_t>> homogeneous_constraints(int n, const std::vector<std::size_t> &strings) {
    std::vector<std::ptrdiff_t> pos(std::size_t{1} << n, -1);
    for (std::size_t i = 0; i < strings.size(); ++i) {
        pos[strings[i]] = static_cast<std::ptrdiff_t>(i);
    }
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t t = 0; t < (std::size_t{1} << n); ++t) {
        const int w = popcount(t);
        if (w != n / 2 + 1 && w != n / 2 - 1) {
            continue;
        }
        std::vector<std::size_t> members;
        for (int q = 1; q <= n; ++q) {
            const std::ptrdiff_t p = pos[t ^ qubit_mask(n, q)];
            if (p >= 0) {
                members.push_back(static_cast<std::size_t>(p));
            }
        }
        out.push_back(std::move(members));
    }
    return out;
}

inline Eigen::VectorXd homogeneous_residual(const std::vector<std::vector<std::size_t>> &cons,
                                            const Eigen::VectorXd &phase) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(2 * cons.size()));
    for (std::size_t c = 0; c < cons.size(); ++c) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t m : cons[c]) {
            re += std::cos(phase(static_cast<Eigen::Index>(m)));
            im += std::sin(phase(static_cast<Eigen::Index>(m)));
        }
        r(static_cast<Eigen::Index>(2 * c)) = re;
        r(static_cast<Eigen::Index>(2 * c + 1)) = im;
    }
    return r;
}

}  // namespace detail

/// Homogeneous singlet: equal-modulus amplitudes on every balanced string with
/// phases solving the local consistency relations. Phases come from
/// Levenberg-Marquardt on the relation residuals with the first phase pinned
/// to zero, restarted from uniform random phases.
inline HomogeneousSinglet homogeneous_singlet(int n, Rng &rng, const HomogeneousOptions &opt = {}) {
    check_even_qubits(n);
    const auto strings = balanced_strings(n);
    const auto cons = detail::homogeneous_constraints(n, strings);
    const auto d = static_cast<Eigen::Index>(strings.size());
    const Eigen::Index rows = static_cast<Eigen::Index>(2 * cons.size());

    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_phase;
    int attempt = 0;
    for (; attempt < opt.restarts; ++attempt) {
        Eigen::VectorXd phase(d);
        phase(0) = 0.0;
        for (Eigen::Index i = 1; i < d; ++i) {
            phase(i) = rng.uniform(0.0, 2.0 * std::numbers::pi);
        }
        Eigen::VectorXd r = detail::homogeneous_residual(cons, phase);
        double cost = r.squaredNorm();
        double lambda = 1e-3;
        for (int it = 0; it < opt.max_iterations && std::sqrt(cost) > opt.tolerance; ++it) {
            Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, d - 1);
            for (std::size_t c = 0; c < cons.size(); ++c) {
                for (std::size_t m : cons[c]) {
                    if (m == 0) {
                        continue;
                    }
                    const double p = phase(static_cast<Eigen::Index>(m));
                    jac(static_cast<Eigen::Index>(2 * c), static_cast<Eigen::Index>(m - 1)) += -std::sin(p);
                    jac(static_cast<Eigen::Index>(2 * c + 1), static_cast<Eigen::Index>(m - 1)) += std::cos(p);
                }
            }
            const Eigen::MatrixXd jtj = jac.transpose() * jac;
            const Eigen::VectorXd jtr = jac.transpose() * r;
            bool improved = false;
            for (int tries = 0; tries < 20; ++tries) {
                Eigen::MatrixXd a = jtj;
                a.diagonal().array() += lambda * (1.0 + jtj.diagonal().array());
                const Eigen::VectorXd step = a.ldlt().solve(-jtr);
                Eigen::VectorXd trial = phase;
                trial.tail(d - 1) += step;
                const Eigen::VectorXd rt = detail::homogeneous_residual(cons, trial);
                const double ct = rt.squaredNorm();
                if (ct < cost) {
                    phase = trial;
                    r = rt;
                    cost = ct;
                    lambda = std::max(lambda * 0.3, 1e-15);
                    improved = true;
                    break;
                }
                lambda *= 10.0;
            }
            if (!improved) {
                break;
            }
        }
        const double res = std::sqrt(cost);
        if (res < best) {
            best = res;
            best_phase = phase;
        }
        if (res <= opt.tolerance * 100) {
            break;
        }
    }
    if (!(best <= opt.tolerance * 100)) {
        throw SolverFailure("homogeneous_singlet: no solution for n = " + std::to_string(n) + " after " +
                                std::to_string(opt.restarts) + " restarts",
                            best);
    }
    const double a = std::exp(-0.5 * log_binomial(n, n / 2));
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(std::size_t{1} << n));
    std::vector<double> phases(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) {
        const double p = std::remainder(best_phase(i), 2.0 * std::numbers::pi);
        phases[static_cast<std::size_t>(i)] = p;
        amps(static_cast<Eigen::Index>(strings[static_cast<std::size_t>(i)])) = a * std::exp(kI * p);
    }
    return {StateVector(n, std::move(amps)), std::move(phases), best, std::min(attempt + 1, opt.restarts)};
}

}  // namespace qcs

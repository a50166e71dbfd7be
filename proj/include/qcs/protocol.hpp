#pragma once

// Multiparty clock-synchronization protocol on a shared singlet.
//
// Alice (qubit 1) measures X and broadcasts the outcome; every other party n
// sees <X_n>(t) = A_n cos(omega t) on the corrected branch. The amplitudes are
// computed three ways (post-measurement state, two-point correlators, and
// classical sign-flip post-processing) plus the supersinglet closed form.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcs/exceptions.hpp"
#include "qcs/format.hpp"
#include "qcs/qstate.hpp"
#include "qcs/rng.hpp"
#include "qcs/spin.hpp"

namespace qcs {

enum class CorrectionMode { Physical, Classical };

inline std::string to_string(CorrectionMode m) {
    return m == CorrectionMode::Physical ? "physical" : "classical";
}

inline CorrectionMode parse_correction_mode(const std::string &s) {
    if (s == "physical") {
        return CorrectionMode::Physical;
    }
    if (s == "classical") {
        return CorrectionMode::Classical;
    }
    throw InvalidArgument("correction mode must be 'physical' or 'classical'");
}

enum class Group { I, II };

inline std::string to_string(Group g) {
    return g == Group::I ? "I" : "II";
}

/// Group I holds qubits [1, N/2], Group II holds [N/2 + 1, N].
inline Group group_of(int party, int n_qubits) {
    check_qubit(n_qubits, party);
    return 2 * party <= n_qubits ? Group::I : Group::II;
}

struct ProtocolConfig {
    int n_qubits = 4;
    double omega = 1.0;
    CorrectionMode correction = CorrectionMode::Physical;
    std::uint64_t seed = 0;

    void validate() const {
        check_even_qubits(n_qubits);
        if (!(omega > 0.0) || !std::isfinite(omega)) {
            throw InvalidArgument("omega must be positive and finite");
        }
    }
};

struct AmplitudeEntry {
    int party;
    Group group;
    double amplitude;
};

struct AmplitudeTable {
    int n_qubits = 0;
    std::vector<AmplitudeEntry> entries;  // parties 2..N in order

    double at(int party) const {
        if (party < 2 || party > n_qubits) {
            throw InvalidArgument("party " + std::to_string(party) + " outside [2, " + std::to_string(n_qubits) + "]");
        }
        return entries[static_cast<std::size_t>(party - 2)].amplitude;
    }

    double sum() const {
        double s = 0.0;
        for (const auto &e : entries) {
            s += e.amplitude;
        }
        return s;
    }

    double max_abs_difference(const AmplitudeTable &other) const {
        if (other.n_qubits != n_qubits) {
            throw InvalidArgument("amplitude tables have different sizes");
        }
        double d = 0.0;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            d = std::max(d, std::abs(entries[i].amplitude - other.entries[i].amplitude));
        }
        return d;
    }

    /// Sum rule and the [-1, 1/3] range; throws InvariantViolation.
    void check_invariants(double tol = kTol) const {
        if (std::abs(sum() + 1.0) > tol) {
            throw InvariantViolation("amplitude sum rule violated: sum = " + format_double(sum()));
        }
        for (const auto &e : entries) {
            if (e.amplitude < -1.0 - tol || e.amplitude > 1.0 / 3.0 + tol) {
                throw InvariantViolation("amplitude of party " + std::to_string(e.party) + " outside [-1, 1/3]");
            }
        }
    }
};

inline AmplitudeTable make_table(int n, const std::vector<double> &values) {
    AmplitudeTable t{n, {}};
    for (int party = 2; party <= n; ++party) {
        t.entries.push_back({party, group_of(party, n), values[static_cast<std::size_t>(party - 2)]});
    }
    return t;
}

/// CSV with columns party,group,amplitude.
inline void write_csv(std::ostream &os, const AmplitudeTable &t) {
    os << "party,group,amplitude\n";
    for (const auto &e : t.entries) {
        os << e.party << ',' << to_string(e.group) << ',' << format_double(e.amplitude) << '\n';
    }
}

inline void require_singlet(const StateVector &psi, const char *who) {
    if (!is_singlet(psi, 1e-8)) {
        throw InvalidArgument(std::string(who) + ": input is not a singlet within 1e-8");
    }
}

/// X-basis measurement of qubit 1 on a singlet.
inline Measurement alice_measure(const StateVector &singlet, Rng &rng) {
    require_singlet(singlet, "alice_measure");
    return measure(singlet, 1, Basis::x(), rng);
}

/// exp(i pi S^z) on every qubit when Alice saw the minus outcome.
inline StateVector apply_correction(const StateVector &psi, int alice_outcome) {
    if (alice_outcome == +1) {
        return psi;
    }
    if (alice_outcome != -1) {
        throw InvalidArgument("alice outcome must be +1 or -1");
    }
    StateVector out = psi;
    const Mat2 r = gates::z_rotation(std::numbers::pi);
    for (int q = 1; q <= psi.n_qubits(); ++q) {
        out = apply_local_operator(out, q, r);
    }
    return out;
}

namespace detail {

inline std::vector<double> x_expectations(const StateVector &psi) {
    std::vector<double> v;
    for (int party = 2; party <= psi.n_qubits(); ++party) {
        v.push_back(expectation(psi, PauliString::single(psi.n_qubits(), party, Pauli::X)));
    }
    return v;
}

inline std::vector<double> alice_correlations(const StateVector &psi, Pauli axis) {
    std::vector<double> v;
    for (int party = 2; party <= psi.n_qubits(); ++party) {
        v.push_back(expectation(psi, PauliString::pair(psi.n_qubits(), 1, axis, party, axis)));
    }
    return v;
}

}  // namespace detail

/// A_n = <psi(0)|X_n|psi(0)> on the post-measurement, post-correction state.
/// Both of Alice's branches are evaluated; they must coincide after correction.
inline AmplitudeTable amplitude_direct(const StateVector &singlet) {
    require_singlet(singlet, "amplitude_direct");
    const int n = singlet.n_qubits();
    const Basis bx = Basis::x();
    const StateVector plus = project_normalized(singlet, 1, bx.plus);
    const StateVector minus = apply_correction(project_normalized(singlet, 1, bx.minus), -1);
    if (!equal_up_to_phase(plus, minus, 1e-9)) {
        throw InvariantViolation("amplitude_direct: corrected minus branch differs from plus branch");
    }
    const auto a = detail::x_expectations(plus);
    const auto b = detail::x_expectations(minus);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - b[i]) > kTol) {
            throw InvariantViolation("amplitude_direct: branch amplitudes disagree");
        }
    }
    return make_table(n, a);
}

/// <S|Z_1 Z_n|S> for every party.
inline AmplitudeTable correlation_table(const StateVector &psi, Pauli axis) {
    return make_table(psi.n_qubits(), detail::alice_correlations(psi, axis));
}

/// A_n = <S|X_1 X_n|S>, cross-checked against <S|Z_1 Z_n|S>.
inline AmplitudeTable amplitude_correlation(const StateVector &singlet) {
    require_singlet(singlet, "amplitude_correlation");
    AmplitudeTable xx = correlation_table(singlet, Pauli::X);
    const AmplitudeTable zz = correlation_table(singlet, Pauli::Z);
    if (xx.max_abs_difference(zz) > kTol) {
        throw InvariantViolation("amplitude_correlation: XX and ZZ correlators disagree");
    }
    return xx;
}

/// Supersinglet amplitudes: 1/3 in Group I, -(N+4)/(3N) in Group II.
inline AmplitudeTable amplitude_closed_form(int n) {
    check_even_qubits(n, 4);
    std::vector<double> v;
    for (int party = 2; party <= n; ++party) {
        v.push_back(group_of(party, n) == Group::I ? 1.0 / 3.0 : -(n + 4.0) / (3.0 * n));
    }
    return make_table(n, v);
}

/// Probability that qubits 1 and n both read 0 in the supersinglet:
/// 1/3 in Group I, (N/2 - 1)/(3N) in Group II.
inline double supersinglet_p00(int party, int n) {
    check_even_qubits(n);
    if (party < 2 || party > n) {
        throw InvalidArgument("party outside [2, N]");
    }
    return group_of(party, n) == Group::I ? 1.0 / 3.0 : (n / 2.0 - 1.0) / (3.0 * n);
}

namespace detail {

/// <S|Pi_s X_n Pi_s|S> for Alice's projector Pi_s, s = +1 / -1.
inline std::vector<double> branch_weighted_x(const StateVector &singlet, int sign) {
    const Basis bx = Basis::x();
    const Projection p = project(singlet, 1, sign > 0 ? bx.plus : bx.minus);
    return x_expectations(p.post);
}

}  // namespace detail

/// Classical post-processing without the physical rotation:
/// f_n = <Pi_+ X_n Pi_+> - <Pi_- X_n Pi_->, the minus branch weighted by -1.
inline AmplitudeTable amplitude_postprocessed(const StateVector &singlet) {
    require_singlet(singlet, "amplitude_postprocessed");
    const auto plus = detail::branch_weighted_x(singlet, +1);
    const auto minus = detail::branch_weighted_x(singlet, -1);
    std::vector<double> v;
    for (std::size_t i = 0; i < plus.size(); ++i) {
        v.push_back(plus[i] - minus[i]);
    }
    return make_table(singlet.n_qubits(), v);
}

/// Plain average of both branches; vanishes for every singlet.
inline AmplitudeTable amplitude_naive_average(const StateVector &singlet) {
    require_singlet(singlet, "amplitude_naive_average");
    const auto plus = detail::branch_weighted_x(singlet, +1);
    const auto minus = detail::branch_weighted_x(singlet, -1);
    std::vector<double> v;
    for (std::size_t i = 0; i < plus.size(); ++i) {
        v.push_back(plus[i] + minus[i]);
    }
    return make_table(singlet.n_qubits(), v);
}

inline double signal(const AmplitudeTable &table, int party, double t, double omega) {
    return table.at(party) * std::cos(omega * t);
}

inline double normalize_signal(double raw, int party, const AmplitudeTable &table) {
    const double a = table.at(party);
    if (std::abs(a) < 1e-15) {
        throw InvalidArgument("normalize_signal: party " + std::to_string(party) + " has zero amplitude");
    }
    return raw / a;
}

/// t = arccos(clamp(xbar / A, -1, 1)) / omega. Valid for omega t in (0, pi).
inline double estimate_time(double xbar, double amplitude, double omega) {
    if (std::abs(amplitude) < 1e-15) {
        throw InvalidArgument("estimate_time: zero amplitude");
    }
    return std::acos(std::clamp(xbar / amplitude, -1.0, 1.0)) / omega;
}

struct PartyRecord {
    int party;
    Group group;
    int plus_count;          // sign-corrected +1 outcomes out of M
    double xbar;             // (2k - M) / M
    double amplitude;        // normalization constant used for the estimate
    double t_estimate;
    std::vector<int> samples;  // sign-corrected +/-1 outcomes, shot order
};

struct RunRecord {
    int n_qubits;
    double omega;
    CorrectionMode correction;
    double t_true;
    int shots;
    std::uint64_t seed;
    std::uint64_t stream;
    std::vector<int> alice_outcomes;
    std::vector<PartyRecord> parties;

    const PartyRecord &party(int n) const {
        for (const auto &p : parties) {
            if (p.party == n) {
                return p;
            }
        }
        throw InvalidArgument("run record has no party " + std::to_string(n));
    }
};

struct RunOptions {
    /// Order in which parties measure within a shot; empty means 2..N.
    std::vector<int> measurement_order;
    bool keep_samples = true;
};

/// M protocol repetitions on fresh copies of `state`.
///
/// Each shot: Alice measures X on qubit 1, the minus branch is rotated by
/// exp(i pi S^z) (physical mode) or has its outcomes sign-flipped later
/// (classical mode), the state evolves for t_true, and every party measures X.
/// `nominal` supplies the amplitude each party divides by before inverting cos.
inline RunRecord simulate_run(const ProtocolConfig &config, const StateVector &state, const AmplitudeTable &nominal,
                              double t_true, int shots, Rng &rng, const RunOptions &options = {}) {
    config.validate();
    const int n = config.n_qubits;
    if (state.n_qubits() != n || nominal.n_qubits != n) {
        throw InvalidArgument("simulate_run: state / amplitude table size differs from config");
    }
    if (shots < 1) {
        throw InvalidArgument("simulate_run: shots must be >= 1");
    }
    const double phase = config.omega * t_true;
    if (!(phase > 0.0 && phase < std::numbers::pi)) {
        throw InvalidArgument("simulate_run: omega * t must lie in (0, pi) for an unambiguous arccos");
    }
    std::vector<int> order = options.measurement_order;
    if (order.empty()) {
        for (int p = 2; p <= n; ++p) {
            order.push_back(p);
        }
    }
    {
        std::vector<int> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (int p = 2; p <= n; ++p) {
            if (sorted.size() != static_cast<std::size_t>(n - 1) || sorted[static_cast<std::size_t>(p - 2)] != p) {
                throw InvalidArgument("simulate_run: measurement order must be a permutation of 2..N");
            }
        }
    }

    RunRecord rec{n, config.omega, config.correction, t_true, shots, rng.seed(), rng.stream(), {}, {}};
    rec.alice_outcomes.reserve(static_cast<std::size_t>(shots));
    std::vector<std::vector<int>> samples(static_cast<std::size_t>(n + 1));
    const Basis bx = Basis::x();
    for (int shot = 0; shot < shots; ++shot) {
        Rng shot_rng = rng.split(static_cast<std::uint64_t>(shot));
        Measurement alice = measure(state, 1, bx, shot_rng);
        StateVector psi = alice.post;
        if (config.correction == CorrectionMode::Physical) {
            psi = apply_correction(psi, alice.outcome);
        }
        psi = evolve(psi, t_true, config.omega);
        const int sign = config.correction == CorrectionMode::Classical ? alice.outcome : 1;
        for (int p : order) {
            Measurement m = measure(psi, p, bx, shot_rng);
            samples[static_cast<std::size_t>(p)].push_back(sign * m.outcome);
            psi = std::move(m.post);
        }
        rec.alice_outcomes.push_back(alice.outcome);
    }
    for (int p = 2; p <= n; ++p) {
        auto &s = samples[static_cast<std::size_t>(p)];
        const int k = static_cast<int>(std::count(s.begin(), s.end(), +1));
        const double xbar = (2.0 * k - shots) / shots;
        const double a = nominal.at(p);
        PartyRecord pr{p, group_of(p, n), k, xbar, a, estimate_time(xbar, a, config.omega), {}};
        if (options.keep_samples) {
            pr.samples = std::move(s);
        }
        rec.parties.push_back(std::move(pr));
    }
    return rec;
}

/// Supersinglet run normalized by the closed-form amplitudes.
inline RunRecord simulate_run(const ProtocolConfig &config, double t_true, int shots, Rng &rng,
                              const RunOptions &options = {}) {
    config.validate();
    const StateVector s = supersinglet(config.n_qubits);
    const AmplitudeTable nominal =
        config.n_qubits >= 4 ? amplitude_closed_form(config.n_qubits) : amplitude_correlation(s);
    return simulate_run(config, s, nominal, t_true, shots, rng, options);
}

inline nlohmann::json to_json(const RunRecord &r, bool include_samples = false) {
    nlohmann::json parties = nlohmann::json::array();
    for (const auto &p : r.parties) {
        nlohmann::json j = {{"party", p.party},           {"group", to_string(p.group)},
                            {"plus_count", p.plus_count}, {"xbar", p.xbar},
                            {"amplitude", p.amplitude},   {"t_estimate", p.t_estimate}};
        if (include_samples) {
            j["samples"] = p.samples;
        }
        parties.push_back(std::move(j));
    }
    int alice_plus = static_cast<int>(std::count(r.alice_outcomes.begin(), r.alice_outcomes.end(), +1));
    nlohmann::json out = {{"n_qubits", r.n_qubits},
                          {"omega", r.omega},
                          {"correction", to_string(r.correction)},
                          {"t_true", r.t_true},
                          {"shots", r.shots},
                          {"seed", r.seed},
                          {"stream", r.stream},
                          {"alice_plus_count", alice_plus},
                          {"parties", std::move(parties)}};
    if (include_samples) {
        out["alice_outcomes"] = r.alice_outcomes;
    }
    return out;
}

}  // namespace qcs

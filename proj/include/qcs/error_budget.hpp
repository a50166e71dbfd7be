#pragma once

// Timing-error budget: systematic offset from imperfect fidelity, shot-noise
// floor, their quadrature sum, and a binomial Monte Carlo of the estimator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "qcs/exceptions.hpp"
#include "qcs/format.hpp"
#include "qcs/protocol.hpp"
#include "qcs/rng.hpp"

namespace qcs {

/// omega^-1 for the preset clocks, in the unit the CSV column reports.
inline constexpr double kCesiumInvOmegaPs = 17.0;
inline constexpr double kStrontiumInvOmegaFs = 0.4;

namespace detail {

inline void check_omega(double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw InvalidArgument("omega must be positive and finite");
    }
}

}  // namespace detail

/// 2 sqrt(1 - F) / omega.
inline double delta_t_fidelity(double f, double omega = 1.0) {
    if (!(f > 0.0 && f <= 1.0)) {
        throw InvalidArgument("fidelity must lie in (0, 1]");
    }
    detail::check_omega(omega);
    return 2.0 * std::sqrt(1.0 - f) / omega;
}

/// 1 / (omega sqrt(2M)).
inline double delta_t_shot(double m, double omega = 1.0) {
    if (!(m >= 1.0)) {
        throw InvalidArgument("shot count must be >= 1");
    }
    detail::check_omega(omega);
    return 1.0 / (omega * std::sqrt(2.0 * m));
}

struct ErrorBudget {
    double shots;
    double fidelity;
    double omega;
    double delta_t_F;
    double delta_t_SQL;
    double delta_t_total;
};

inline ErrorBudget delta_t_total(double m, double f, double omega = 1.0) {
    const double tf = delta_t_fidelity(f, omega);
    const double ts = delta_t_shot(m, omega);
    const double total = std::sqrt(1.0 / (2.0 * m) + 4.0 * (1.0 - f)) / omega;
    return {m, f, omega, tf, ts, total};
}

struct ShotProbabilities {
    double p_plus;
    double p_minus;
};

/// Outcome probabilities of party n on the supersinglet with a systematic
/// rotation eps: p+ = 2 p00 cos^2((wt - 2eps)/2) + 2 p01 sin^2((wt - 2eps)/2).
inline ShotProbabilities shot_probabilities(int party, double omega_t, double epsilon, int n_qubits) {
    const double p00 = supersinglet_p00(party, n_qubits);
    const double p01 = 0.5 - p00;
    const double h = 0.5 * (omega_t - 2.0 * epsilon);
    const double c2 = std::cos(h) * std::cos(h);
    const double s2 = std::sin(h) * std::sin(h);
    const double plus = 2.0 * p00 * c2 + 2.0 * p01 * s2;
    const double minus = 2.0 * p01 * c2 + 2.0 * p00 * s2;
    return {plus, minus};
}

/// Exact standard deviation of xbar = (2k - M) / M for k ~ Binomial(M, p+).
inline double binomial_xbar_std(double p_plus, double m) {
    if (!(p_plus >= 0.0 && p_plus <= 1.0) || !(m >= 1.0)) {
        throw InvalidArgument("binomial_xbar_std: bad arguments");
    }
    return 2.0 * std::sqrt(p_plus * (1.0 - p_plus) / m);
}

/// Width of the Gaussian approximation exp[-M (x - x0)^2 / (4 p+ p-)]:
/// sqrt(2 p+ p- / M).
inline double gaussian_xbar_std(double p_plus, double m) {
    if (!(p_plus >= 0.0 && p_plus <= 1.0) || !(m >= 1.0)) {
        throw InvalidArgument("gaussian_xbar_std: bad arguments");
    }
    return std::sqrt(2.0 * p_plus * (1.0 - p_plus) / m);
}

struct PartyTiming {
    int party;
    double amplitude;
    double p_plus;
    double mean_xbar;
    double std_xbar;       // empirical
    double mean_t;
    double std_t;          // empirical
    double binomial_std_xbar;
    double linearized_std_t;  // binomial_std_xbar / (|A| omega |sin(omega t - 2 eps)|)
};

struct MonteCarloTiming {
    int n_qubits;
    double omega;
    double t_true;
    double epsilon;
    int shots;
    int trials;
    std::vector<PartyTiming> parties;

    const PartyTiming &party(int n) const {
        for (const auto &p : parties) {
            if (p.party == n) {
                return p;
            }
        }
        throw InvalidArgument("no party " + std::to_string(n));
    }
};

/// Repeats the M-shot estimate `trials` times per party. Each trial draws
/// k ~ Binomial(M, p+) from its own substream and inverts
/// t = arccos(xbar / A_n) / omega with the closed-form amplitude.
inline MonteCarloTiming monte_carlo_timing(int n_qubits, double t_true, int shots, int trials, Rng &rng,
                                           double omega = 1.0, double epsilon = 0.0) {
    check_even_qubits(n_qubits, 4);
    detail::check_omega(omega);
    if (shots < 1 || trials < 2) {
        throw InvalidArgument("monte_carlo_timing: need shots >= 1 and trials >= 2");
    }
    const double wt = omega * t_true;
    if (!(wt > 0.0 && wt < std::numbers::pi)) {
        throw InvalidArgument("monte_carlo_timing: omega * t must lie in (0, pi)");
    }
    const AmplitudeTable amps = amplitude_closed_form(n_qubits);
    MonteCarloTiming out{n_qubits, omega, t_true, epsilon, shots, trials, {}};
    for (int party = 2; party <= n_qubits; ++party) {
        const ShotProbabilities sp = shot_probabilities(party, wt, epsilon, n_qubits);
        const double a = amps.at(party);
        Rng party_rng = rng.split(static_cast<std::uint64_t>(party));
        double sx = 0.0, sxx = 0.0, st = 0.0, stt = 0.0;
        for (int trial = 0; trial < trials; ++trial) {
            Rng r = party_rng.split(static_cast<std::uint64_t>(trial));
            std::binomial_distribution<int> draw(shots, sp.p_plus);
            const int k = draw(r.engine());
            const double xbar = (2.0 * k - shots) / shots;
            const double t = estimate_time(xbar, a, omega);
            sx += xbar;
            sxx += xbar * xbar;
            st += t;
            stt += t * t;
        }
        const double nt = trials;
        const double mx = sx / nt;
        const double mt = st / nt;
        const double vx = std::max(0.0, (sxx - nt * mx * mx) / (nt - 1.0));
        const double vt = std::max(0.0, (stt - nt * mt * mt) / (nt - 1.0));
        const double bstd = binomial_xbar_std(sp.p_plus, shots);
        const double lin = bstd / (std::abs(a) * omega * std::abs(std::sin(wt - 2.0 * epsilon)));
        out.parties.push_back({party, a, sp.p_plus, mx, std::sqrt(vx), mt, std::sqrt(vt), bstd, lin});
    }
    return out;
}

struct ErrorSweepRow {
    double shots;
    double fidelity;
    double dt_omega;
    double dt_cs_ps;
    double dt_sr_fs;
};

inline std::vector<ErrorSweepRow> error_sweep(const std::vector<double> &m_grid, const std::vector<double> &f_list,
                                              double omega = 1.0) {
    if (m_grid.empty() || f_list.empty()) {
        throw InvalidArgument("error_sweep: empty grid");
    }
    std::vector<ErrorSweepRow> rows;
    for (double f : f_list) {
        for (double m : m_grid) {
            const double dtw = delta_t_total(m, f, omega).delta_t_total * omega;
            rows.push_back({m, f, dtw, dtw * kCesiumInvOmegaPs, dtw * kStrontiumInvOmegaFs});
        }
    }
    return rows;
}

/// M = 10^(lo + i (hi - lo) / (points - 1)), rounded to integers.
inline std::vector<double> log_shot_grid(double lo_exp, double hi_exp, int points) {
    if (points < 2 || !(hi_exp >= lo_exp) || lo_exp < 0.0) {
        throw InvalidArgument("log_shot_grid: bad range");
    }
    std::vector<double> g;
    for (int i = 0; i < points; ++i) {
        g.push_back(std::round(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (points - 1))));
    }
    return g;
}

inline void write_csv(std::ostream &os, const std::vector<ErrorSweepRow> &rows) {
    os << "M,F,dt_omega,dt_cs_ps,dt_sr_fs\n";
    for (const auto &r : rows) {
        os << format_double(r.shots) << ',' << format_double(r.fidelity) << ',' << format_double(r.dt_omega) << ','
           << format_double(r.dt_cs_ps) << ',' << format_double(r.dt_sr_fs) << '\n';
    }
}

}  // namespace qcs

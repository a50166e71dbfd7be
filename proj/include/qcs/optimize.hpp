#pragma once

// Search over singlet states for the largest geometric-mean signal
// amplitude: the two-parameter N = 4 family and a pattern search over the
// full singlet subspace.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include "qcs/exceptions.hpp"
#include "qcs/format.hpp"
#include "qcs/protocol.hpp"
#include "qcs/purify.hpp"
#include "qcs/qstate.hpp"
#include "qcs/rng.hpp"
#include "qcs/spin.hpp"

namespace qcs {

inline constexpr double kAmplitudeFloor = 1e-15;

namespace detail {

inline double geomean_abs(const std::vector<double> &a) {
    double acc = 0.0;
    for (double v : a) {
        acc += std::log(std::max(std::abs(v), kAmplitudeFloor));
    }
    return std::exp(acc / static_cast<double>(a.size()));
}

/// <Z_1 Z_n> for n = 2..N straight from |amplitude|^2.
inline std::vector<double> zz_profile(const Eigen::VectorXcd &v, int n) {
    std::vector<double> out(static_cast<std::size_t>(n - 1), 0.0);
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double w = std::norm(v(k));
        if (w == 0.0) {
            continue;
        }
        const int b1 = qubit_bit(static_cast<std::size_t>(k), n, 1);
        for (int q = 2; q <= n; ++q) {
            out[static_cast<std::size_t>(q - 2)] += (b1 == qubit_bit(static_cast<std::size_t>(k), n, q)) ? w : -w;
        }
    }
    return out;
}

}  // namespace detail

/// (prod_n |A_n|)^(1 / (N - 1)) with |A_n| floored at 1e-15.
inline double objective_geomean(const StateVector &state) {
    const AmplitudeTable t = amplitude_correlation(state);
    std::vector<double> a;
    for (const auto &e : t.entries) {
        a.push_back(e.amplitude);
    }
    return detail::geomean_abs(a);
}

struct ScanPoint {
    int i;
    int j;
    double theta;
    double phi;
    double objective;
    bool valid;  // false when the superposition norm vanished
};

struct ScanResult {
    int theta_steps;
    int phi_steps;
    std::vector<ScanPoint> points;  // row-major in (i, j)
    double best = 0.0;
    std::vector<ScanPoint> argmax;         // every point within 1e-12 of best
    std::vector<ScanPoint> local_maxima;   // grid-local maxima, best first

    const ScanPoint &at(int i, int j) const {
        return points[static_cast<std::size_t>(i * phi_steps + j)];
    }
};

/// |Psi->_12 |Psi->_34.
inline StateVector bell_pair_product() {
    return tensor(bell::psi_minus(), bell::psi_minus());
}

/// cos(theta) |Psi->_12|Psi->_34 + e^{i phi} sin(theta) |S_4>, renormalized.
inline StateVector scan_state(double theta, double phi) {
    static const StateVector a = bell_pair_product();
    static const StateVector b = supersinglet(4);
    Eigen::VectorXcd v = std::cos(theta) * a.amps() + std::polar(std::sin(theta), phi) * b.amps();
    const double nrm = v.norm();
    if (!(nrm > 1e-12)) {
        throw InvariantViolation("scan_state: superposition has vanishing norm");
    }
    return StateVector(4, v / nrm);
}

/// theta_i = i pi / theta_steps (i < theta_steps), phi_j = 2 pi j / phi_steps.
/// theta and theta + pi give the same ray, so the grid covers [0, pi).
inline ScanResult scan_n4(int theta_steps, int phi_steps) {
    if (theta_steps < 8 || phi_steps < 8) {
        throw InvalidArgument("scan_n4: need at least 8 steps per axis");
    }
    ScanResult r{theta_steps, phi_steps, {}, 0.0, {}, {}};
    for (int i = 0; i < theta_steps; ++i) {
        for (int j = 0; j < phi_steps; ++j) {
            const double theta = std::numbers::pi * i / theta_steps;
            const double phi = 2.0 * std::numbers::pi * j / phi_steps;
            ScanPoint pt{i, j, theta, phi, 0.0, true};
            try {
                pt.objective = objective_geomean(scan_state(theta, phi));
            } catch (const InvariantViolation &) {
                pt.valid = false;
            }
            r.points.push_back(pt);
            if (pt.valid) {
                r.best = std::max(r.best, pt.objective);
            }
        }
    }
    for (const auto &p : r.points) {
        if (p.valid && p.objective >= r.best - 1e-12) {
            r.argmax.push_back(p);
        }
    }
    for (const auto &p : r.points) {
        if (!p.valid) {
            continue;
        }
        bool is_max = true;
        for (int di = -1; di <= 1 && is_max; ++di) {
            for (int dj = -1; dj <= 1; ++dj) {
                if (di == 0 && dj == 0) {
                    continue;
                }
                const int ii = (p.i + di + theta_steps) % theta_steps;
                const int jj = (p.j + dj + phi_steps) % phi_steps;
                const ScanPoint &q = r.at(ii, jj);
                if (q.valid && q.objective > p.objective) {
                    is_max = false;
                    break;
                }
            }
        }
        if (is_max && p.objective > 0.0) {
            r.local_maxima.push_back(p);
        }
    }
    std::stable_sort(r.local_maxima.begin(), r.local_maxima.end(),
                     [](const ScanPoint &a, const ScanPoint &b) { return a.objective > b.objective; });
    return r;
}

/// Largest |<S_perm|psi>| over all qubit relabellings of the N = 4 supersinglet.
inline double max_permuted_supersinglet_overlap(const StateVector &psi) {
    if (psi.n_qubits() != 4) {
        throw InvalidArgument("max_permuted_supersinglet_overlap: N = 4 only");
    }
    const StateVector s = supersinglet(4);
    std::array<int, 4> perm{0, 1, 2, 3};
    double best = 0.0;
    do {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(16);
        for (std::size_t k = 0; k < 16; ++k) {
            std::size_t t = 0;
            for (int q = 0; q < 4; ++q) {
                const int b = qubit_bit(k, 4, q + 1);
                if (b) {
                    t |= qubit_mask(4, perm[static_cast<std::size_t>(q)] + 1);
                }
            }
            v(static_cast<Eigen::Index>(t)) = s[k];
        }
        best = std::max(best, overlap_modulus(psi, StateVector(4, v)));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

inline void write_csv(std::ostream &os, const ScanResult &r) {
    os << "theta,phi,objective\n";
    for (const auto &p : r.points) {
        os << format_double(p.theta) << ',' << format_double(p.phi) << ','
           << (p.valid ? format_double(p.objective) : std::string("nan")) << '\n';
    }
}

struct OptimizeOptions {
    double initial_step = 0.5;
    double min_step = 1e-9;
    int max_evaluations = 200000;
};

struct OptimizeResult {
    StateVector state;
    double objective;
    std::vector<double> restart_objectives;
    long evaluations;
};

/// Compass search over the real and imaginary parts of the coordinates in an
/// orthonormal singlet basis, with random restarts.
inline OptimizeResult optimize_singlet(int n, int restarts, Rng &rng, const OptimizeOptions &opt = {}) {
    if (n != 4 && n != 6) {
        throw InvalidArgument("optimize_singlet: n must be 4 or 6");
    }
    if (restarts < 1) {
        throw InvalidArgument("optimize_singlet: restarts must be >= 1");
    }
    const SingletBasis basis = singlet_subspace(n);
    const auto d = static_cast<Eigen::Index>(basis.size());
    const auto dim = static_cast<Eigen::Index>(basis.vectors.front().dim());
    Eigen::MatrixXcd b(dim, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        b.col(k) = basis.vectors[static_cast<std::size_t>(k)].amps();
    }
    long evals = 0;
    auto f = [&](const Eigen::VectorXd &x) {
        ++evals;
        Eigen::VectorXcd c(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            c(k) = cplx(x(2 * k), x(2 * k + 1));
        }
        const double nrm = c.norm();
        if (!(nrm > 1e-12)) {
            return 0.0;
        }
        return detail::geomean_abs(detail::zz_profile(b * (c / nrm), n));
    };

    OptimizeResult best{StateVector(n), -1.0, {}, 0};
    for (int r = 0; r < restarts; ++r) {
        Rng rr = rng.split(static_cast<std::uint64_t>(r));
        Eigen::VectorXd x(2 * d);
        for (Eigen::Index k = 0; k < x.size(); ++k) {
            x(k) = rr.normal();
        }
        x /= x.norm();
        double fx = f(x);
        double step = opt.initial_step;
        const long start = evals;
        while (step > opt.min_step) {
            if (evals - start > opt.max_evaluations) {
                throw SolverFailure("optimize_singlet: evaluation budget exhausted", step);
            }
            bool improved = false;
            for (Eigen::Index k = 0; k < x.size(); ++k) {
                for (double s : {step, -step}) {
                    Eigen::VectorXd y = x;
                    y(k) += s;
                    const double fy = f(y);
                    if (fy > fx) {
                        x = y / y.norm();
                        fx = fy;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) {
                step *= 0.5;
            }
        }
        best.restart_objectives.push_back(fx);
        if (fx > best.objective) {
            Eigen::VectorXcd c(d);
            for (Eigen::Index k = 0; k < d; ++k) {
                c(k) = cplx(x(2 * k), x(2 * k + 1));
            }
            best.state = StateVector(n, b * (c / c.norm()));
            best.objective = fx;
        }
    }
    best.evaluations = evals;
    best.objective = objective_geomean(best.state);
    return best;
}

struct BoundReport {
    AmplitudeTable amplitudes;
    double upper_margin;  // min over n of 1/3 - A_n
    double lower_margin;  // min over n of A_n + 1
};

/// Every A_n of a singlet lies in [-1, 1/3]; a violation beyond 1e-9 throws.
inline BoundReport amplitude_bound_check(const StateVector &state) {
    const AmplitudeTable t = amplitude_correlation(state);
    BoundReport r{t, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (const auto &e : t.entries) {
        r.upper_margin = std::min(r.upper_margin, 1.0 / 3.0 - e.amplitude);
        r.lower_margin = std::min(r.lower_margin, e.amplitude + 1.0);
    }
    if (r.upper_margin < -1e-9 || r.lower_margin < -1e-9) {
        throw InvariantViolation("amplitude outside [-1, 1/3]");
    }
    return r;
}

}  // namespace qcs

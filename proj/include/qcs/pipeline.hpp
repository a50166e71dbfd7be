#pragma once

// End-to-end run: distribute Preskill-rotated Bell pairs, purify with the
// sector check, assemble and project onto the singlet sector, stand in for
// supersinglet distillation, then run the timing protocol.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"
#include "qcs/error_budget.hpp"
#include "qcs/exceptions.hpp"
#include "qcs/noise.hpp"
#include "qcs/protocol.hpp"
#include "qcs/purify.hpp"
#include "qcs/qstate.hpp"
#include "qcs/rng.hpp"
#include "qcs/spin.hpp"

namespace qcs {

struct PipelineConfig {
    int n_qubits = 4;
    double phi = 0.9 * std::numbers::pi;
    int rounds = 10;
    int shots = 10000;
    double omega = 1.0;
    double t_true = 1.0;
    int zz_samples = 1000;
    /// Distilled supersinglet fidelity = cap * singlet-sector weight.
    double distillation_cap = 1.0;
    double tolerance_factor = 3.0;
    double converged_fidelity = 0.99;
    CorrectionMode correction = CorrectionMode::Physical;
    SectorCheckOptions sector{};

    void validate() const {
        check_even_qubits(n_qubits, 4);
        if (n_qubits > 8) {
            throw InvalidArgument("pipeline: n_qubits must be at most 8");
        }
        if (rounds < 1 || shots < 1 || zz_samples < 2) {
            throw InvalidArgument("pipeline: rounds, shots and zz_samples must be positive");
        }
        if (!(distillation_cap > 0.0 && distillation_cap <= 1.0)) {
            throw InvalidArgument("pipeline: distillation_cap must lie in (0, 1]");
        }
        if (!(tolerance_factor > 0.0)) {
            throw InvalidArgument("pipeline: tolerance_factor must be positive");
        }
        ProtocolConfig{n_qubits, omega, correction, 0}.validate();
    }
};

struct PairReport {
    int alice;
    int bob;
    SectorCheckedPurification purification;
};

struct PartyOutcome {
    int party;
    double t_estimate;
    double abs_error;
    bool within_tolerance;
};

struct PipelineReport {
    PipelineConfig config;
    std::uint64_t seed;
    std::vector<PairReport> pairs;
    bool purification_converged;
    double pair_fidelity;          // final singlet fidelity of each purified pair
    double singlet_weight;         // weight of the pair product in the singlet sector
    double projected_fidelity;     // <S|Pi rho Pi|S> / tr, before distillation
    double distilled_fidelity;     // stand-in output fidelity
    double epsilon;                // cos^2 eps = distilled_fidelity
    ErrorBudget predicted;
    double tolerance;
    RunRecord run;
    std::vector<PartyOutcome> outcomes;
    bool all_within;
};

/// Builds the 2^N-dimensional state of N/2 Bell-diagonal pairs on
/// (i, i + N/2), i = 1..N/2.
inline DensityMatrix assemble_pairs(int n, const std::vector<BellDiagonalState> &pairs) {
    check_even_qubits(n);
    const int half = n / 2;
    if (static_cast<int>(pairs.size()) != half) {
        throw InvalidArgument("assemble_pairs: need N/2 pairs");
    }
    // Product in pair-major order (1, 1+h, 2, 2+h, ...), then relabel.
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
    for (const auto &p : pairs) {
        const Eigen::MatrixXcd m = p.to_density_matrix().elems();
        Eigen::MatrixXcd next(acc.rows() * 4, acc.cols() * 4);
        for (Eigen::Index i = 0; i < acc.rows(); ++i) {
            for (Eigen::Index j = 0; j < acc.cols(); ++j) {
                next.block(4 * i, 4 * j, 4, 4) = acc(i, j) * m;
            }
        }
        acc = std::move(next);
    }
    // position q (1-based) in pair-major order holds qubit label[q].
    std::vector<int> label;
    for (int i = 1; i <= half; ++i) {
        label.push_back(i);
        label.push_back(i + half);
    }
    const auto d = static_cast<std::size_t>(acc.rows());
    std::vector<std::size_t> map(d);
    for (std::size_t k = 0; k < d; ++k) {
        std::size_t t = 0;
        for (int q = 1; q <= n; ++q) {
            if (qubit_bit(k, n, q)) {
                t |= qubit_mask(n, label[static_cast<std::size_t>(q - 1)]);
            }
        }
        map[k] = t;
    }
    Eigen::MatrixXcd out(acc.rows(), acc.cols());
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) {
            out(static_cast<Eigen::Index>(map[a]), static_cast<Eigen::Index>(map[b])) =
                acc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        }
    }
    return DensityMatrix(n, std::move(out));
}

inline PipelineReport run_pipeline(const PipelineConfig &cfg, std::uint64_t seed) {
    cfg.validate();
    const int n = cfg.n_qubits;
    const int half = n / 2;
    Rng root(seed);
    Rng sector_rng = root.split(1);
    Rng run_rng = root.split(2);

    PipelineReport rep{cfg, seed, {}, true, 0.0, 0.0, 0.0, 0.0, 0.0, {}, 0.0, {}, {}, true};
    std::vector<BellDiagonalState> purified;
    for (int i = 1; i <= half; ++i) {
        Rng pr = sector_rng.split(static_cast<std::uint64_t>(i));
        PairReport p{i, i + half, purify_with_sector_check(cfg.phi, cfg.rounds, cfg.zz_samples, pr, cfg.sector)};
        purified.push_back(p.purification.final.final_state);
        if (p.purification.final.final_fidelity() < cfg.converged_fidelity) {
            rep.purification_converged = false;
        }
        rep.pairs.push_back(std::move(p));
    }
    rep.pair_fidelity = purified.front().fidelity();
    for (const auto &p : purified) {
        rep.pair_fidelity = std::min(rep.pair_fidelity, p.fidelity());
    }

    const DensityMatrix product = assemble_pairs(n, purified);
    const SingletBasis basis = singlet_subspace(n);
    const StateVector s = supersinglet(n);
    rep.singlet_weight = singlet_weight(product, basis);
    rep.projected_fidelity = fidelity(singlet_project(product, basis), s);
    rep.distilled_fidelity = cfg.distillation_cap * rep.singlet_weight;
    rep.epsilon = std::acos(std::sqrt(std::clamp(rep.distilled_fidelity, 0.0, 1.0)));
    rep.predicted = delta_t_total(cfg.shots, rep.distilled_fidelity, cfg.omega);
    rep.tolerance = cfg.tolerance_factor * rep.predicted.delta_t_total;

    const StateVector noisy = preskill_worst_case(s, rep.epsilon);
    const ProtocolConfig pc{n, cfg.omega, cfg.correction, seed};
    RunOptions ro;
    ro.keep_samples = false;
    rep.run = simulate_run(pc, noisy, amplitude_closed_form(n), cfg.t_true, cfg.shots, run_rng, ro);
    for (const auto &p : rep.run.parties) {
        const double err = std::abs(p.t_estimate - cfg.t_true);
        const bool ok = err <= rep.tolerance;
        rep.outcomes.push_back({p.party, p.t_estimate, err, ok});
        rep.all_within = rep.all_within && ok;
    }
    return rep;
}

inline nlohmann::json to_json(const PipelineReport &r) {
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto &p : r.pairs) {
        const auto &pu = p.purification;
        auto trace = [](const PurificationTrace &t) {
            nlohmann::json rounds = nlohmann::json::array();
            for (const auto &x : t.rounds) {
                rounds.push_back(
                    {{"round", x.round}, {"fidelity", x.fidelity}, {"success_prob", x.success_prob}, {"zz", x.zz}});
            }
            return nlohmann::json{{"flipped", t.flipped}, {"rounds", std::move(rounds)}};
        };
        pairs.push_back({{"qubits", {p.alice, p.bob}},
                         {"first_pass", trace(pu.first)},
                         {"zz_estimate", pu.estimate.mean},
                         {"zz_stderr", pu.estimate.stderr_},
                         {"zz_samples", pu.estimate.samples},
                         {"decision", to_string(pu.decision)},
                         {"final", trace(pu.final)}});
    }
    nlohmann::json parties = nlohmann::json::array();
    for (const auto &o : r.outcomes) {
        parties.push_back({{"party", o.party},
                           {"t_estimate", o.t_estimate},
                           {"abs_error", o.abs_error},
                           {"within_tolerance", o.within_tolerance}});
    }
    return {{"n_qubits", r.config.n_qubits},
            {"phi", r.config.phi},
            {"rounds", r.config.rounds},
            {"shots", r.config.shots},
            {"omega", r.config.omega},
            {"t_true", r.config.t_true},
            {"seed", r.seed},
            {"distillation_cap", r.config.distillation_cap},
            {"pairs", std::move(pairs)},
            {"purification_converged", r.purification_converged},
            {"pair_fidelity", r.pair_fidelity},
            {"singlet_weight", r.singlet_weight},
            {"projected_fidelity", r.projected_fidelity},
            {"distilled_fidelity", r.distilled_fidelity},
            {"epsilon", r.epsilon},
            {"predicted",
             {{"delta_t_F", r.predicted.delta_t_F},
              {"delta_t_SQL", r.predicted.delta_t_SQL},
              {"delta_t_total", r.predicted.delta_t_total}}},
            {"tolerance", r.tolerance},
            {"run", to_json(r.run)},
            {"parties", std::move(parties)},
            {"all_within_tolerance", r.all_within}};
}

}  // namespace qcs

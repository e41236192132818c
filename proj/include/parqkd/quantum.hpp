#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "parqkd/errors.hpp"
#include "parqkd/games.hpp"
#include "parqkd/linalg.hpp"
#include "parqkd/rng.hpp"

namespace parqkd {

inline constexpr double structural_tol = 1e-10; // Hermiticity, projector algebra
inline constexpr double probability_tol = 1e-9; // probabilities and values

struct density_state {
    std::size_t dim = 0;
    cmat matrix;

    void validate() const {
        if (matrix.rows() != dim || matrix.cols() != dim)
            throw malformed_strategy_error("density state: shape mismatch");
        if (hermiticity_defect(matrix) > structural_tol)
            throw malformed_strategy_error("density state: not Hermitian");
        if (std::abs(matrix.trace() - cplx{1.0}) > structural_tol)
            throw malformed_strategy_error("density state: trace != 1");
        const std::vector<double> eig = hermitian_eigenvalues(matrix);
        if (eig.front() < -1e-9)
            throw malformed_strategy_error("density state: negative eigenvalue");
    }
};

struct projective_measurement {
    struct outcome {
        int label; // output index in the game
        cmat projector;
    };
    std::vector<outcome> outcomes;

    void validate(std::size_t dim) const {
        cmat sum(dim, dim);
        for (const outcome& o : outcomes) {
            if (o.projector.rows() != dim || o.projector.cols() != dim)
                throw malformed_strategy_error("measurement: projector shape mismatch");
            if ((o.projector * o.projector - o.projector).max_abs() > structural_tol)
                throw malformed_strategy_error("measurement: projector not idempotent");
            sum = sum + o.projector;
        }
        for (std::size_t i = 0; i < outcomes.size(); ++i)
            for (std::size_t j = i + 1; j < outcomes.size(); ++j)
                if ((outcomes[i].projector * outcomes[j].projector).max_abs() > structural_tol)
                    throw malformed_strategy_error("measurement: projectors not orthogonal");
        if ((sum - cmat::identity(dim)).max_abs() > structural_tol)
            throw malformed_strategy_error("measurement: projectors do not resolve identity");
    }
};

/// Shared state on Alice (x) Bob registers plus per-input local projective
/// measurements. Alice's projectors act as M (x) I, Bob's as I (x) M; the
/// split is enforced by storing per-register operators only.
struct quantum_strategy {
    std::size_t dim_alice = 0;
    std::size_t dim_bob = 0;
    density_state shared_state; // dim = dim_alice * dim_bob
    std::vector<projective_measurement> alice_measurements; // indexed by x
    std::vector<projective_measurement> bob_measurements;   // indexed by y

    void validate() const {
        if (shared_state.dim != dim_alice * dim_bob)
            throw malformed_strategy_error("strategy: register split inconsistent with state");
        shared_state.validate();
        for (const auto& m : alice_measurements) m.validate(dim_alice);
        for (const auto& m : bob_measurements) m.validate(dim_bob);
    }
};

struct noise_model {
    enum class kind_t { none, depolarizing };
    kind_t kind = kind_t::none;
    double q = 0.0;

    static noise_model none() { return {}; }
    static noise_model depolarizing(double q) {
        if (q < 0.0 || q > 1.0) throw domain_error("depolarizing noise: q outside [0,1]");
        return {kind_t::depolarizing, q};
    }
};

inline density_state depolarize(const density_state& state, double q) {
    if (q < 0.0 || q > 1.0) throw domain_error("depolarize: q outside [0,1]");
    density_state out;
    out.dim = state.dim;
    out.matrix = cmat(state.dim, state.dim);
    const double mixed = q / static_cast<double>(state.dim);
    for (std::size_t c = 0; c < state.dim; ++c) {
        for (std::size_t r = 0; r < state.dim; ++r)
            out.matrix(r, c) = (1.0 - q) * state.matrix(r, c);
        out.matrix(c, c) += mixed;
    }
    return out;
}

inline density_state apply_noise(const density_state& state, const noise_model& noise) {
    if (noise.kind == noise_model::kind_t::none) return state;
    return depolarize(state, noise.q);
}

namespace pauli {

inline cmat matrix(char which) {
    cmat m(2, 2);
    switch (which) {
        case 'I': m(0, 0) = 1; m(1, 1) = 1; break;
        case 'X': m(0, 1) = 1; m(1, 0) = 1; break;
        case 'Y': m(0, 1) = cplx(0, -1); m(1, 0) = cplx(0, 1); break;
        case 'Z': m(0, 0) = 1; m(1, 1) = -1; break;
        default: throw domain_error("unknown Pauli label");
    }
    return m;
}

} // namespace pauli

/// The two-qubit observable grid behind the ideal strategy: every row
/// multiplies to +I and every column to -I.
inline cmat mermin_peres_observable(int row, int col) {
    static const char* grid[3][3] = {
        {"IZ", "ZI", "ZZ"},
        {"XI", "IX", "XX"},
        {"XZ", "ZX", "YY"},
    };
    static const double sign[3][3] = {
        {1, 1, 1},
        {1, 1, 1},
        {-1, -1, 1},
    };
    const char* p = grid[row][col];
    return cplx(sign[row][col]) * kron(pauli::matrix(p[0]), pauli::matrix(p[1]));
}

namespace detail {

/// Joint eigenprojector of two commuting +-1 observables at signs (s0, s1).
inline cmat joint_sign_projector(const cmat& o0, const cmat& o1, int s0, int s1) {
    const cmat id = cmat::identity(o0.rows());
    const cmat p0 = cplx(0.5) * (id + cplx(static_cast<double>(s0)) * o0);
    const cmat p1 = cplx(0.5) * (id + cplx(static_cast<double>(s1)) * o1);
    return p0 * p1;
}

inline int bit_of_sign(int s) { return s > 0 ? 0 : 1; }

} // namespace detail

/// Ideal strategy for the Magic Square game: two EPR pairs, Alice measures
/// the joint eigenbasis of her row's observables, Bob the transposed grid for
/// his column. Wins with probability 1.
inline quantum_strategy ideal_ms_strategy() {
    quantum_strategy st;
    st.dim_alice = 4;
    st.dim_bob = 4;

    // |psi> = (1/2) sum_k |k>|k>, two EPR pairs across the register split.
    st.shared_state.dim = 16;
    st.shared_state.matrix = cmat(16, 16);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            st.shared_state.matrix(i * 4 + i, j * 4 + j) = 0.25;

    for (int x = 0; x < 3; ++x) {
        projective_measurement m;
        const cmat o0 = mermin_peres_observable(x, 0);
        const cmat o1 = mermin_peres_observable(x, 1);
        for (int s0 : {+1, -1})
            for (int s1 : {+1, -1}) {
                const int b0 = detail::bit_of_sign(s0);
                const int b1 = detail::bit_of_sign(s1);
                // Row product is +I, so the third bit keeps the parity even;
                // label 2*b0+b1 matches the game's output encoding.
                m.outcomes.push_back({b0 * 2 + b1, detail::joint_sign_projector(o0, o1, s0, s1)});
            }
        st.alice_measurements.push_back(std::move(m));
    }
    for (int y = 0; y < 3; ++y) {
        projective_measurement m;
        const cmat o0 = mermin_peres_observable(0, y).transpose();
        const cmat o1 = mermin_peres_observable(1, y).transpose();
        for (int s0 : {+1, -1})
            for (int s1 : {+1, -1}) {
                const int b0 = detail::bit_of_sign(s0);
                const int b1 = detail::bit_of_sign(s1);
                m.outcomes.push_back({b0 * 2 + b1, detail::joint_sign_projector(o0, o1, s0, s1)});
            }
        st.bob_measurements.push_back(std::move(m));
    }
    return st;
}

/// Exact Born-rule joint outcome distribution for one input pair, indexed by
/// outcome position (not label) on each side. Tr[(A (x) B) rho] is computed
/// by contracting rho with B first, then with each A.
inline std::vector<double> joint_outcome_distribution(const quantum_strategy& st,
                                                      const density_state& noisy_state,
                                                      int x, int y) {
    const auto& ma = st.alice_measurements[x];
    const auto& mb = st.bob_measurements[y];
    const std::size_t da = st.dim_alice, db = st.dim_bob;
    std::vector<double> probs(ma.outcomes.size() * mb.outcomes.size());
    cmat partial(da, da); // partial(ja, ia) = sum_{ib,jb} B(ib,jb) rho((ja,jb),(ia,ib))
    for (std::size_t j = 0; j < mb.outcomes.size(); ++j) {
        const cmat& b = mb.outcomes[j].projector;
        for (std::size_t ia = 0; ia < da; ++ia)
            for (std::size_t ja = 0; ja < da; ++ja) {
                cplx acc{};
                for (std::size_t ib = 0; ib < db; ++ib)
                    for (std::size_t jb = 0; jb < db; ++jb)
                        acc += b(ib, jb) * noisy_state.matrix(ja * db + jb, ia * db + ib);
                partial(ja, ia) = acc;
            }
        for (std::size_t i = 0; i < ma.outcomes.size(); ++i) {
            const double p = trace_product(ma.outcomes[i].projector, partial).real();
            probs[i * mb.outcomes.size() + j] = p < 0.0 ? 0.0 : p;
        }
    }
    return probs;
}

/// Exact value of a fixed strategy in a game: no sampling involved.
inline double win_probability(const two_player_free_game& game, const quantum_strategy& st,
                              const noise_model& noise) {
    st.validate();
    if (st.alice_measurements.size() != game.nx() || st.bob_measurements.size() != game.ny())
        throw malformed_strategy_error("strategy: measurement count does not match the game");
    const density_state rho = apply_noise(st.shared_state, noise);
    double value = 0.0;
    for (int x = 0; x < static_cast<int>(game.nx()); ++x)
        for (int y = 0; y < static_cast<int>(game.ny()); ++y) {
            const auto probs = joint_outcome_distribution(st, rho, x, y);
            const auto& ma = st.alice_measurements[x].outcomes;
            const auto& mb = st.bob_measurements[y].outcomes;
            double cell = 0.0;
            for (std::size_t i = 0; i < ma.size(); ++i)
                for (std::size_t j = 0; j < mb.size(); ++j)
                    if (game.wins(x, y, ma[i].label, mb[j].label)) cell += probs[i * mb.size() + j];
            value += game.alice_input_dist[x].to_double() * game.bob_input_dist[y].to_double() * cell;
        }
    return value;
}

/// Precomputed Born sampler: one categorical table per input pair.
class born_sampler {
public:
    born_sampler(const two_player_free_game& game, const quantum_strategy& st,
                 const noise_model& noise)
        : nx_(game.nx()), ny_(game.ny()) {
        st.validate();
        const density_state rho = apply_noise(st.shared_state, noise);
        tables_.resize(nx_ * ny_);
        labels_.resize(nx_ * ny_);
        for (int x = 0; x < static_cast<int>(nx_); ++x)
            for (int y = 0; y < static_cast<int>(ny_); ++y) {
                const auto probs = joint_outcome_distribution(st, rho, x, y);
                const auto& ma = st.alice_measurements[x].outcomes;
                const auto& mb = st.bob_measurements[y].outcomes;
                auto& cdf = tables_[x * ny_ + y];
                auto& lab = labels_[x * ny_ + y];
                double acc = 0.0;
                for (std::size_t i = 0; i < ma.size(); ++i)
                    for (std::size_t j = 0; j < mb.size(); ++j) {
                        acc += probs[i * mb.size() + j];
                        cdf.push_back(acc);
                        lab.emplace_back(ma[i].label, mb[j].label);
                    }
                if (std::abs(acc - 1.0) > probability_tol)
                    throw malformed_strategy_error("Born distribution does not sum to 1");
            }
    }

    std::pair<int, int> sample(int x, int y, stream_rng& rng) const {
        const auto& cdf = tables_[x * ny_ + y];
        return labels_[x * ny_ + y][sample_index(rng, cdf)];
    }

    /// Probability of the labeled outcome pair (a, b) given inputs (x, y).
    double probability(int x, int y, int a, int b) const {
        const auto& cdf = tables_[x * ny_ + y];
        const auto& lab = labels_[x * ny_ + y];
        double prev = 0.0;
        for (std::size_t i = 0; i < lab.size(); ++i) {
            if (lab[i].first == a && lab[i].second == b) return cdf[i] - prev;
            prev = cdf[i];
        }
        return 0.0;
    }

private:
    std::size_t nx_, ny_;
    std::vector<std::vector<double>> tables_;               // cumulative sums
    std::vector<std::vector<std::pair<int, int>>> labels_;  // aligned labels
};

/// One Born-rule draw for inputs (x, y). For bulk sampling prefer a
/// born_sampler, which amortizes the distribution computation.
inline std::pair<int, int> sample_round(const two_player_free_game& game,
                                        const quantum_strategy& st, const noise_model& noise,
                                        int x, int y, stream_rng& rng) {
    if (x < 0 || x >= static_cast<int>(game.nx()) || y < 0 || y >= static_cast<int>(game.ny()))
        throw domain_error("sample_round: input outside the game's sets");
    const density_state rho = apply_noise(st.shared_state, noise);
    const auto probs = joint_outcome_distribution(st, rho, x, y);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) cdf[i] = (acc += probs[i]);
    const std::size_t k = sample_index(rng, cdf);
    const auto& ma = st.alice_measurements[x].outcomes;
    const auto& mb = st.bob_measurements[y].outcomes;
    return {ma[k / mb.size()].label, mb[k % mb.size()].label};
}

/// Finds the depolarizing parameter with the requested ideal-strategy win
/// probability. The value is affine in q; bisection keeps the search honest
/// about what win_probability actually computes.
inline double calibrate_noise(const two_player_free_game& game, const quantum_strategy& st,
                              double target_win) {
    const double v0 = win_probability(game, st, noise_model::none());
    const double v1 = win_probability(game, st, noise_model::depolarizing(1.0));
    if (target_win > v0 + probability_tol || target_win < v1 - probability_tol)
        throw domain_error("calibrate_noise: target win probability not achievable");
    if (std::abs(target_win - v0) <= 1e-12) return 0.0;
    if (std::abs(target_win - v1) <= 1e-12) return 1.0;
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double v = win_probability(game, st, noise_model::depolarizing(mid));
        if (std::abs(v - target_win) < 1e-12) return mid;
        (v > target_win ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace parqkd

#include "cqrel/channel.hpp"

#include <cmath>
#include <utility>

namespace cqrel {

InputDistribution::InputDistribution(RealVector probs) {
    if (probs.size() < 1) {
        throw Error(Error::Kind::invalid_argument, "distribution needs at least one entry");
    }
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= -1e-15)) {
            throw Error(Error::Kind::construction, "distribution has a negative entry");
        }
        if (probs[i] < 0.0) probs[i] = 0.0;
    }
    const double sum = probs.sum();
    if (std::abs(sum - 1.0) > 1e-12 || sum <= 0.0) {
        throw Error(Error::Kind::construction,
                    "distribution sums to " + std::to_string(sum) + ", not 1");
    }
    probs_ = probs / sum;
}

InputDistribution InputDistribution::uniform(int alphabet_size) {
    return InputDistribution(RealVector::Constant(alphabet_size, 1.0 / alphabet_size));
}

InputDistribution InputDistribution::point_mass(int alphabet_size, int index) {
    RealVector v = RealVector::Zero(alphabet_size);
    v[index] = 1.0;
    return InputDistribution(std::move(v));
}

CqChannel::CqChannel(std::vector<DensityOperator> states, std::optional<std::string> name)
    : states_(std::move(states)), name_(std::move(name)) {
    if (states_.empty()) {
        throw Error(Error::Kind::construction, "channel needs at least one state");
    }
    const Eigen::Index d = states_.front().dim();
    for (const auto& s : states_) {
        if (s.dim() != d) {
            throw Error(Error::Kind::construction, "channel states have mixed dimensions");
        }
    }
}

CqChannel CqChannel::bsc(double p) {
    if (p < 0.0 || p > 1.0) {
        throw Error(Error::Kind::invalid_argument, "bsc crossover must lie in [0, 1]");
    }
    RealMatrix t(2, 2);
    t << 1.0 - p, p, p, 1.0 - p;
    CqChannel ch = from_classical(t);
    return CqChannel(ch.states(), "bsc(" + std::to_string(p) + ")");
}

CqChannel CqChannel::pure2(double eps) {
    if (eps < -1.0 || eps > 1.0) {
        throw Error(Error::Kind::invalid_argument, "pure2 overlap must lie in [-1, 1]");
    }
    Eigen::Vector2cd psi1(1.0, 0.0);
    Eigen::Vector2cd psi2(eps, std::sqrt(std::max(0.0, 1.0 - eps * eps)));
    std::vector<DensityOperator> states;
    states.emplace_back(Matrix(psi1 * psi1.adjoint()));
    states.emplace_back(Matrix(psi2 * psi2.adjoint()));
    return CqChannel(std::move(states), "pure2(" + std::to_string(eps) + ")");
}

CqChannel CqChannel::classical(const RealMatrix& transition) { return from_classical(transition); }

CqChannel from_classical(const RealMatrix& transition) {
    const Eigen::Index a = transition.rows();
    const Eigen::Index b = transition.cols();
    if (a < 1 || b < 1) {
        throw Error(Error::Kind::invalid_argument, "transition matrix is empty");
    }
    std::vector<DensityOperator> states;
    states.reserve(static_cast<std::size_t>(a));
    for (Eigen::Index i = 0; i < a; ++i) {
        if (transition.row(i).minCoeff() < -1e-15 ||
            std::abs(transition.row(i).sum() - 1.0) > config().eta_trace) {
            throw Error(Error::Kind::construction,
                        "transition row " + std::to_string(i) + " is not a probability vector");
        }
        Matrix diag = Matrix::Zero(b, b);
        for (Eigen::Index y = 0; y < b; ++y) {
            diag(y, y) = std::max(0.0, transition(i, y));
        }
        states.emplace_back(std::move(diag));
    }
    return CqChannel(std::move(states));
}

DensityOperator codeword_state(const CqChannel& ch, const Codeword& w) {
    if (w.length() < 1) {
        throw Error(Error::Kind::invalid_argument, "codeword is empty");
    }
    double dims = 1.0;
    for (int k = 0; k < w.length(); ++k) dims *= ch.dim();
    if (dims > config().dim_cap) {
        throw Error(Error::Kind::dimension_cap,
                    "codeword state dimension " + std::to_string(ch.dim()) + "^" +
                        std::to_string(w.length()) + " exceeds cap " +
                        std::to_string(config().dim_cap));
    }
    for (auto sym : w.symbols) {
        if (sym >= ch.alphabet_size()) {
            throw Error(Error::Kind::invalid_argument, "codeword symbol out of range");
        }
    }
    Matrix state = ch.state(w.symbols[0]).matrix();
    for (int k = 1; k < w.length(); ++k) {
        state = tensor(state, ch.state(w.symbols[k]).matrix());
    }
    return DensityOperator(std::move(state));
}

Codebook sample_codebook(const CqChannel& ch, const InputDistribution& pi, int M, int n,
                         std::uint64_t seed) {
    if (M < 1 || n < 1) {
        throw Error(Error::Kind::invalid_argument, "codebook needs M >= 1, n >= 1");
    }
    if (pi.size() != ch.alphabet_size()) {
        throw Error(Error::Kind::invalid_argument, "distribution size does not match alphabet");
    }
    Rng rng(seed);
    Codebook book;
    book.words.resize(static_cast<std::size_t>(M));
    for (auto& word : book.words) {
        word.symbols.resize(static_cast<std::size_t>(n));
        for (auto& sym : word.symbols) {
            sym = static_cast<std::uint8_t>(rng.categorical(pi.probs()));
        }
    }
    return book;
}

CqChannel parallel_compose(const CqChannel& ch1, const CqChannel& ch2) {
    std::vector<DensityOperator> states;
    states.reserve(static_cast<std::size_t>(ch1.alphabet_size()) * ch2.alphabet_size());
    for (int i = 0; i < ch1.alphabet_size(); ++i) {
        for (int j = 0; j < ch2.alphabet_size(); ++j) {
            states.emplace_back(tensor(ch1.state(i).matrix(), ch2.state(j).matrix()));
        }
    }
    return CqChannel(std::move(states));
}

bool is_classical(const CqChannel& ch, double tol) {
    for (const auto& s : ch.states()) {
        const Matrix& m = s.matrix();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (i != j && std::abs(m(i, j)) > tol) return false;
            }
        }
    }
    return true;
}

DensityOperator random_density_operator(int dim, Rng& rng, int rank) {
    if (rank <= 0 || rank > dim) rank = dim;
    Matrix g(dim, rank);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            g(i, j) = Complex(rng.normal(), rng.normal());
        }
    }
    Matrix s = g * g.adjoint();
    s /= s.trace();
    return DensityOperator(std::move(s));
}

CqChannel random_channel(int alphabet_size, int dim, Rng& rng, bool allow_rank_deficient) {
    std::vector<DensityOperator> states;
    states.reserve(static_cast<std::size_t>(alphabet_size));
    for (int i = 0; i < alphabet_size; ++i) {
        int rank = dim;
        if (allow_rank_deficient && dim > 1 && rng.uniform() < 0.3) {
            rank = 1 + static_cast<int>(rng.uniform() * dim);
            if (rank > dim) rank = dim;
        }
        states.push_back(random_density_operator(dim, rng, rank));
    }
    return CqChannel(std::move(states));
}

RealMatrix random_stochastic_matrix(int rows, int cols, Rng& rng) {
    RealMatrix p(rows, cols);
    for (int i = 0; i < rows; ++i) {
        p.row(i) = rng.dirichlet(cols).transpose();
    }
    return p;
}

}  // namespace cqrel

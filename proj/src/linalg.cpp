#include "cqrel/linalg.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace cqrel {

namespace {

constexpr double kLn2 = 0.6931471805599453;

void normalize_phases(Matrix& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            const Complex v = vectors(r, c);
            if (std::abs(v) > 1e-12) {
                vectors.col(c) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
}

SpectralDecomposition decompose_impl(const Matrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
    if (solver.info() != Eigen::Success) {
        throw Error(Error::Kind::numeric,
                    "eigendecomposition failed to converge (dim " +
                        std::to_string(hermitian.rows()) + ")");
    }
    SpectralDecomposition out;
    // Eigen returns ascending order; flip to descending.
    const Eigen::Index n = hermitian.rows();
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        out.eigenvectors.col(c) = solver.eigenvectors().col(n - 1 - c);
    }
    normalize_phases(out.eigenvectors);
    return out;
}

}  // namespace

Config& config() {
    static Config instance;
    return instance;
}

double support_threshold(double lambda_max, Eigen::Index dim) {
    return static_cast<double>(dim) * config().support_rel * std::max(lambda_max, 0.0);
}

HermitianOperator::HermitianOperator(Matrix m) {
    if (m.rows() != m.cols()) {
        throw Error(Error::Kind::construction, "matrix is not square");
    }
    if (!m.allFinite()) {
        throw Error(Error::Kind::construction, "matrix has non-finite entries");
    }
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (dev > config().eta_herm) {
        throw Error(Error::Kind::construction,
                    "matrix deviates from Hermitian by " + std::to_string(dev));
    }
    mat_ = 0.5 * (m + m.adjoint().eval());
}

DensityOperator::DensityOperator(const HermitianOperator& h) {
    SpectralDecomposition sd = spectral_decompose(h);
    const double lambda_min = sd.eigenvalues.minCoeff();
    if (lambda_min < -config().eta_psd) {
        throw Error(Error::Kind::construction,
                    "operator is not positive semidefinite (lambda_min " +
                        std::to_string(lambda_min) + ")");
    }
    for (Eigen::Index i = 0; i < sd.eigenvalues.size(); ++i) {
        if (sd.eigenvalues[i] < 0.0) sd.eigenvalues[i] = 0.0;
    }
    const double tr = sd.eigenvalues.sum();
    if (std::abs(tr - 1.0) > config().eta_trace) {
        throw Error(Error::Kind::construction,
                    "operator trace " + std::to_string(tr) + " is not 1");
    }
    sd.eigenvalues /= tr;
    spec_ = std::move(sd);
    mat_ = spec_.reconstruct();
    mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
}

Matrix DensityOperator::power(double p) const { return matrix_power(spec_, p); }

SpectralDecomposition spectral_decompose(const HermitianOperator& h) {
    return decompose_impl(h.matrix());
}

SpectralDecomposition spectral_decompose_symmetrized(const Matrix& m) {
    return decompose_impl(0.5 * (m + m.adjoint().eval()));
}

Matrix matrix_power(const SpectralDecomposition& sd, double p) {
    const Eigen::Index n = sd.eigenvalues.size();
    const double lambda_max = n > 0 ? sd.eigenvalues[0] : 0.0;
    const double tau = support_threshold(lambda_max, n);
    const double lambda_min = n > 0 ? sd.eigenvalues[n - 1] : 0.0;
    if (lambda_min < -config().eta_psd * std::max(1.0, lambda_max)) {
        throw Error(Error::Kind::construction,
                    "matrix_power input is not positive semidefinite (lambda_min " +
                        std::to_string(lambda_min) + ")");
    }
    RealVector mapped(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double lambda = sd.eigenvalues[i];
        mapped[i] = lambda > tau ? std::pow(lambda, p) : 0.0;
    }
    Matrix out = sd.eigenvectors * mapped.asDiagonal() * sd.eigenvectors.adjoint();
    return 0.5 * (out + out.adjoint().eval());
}

Matrix matrix_power(const Matrix& psd, double p) {
    return matrix_power(spectral_decompose_symmetrized(psd), p);
}

double trace_norm(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw Error(Error::Kind::invalid_argument, "trace_norm expects a square matrix");
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    if (svd.info() != Eigen::Success) {
        throw Error(Error::Kind::numeric,
                    "SVD failed to converge (dim " + std::to_string(a.rows()) + ")");
    }
    return svd.singularValues().sum();
}

Matrix tensor(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) {
        throw Error(Error::Kind::invalid_argument, "tensor expects square matrices");
    }
    const Eigen::Index da = a.rows();
    const Eigen::Index db = b.rows();
    if (da * db > config().dim_cap) {
        throw Error(Error::Kind::dimension_cap,
                    "tensor product dimension " + std::to_string(da * db) +
                        " exceeds cap " + std::to_string(config().dim_cap));
    }
    Matrix out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i) {
        for (Eigen::Index j = 0; j < da; ++j) {
            out.block(i * db, j * db, db, db) = a(i, j) * b;
        }
    }
    return out;
}

double von_neumann_entropy(const DensityOperator& s) {
    double nats = 0.0;
    const RealVector& lambda = s.spectral().eigenvalues;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda[i] > 0.0) nats -= lambda[i] * std::log(lambda[i]);
    }
    return nats / kLn2;
}

double relative_entropy(const DensityOperator& s, const DensityOperator& t) {
    if (s.dim() != t.dim()) {
        throw Error(Error::Kind::invalid_argument, "relative_entropy dimension mismatch");
    }
    const SpectralDecomposition& st = t.spectral();
    const double tau = support_threshold(st.eigenvalues.size() ? st.eigenvalues[0] : 0.0, t.dim());

    // weight of S on each eigenvector of T
    double kernel_mass = 0.0;
    double cross_nats = 0.0;  // Tr S log T over supp T
    for (Eigen::Index j = 0; j < st.eigenvalues.size(); ++j) {
        const double w =
            std::real(st.eigenvectors.col(j).dot(s.matrix() * st.eigenvectors.col(j)));
        if (st.eigenvalues[j] > tau) {
            cross_nats += w * std::log(st.eigenvalues[j]);
        } else {
            kernel_mass += w;
        }
    }
    if (kernel_mass > config().eta_psd) {
        return std::numeric_limits<double>::infinity();
    }

    double self_nats = 0.0;  // Tr S log S
    const RealVector& ls = s.spectral().eigenvalues;
    for (Eigen::Index i = 0; i < ls.size(); ++i) {
        if (ls[i] > 0.0) self_nats += ls[i] * std::log(ls[i]);
    }
    return std::max(0.0, (self_nats - cross_nats) / kLn2);
}

double renyi_overlap(const DensityOperator& s, const DensityOperator& t, double r) {
    if (r < 0.0 || r > 1.0) {
        throw Error(Error::Kind::invalid_argument, "renyi_overlap expects r in [0, 1]");
    }
    if (s.dim() != t.dim()) {
        throw Error(Error::Kind::invalid_argument, "renyi_overlap dimension mismatch");
    }
    const double value = std::real((s.power(1.0 - r) * t.power(r)).trace());
    const double tau = support_threshold(1.0, s.dim());
    if (value <= tau) return std::numeric_limits<double>::infinity();
    return -std::log2(value);
}

}  // namespace cqrel

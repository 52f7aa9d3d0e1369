#pragma once

#include <complex>

#include <Eigen/Dense>

#include "cqrel/config.hpp"

namespace cqrel {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Eigensystem of a Hermitian matrix. Eigenvalues descending; each
/// eigenvector's first nonvanishing component is made real positive so the
/// decomposition is deterministic up to degenerate subspaces.
struct SpectralDecomposition {
    RealVector eigenvalues;
    Matrix eigenvectors;  // columns

    Matrix reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.adjoint();
    }
};

/// Square complex matrix constrained to be Hermitian within eta_herm;
/// symmetrized on construction.
class HermitianOperator {
  public:
    explicit HermitianOperator(Matrix m);

    const Matrix& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }

  private:
    Matrix mat_;
};

/// Positive semidefinite, unit trace. Eigenvalues in [-eta_psd, 0) are
/// clipped to zero and the trace renormalized; anything worse is a
/// construction error. The spectral decomposition is cached since nearly
/// every formula consumes fractional powers of the states.
class DensityOperator {
  public:
    explicit DensityOperator(const HermitianOperator& h);
    explicit DensityOperator(Matrix m) : DensityOperator(HermitianOperator(std::move(m))) {}

    const Matrix& matrix() const { return mat_; }
    const SpectralDecomposition& spectral() const { return spec_; }
    Eigen::Index dim() const { return mat_.rows(); }

    /// lambda -> lambda^p on the support (see matrix_power for conventions).
    Matrix power(double p) const;
    Matrix sqrt() const { return power(0.5); }

  private:
    Matrix mat_;
    SpectralDecomposition spec_;
};

/// Relative support threshold tau = dim * support_rel * lambda_max.
double support_threshold(double lambda_max, Eigen::Index dim);

SpectralDecomposition spectral_decompose(const HermitianOperator& h);
/// Internal variant: symmetrizes its argument without the eta_herm gate.
SpectralDecomposition spectral_decompose_symmetrized(const Matrix& m);

/// Spectral mapping lambda -> lambda^p for PSD input. Eigenvalues at or below
/// the support threshold map to 0 for every p (pseudo-inverse convention for
/// p < 0). Eigenvalues below -eta_psd*max(1, lambda_max) are an error.
Matrix matrix_power(const Matrix& psd, double p);
Matrix matrix_power(const SpectralDecomposition& sd, double p);

/// Sum of singular values.
double trace_norm(const Matrix& a);

/// Kronecker product; the pair (alpha, beta) maps to index alpha*dim(B)+beta.
Matrix tensor(const Matrix& a, const Matrix& b);

/// -sum lambda log2 lambda, in bits.
double von_neumann_entropy(const DensityOperator& s);

/// Tr S (log2 S - log2 T) when supp S is contained in supp T, else +inf.
double relative_entropy(const DensityOperator& s, const DensityOperator& t);

/// -log2 Tr S^{1-r} T^r for r in [0, 1]; +inf when the trace vanishes.
/// A zeroth power is the projector onto the operator's support.
double renyi_overlap(const DensityOperator& s, const DensityOperator& t, double r);

}  // namespace cqrel

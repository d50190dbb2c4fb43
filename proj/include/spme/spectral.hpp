#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "spme/grid.hpp"

namespace spme {

namespace detail {
class DstPlan;
}

// Closed-form eigenpairs of the Dirichlet Laplacian L_n = (1/h^2) tridiag(-1, 2, -1):
//   lambda_k = (4/h^2) sin^2(k pi h / 2),   m_k(i) = sqrt(2h) sin(k pi i h),   k = 1..n.
// The eigenvector matrix M is symmetric and orthogonal, so M^T = M = M^{-1}; both
// transforms are one DST-I. Immutable and shareable across threads.
class SpectralBasis {
public:
    static SpectralBasis build(const Grid& grid);

    // Test hook for negative controls: multiplies every eigenvalue by (1 + rel).
    static SpectralBasis build_perturbed(const Grid& grid, double rel);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return grid_.n(); }
    std::span<const double> eigenvalues() const { return eigenvalues_; }
    double eigenvalue(std::size_t k) const { return eigenvalues_.at(k - 1); }

    // Column k (1-based) of M, from the closed form.
    std::vector<double> eigenvector(std::size_t k) const;

    // Coefficients <v, m_k>, k = 1..n (equals M^T v).
    std::vector<double> to_modes(std::span<const double> v) const;
    // Synthesis sum_k c_k m_k (equals M c).
    std::vector<double> from_modes(std::span<const double> c) const;

private:
    SpectralBasis(const Grid& grid, std::vector<double> eigenvalues);

    Grid grid_;
    std::vector<double> eigenvalues_;
    std::shared_ptr<const detail::DstPlan> plan_;
};

// (L_n v)_i = (-v_{i-1} + 2 v_i - v_{i+1}) / h^2 with zero ghosts.
GridVec apply_laplacian(const GridVec& v);
void apply_laplacian(const Grid& grid, std::span<const double> v, std::span<double> out);

// L_n^theta v, theta in [-1, 1]. theta = 0 returns v unchanged.
GridVec apply_frac_laplacian(const SpectralBasis& basis, const GridVec& v, double theta);

// <u, v>_theta = h * u^T L_n^theta v.
double discrete_inner(const SpectralBasis& basis, const GridVec& u, const GridVec& v, double theta);

// sqrt(h * v^T L_n^theta v) = sqrt(h * sum_k lambda_k^theta <v, m_k>^2).
double discrete_norm(const SpectralBasis& basis, const GridVec& v, double theta);
double discrete_norm(const SpectralBasis& basis, std::span<const double> v, double theta);

// Sine coefficients <f, g_k>, g_k = sqrt(2) sin(k pi x), for k = 1..cutoff.
struct ContinuousSine {
    std::vector<double> coefficients;
    std::size_t cutoff() const { return coefficients.size(); }
};

// sqrt(sum_k w_k <f, g_k>^2) with w_k = lambda_k^s (homogeneous) or (1 + lambda_k)^s,
// lambda_k = (pi k)^2, s in [-1, 1].
double continuous_norm(const ContinuousSine& f, double s, bool homogeneous);

// Exact sine coefficients of the piecewise-linear interpolant of v for k = 1..cutoff.
ContinuousSine pl_sine_coefficients(const SpectralBasis& basis, const GridVec& v, std::size_t cutoff);

// Homogeneous H^theta_0 norm of the piecewise-linear interpolant of a grid vector.
// The DST coefficients of v determine every sine coefficient of the interpolant through
// aliasing, so the infinite series collapses to n weights per theta; the remaining alias
// sums are summed directly and closed with an integral tail estimate.
class PlNormWeights {
public:
    PlNormWeights(const Grid& grid, double theta);

    double theta() const { return theta_; }
    const Grid& grid() const { return grid_; }
    double norm(const SpectralBasis& basis, std::span<const double> v) const;

private:
    Grid grid_;
    double theta_;
    std::vector<double> weights_;
};

double pl_continuous_norm(const SpectralBasis& basis, const GridVec& v, double theta);

}  // namespace spme

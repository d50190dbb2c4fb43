#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace spme {

// Uniform interior mesh of [0, 1] with n nodes i*h, i = 1..n, and h = 1/(n+1).
// Boundary nodes 0 and n+1 carry the homogeneous Dirichlet value 0.
class Grid {
public:
    explicit Grid(std::size_t n);

    std::size_t n() const { return n_; }
    double h() const { return h_; }

    // Position of node i in 1..n (0 and n+1 give the boundary points).
    double node(std::size_t i) const { return static_cast<double>(i) * h_; }
    std::vector<double> nodes() const;

    bool operator==(const Grid& other) const { return n_ == other.n_; }

private:
    std::size_t n_;
    double h_;
};

Grid make_grid(std::size_t n);

// An n-vector tied to its grid. Component index 0 holds the value at node h,
// index n-1 the value at node n*h. The same vector is read as a piecewise-constant
// element of V_n or a piecewise-linear element with zero boundary values.
struct GridVec {
    Grid grid;
    std::vector<double> values;

    explicit GridVec(const Grid& g) : grid(g), values(g.n(), 0.0) {}
    GridVec(const Grid& g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    std::span<const double> span() const { return values; }
};

// Tabulated function: strictly increasing abscissae covering [0, 1].
struct Samples {
    std::vector<double> x;
    std::vector<double> y;
};

using ScalarFunction = std::function<double(double)>;

// Cell averages h^{-1} * integral of f over ((i-1)h, ih], i = 1..n.
GridVec project_pc(const ScalarFunction& f, const Grid& grid);
GridVec project_pc(const Samples& f, const Grid& grid);

// Nodal values of the L2-orthogonal projection of f onto the hat-function space.
// Solves the tridiagonal Gram system (2/3, 1/6) against the moments <f, hat_i>.
GridVec project_pl(const ScalarFunction& f, const Grid& grid);
GridVec project_pl(const Samples& f, const Grid& grid);

// Piecewise-linear interpolant of v (zero at x = 0 and x = 1) evaluated at x.
double eval_pl(const GridVec& v, double x);

// Samples the piecewise-linear interpolant of v_fine at the nodes of `coarse`.
GridVec restrict_to(const GridVec& v_fine, const Grid& coarse);

// Solves a symmetric constant-coefficient tridiagonal system (diag, off) in place.
void solve_toeplitz_tridiagonal(double diag, double off, std::span<double> rhs);

}  // namespace spme

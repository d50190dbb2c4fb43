#include "spme/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spme/error.hpp"
#include "spme/quadrature.hpp"

namespace spme {

Grid::Grid(std::size_t n) : n_(n), h_(0.0) {
    if (n == 0) {
        throw ConfigError("grid: interior node count must be positive");
    }
    h_ = 1.0 / static_cast<double>(n + 1);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        x[i] = node(i + 1);
    }
    return x;
}

Grid make_grid(std::size_t n) { return Grid(n); }

GridVec::GridVec(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n()) {
        throw ConfigError("grid vector: length " + std::to_string(values.size()) +
                          " does not match grid size " + std::to_string(grid.n()));
    }
}

namespace {

double checked(double value) {
    if (!std::isfinite(value)) {
        throw ConfigError("projection: non-finite function value");
    }
    return value;
}

void validate_samples(const Samples& s) {
    if (s.x.size() != s.y.size() || s.x.size() < 2) {
        throw ConfigError("samples: need at least two (x, y) pairs of equal length");
    }
    for (std::size_t j = 0; j < s.x.size(); ++j) {
        checked(s.x[j]);
        checked(s.y[j]);
        if (j > 0 && !(s.x[j] > s.x[j - 1])) {
            throw ConfigError("samples: abscissae must be strictly increasing");
        }
    }
    if (s.x.front() > 0.0 || s.x.back() < 1.0) {
        throw ConfigError("samples: abscissae must cover [0, 1]");
    }
}

// Piecewise-linear reading of tabulated samples.
double sample_at(const Samples& s, double x) {
    auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
    std::size_t j = static_cast<std::size_t>(std::distance(s.x.begin(), it));
    j = std::clamp<std::size_t>(j, 1, s.x.size() - 1);
    const double w = (x - s.x[j - 1]) / (s.x[j] - s.x[j - 1]);
    return (1.0 - w) * s.y[j - 1] + w * s.y[j];
}

// Exact integral over [a, b] of the linear interpolant of the samples times an
// affine weight c0 + c1*x. Trapezoid-style: integrate segment by segment.
double integrate_samples(const Samples& s, double a, double b, double c0, double c1) {
    std::vector<double> cuts{a};
    for (double xj : s.x) {
        if (xj > a && xj < b) {
            cuts.push_back(xj);
        }
    }
    cuts.push_back(b);
    double acc = 0.0;
    for (std::size_t j = 1; j < cuts.size(); ++j) {
        const double x0 = cuts[j - 1];
        const double x1 = cuts[j];
        const double f0 = sample_at(s, x0);
        const double f1 = sample_at(s, x1);
        const double w0 = c0 + c1 * x0;
        const double w1 = c0 + c1 * x1;
        // Product of two linear functions integrated exactly (Simpson is exact for quadratics).
        const double fm = 0.5 * (f0 + f1);
        const double wm = 0.5 * (w0 + w1);
        acc += (x1 - x0) / 6.0 * (f0 * w0 + 4.0 * fm * wm + f1 * w1);
    }
    return acc;
}

template <typename CellIntegral>
GridVec project_pc_impl(const Grid& grid, CellIntegral&& cell) {
    GridVec out(grid);
    const double h = grid.h();
    for (std::size_t i = 1; i <= grid.n(); ++i) {
        out[i - 1] = cell(grid.node(i - 1), grid.node(i)) / h;
    }
    return out;
}

// Moments h^{-1} * integral of f * hat_i, hat_i the unit-peak hat at node i.
template <typename HatMoment>
GridVec project_pl_impl(const Grid& grid, HatMoment&& moment) {
    GridVec out(grid);
    const double h = grid.h();
    for (std::size_t i = 1; i <= grid.n(); ++i) {
        out[i - 1] = moment(i) / h;
    }
    // Gram matrix of the unit-peak hats is h * tridiag(1/6, 2/3, 1/6).
    solve_toeplitz_tridiagonal(2.0 / 3.0, 1.0 / 6.0, out.values);
    return out;
}

}  // namespace

void solve_toeplitz_tridiagonal(double diag, double off, std::span<double> rhs) {
    const std::size_t n = rhs.size();
    if (n == 0) {
        return;
    }
    std::vector<double> c(n);
    double denom = diag;
    c[0] = off / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag - off * c[i - 1];
        c[i] = off / denom;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

GridVec project_pc(const ScalarFunction& f, const Grid& grid) {
    return project_pc_impl(grid, [&](double a, double b) {
        return quadrature::integrate([&](double x) { return checked(f(x)); }, a, b);
    });
}

GridVec project_pc(const Samples& f, const Grid& grid) {
    validate_samples(f);
    return project_pc_impl(grid, [&](double a, double b) { return integrate_samples(f, a, b, 1.0, 0.0); });
}

GridVec project_pl(const ScalarFunction& f, const Grid& grid) {
    const double h = grid.h();
    return project_pl_impl(grid, [&](std::size_t i) {
        const double xl = grid.node(i - 1);
        const double xc = grid.node(i);
        const double xr = grid.node(i + 1);
        const double left = quadrature::integrate([&](double x) { return checked(f(x)) * (x - xl) / h; }, xl, xc);
        const double right = quadrature::integrate([&](double x) { return checked(f(x)) * (xr - x) / h; }, xc, xr);
        return left + right;
    });
}

GridVec project_pl(const Samples& f, const Grid& grid) {
    validate_samples(f);
    const double h = grid.h();
    return project_pl_impl(grid, [&](std::size_t i) {
        const double xl = grid.node(i - 1);
        const double xc = grid.node(i);
        const double xr = grid.node(i + 1);
        return integrate_samples(f, xl, xc, -xl / h, 1.0 / h) + integrate_samples(f, xc, xr, xr / h, -1.0 / h);
    });
}

double eval_pl(const GridVec& v, double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ConfigError("eval_pl: x outside [0, 1]");
    }
    const std::size_t n = v.grid.n();
    const double s = x * static_cast<double>(n + 1);
    const double nearest = std::round(s);
    if (std::abs(s - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, nearest)) {
        const auto i = static_cast<std::size_t>(nearest);
        return (i == 0 || i > n) ? 0.0 : v[i - 1];
    }
    std::size_t j = static_cast<std::size_t>(std::floor(s));
    j = std::min(j, n);  // segment [j*h, (j+1)*h]
    const double left = (j == 0) ? 0.0 : v[j - 1];
    const double right = (j + 1 > n) ? 0.0 : v[j];
    const double w = s - static_cast<double>(j);
    return (1.0 - w) * left + w * right;
}

GridVec restrict_to(const GridVec& v_fine, const Grid& coarse) {
    GridVec out(coarse);
    if (coarse == v_fine.grid) {
        out.values = v_fine.values;
        return out;
    }
    for (std::size_t i = 1; i <= coarse.n(); ++i) {
        out[i - 1] = eval_pl(v_fine, coarse.node(i));
    }
    return out;
}

}  // namespace spme

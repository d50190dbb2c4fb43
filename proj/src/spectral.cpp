#include "spme/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "spme/error.hpp"

namespace spme {

namespace detail {

// FFTW planning is not thread-safe; execution through the new-array interface is.
std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class DstPlan {
public:
    explicit DstPlan(std::size_t n) : n_(n) {
        std::vector<double> in(n, 0.0);
        std::vector<double> out(n, 0.0);
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_r2r_1d(static_cast<int>(n), in.data(), out.data(), FFTW_RODFT00,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (plan_ == nullptr) {
            throw NumericalError("spectral: failed to create DST-I plan of size " + std::to_string(n));
        }
    }
    ~DstPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    DstPlan(const DstPlan&) = delete;
    DstPlan& operator=(const DstPlan&) = delete;

    // out_k = 2 sum_j in_j sin(pi (j+1)(k+1) / (n+1)).
    void execute(const double* in, double* out) const {
        // FFTW takes a non-const input pointer but does not modify it for out-of-place r2r.
        fftw_execute_r2r(plan_, const_cast<double*>(in), out);
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_plan plan_ = nullptr;
};

std::shared_ptr<const DstPlan> dst_plan(std::size_t n) {
    static std::mutex cache_mutex;
    static std::map<std::size_t, std::shared_ptr<const DstPlan>> cache;
    std::lock_guard lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_shared<const DstPlan>(n);
    }
    return slot;
}

}  // namespace detail

namespace {

void check_theta(double theta, const char* what) {
    if (!(theta >= -1.0 && theta <= 1.0)) {
        throw ConfigError(std::string(what) + ": exponent outside [-1, 1]");
    }
}

void check_grid(const SpectralBasis& basis, const Grid& grid) {
    if (!(basis.grid() == grid)) {
        throw ConfigError("spectral: vector grid does not match basis grid");
    }
}

std::vector<double> closed_form_eigenvalues(const Grid& grid) {
    const double h = grid.h();
    std::vector<double> lambda(grid.n());
    for (std::size_t k = 1; k <= grid.n(); ++k) {
        const double s = std::sin(static_cast<double>(k) * std::numbers::pi * h / 2.0);
        lambda[k - 1] = 4.0 / (h * h) * s * s;
    }
    return lambda;
}

}  // namespace

SpectralBasis::SpectralBasis(const Grid& grid, std::vector<double> eigenvalues)
    : grid_(grid), eigenvalues_(std::move(eigenvalues)), plan_(detail::dst_plan(grid.n())) {}

SpectralBasis SpectralBasis::build(const Grid& grid) { return SpectralBasis(grid, closed_form_eigenvalues(grid)); }

SpectralBasis SpectralBasis::build_perturbed(const Grid& grid, double rel) {
    auto lambda = closed_form_eigenvalues(grid);
    for (double& l : lambda) {
        l *= 1.0 + rel;
    }
    return SpectralBasis(grid, std::move(lambda));
}

std::vector<double> SpectralBasis::eigenvector(std::size_t k) const {
    if (k == 0 || k > grid_.n()) {
        throw ConfigError("spectral: eigenvector index out of range");
    }
    const double h = grid_.h();
    const double scale = std::sqrt(2.0 * h);
    std::vector<double> m(grid_.n());
    for (std::size_t i = 1; i <= grid_.n(); ++i) {
        m[i - 1] = scale * std::sin(static_cast<double>(k * i) * std::numbers::pi * h);
    }
    return m;
}

std::vector<double> SpectralBasis::to_modes(std::span<const double> v) const {
    if (v.size() != grid_.n()) {
        throw ConfigError("spectral: vector length does not match basis");
    }
    std::vector<double> out(v.size());
    plan_->execute(v.data(), out.data());
    const double scale = std::sqrt(grid_.h() / 2.0);
    for (double& c : out) {
        c *= scale;
    }
    return out;
}

std::vector<double> SpectralBasis::from_modes(std::span<const double> c) const {
    // M is symmetric, so synthesis is the same transform.
    return to_modes(c);
}

void apply_laplacian(const Grid& grid, std::span<const double> v, std::span<double> out) {
    const std::size_t n = grid.n();
    if (v.size() != n || out.size() != n) {
        throw ConfigError("apply_laplacian: grid mismatch");
    }
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    for (std::size_t i = 0; i < n; ++i) {
        const double left = (i == 0) ? 0.0 : v[i - 1];
        const double right = (i + 1 == n) ? 0.0 : v[i + 1];
        out[i] = (2.0 * v[i] - left - right) * inv_h2;
    }
}

GridVec apply_laplacian(const GridVec& v) {
    GridVec out(v.grid);
    apply_laplacian(v.grid, v.values, out.values);
    return out;
}

GridVec apply_frac_laplacian(const SpectralBasis& basis, const GridVec& v, double theta) {
    check_theta(theta, "apply_frac_laplacian");
    check_grid(basis, v.grid);
    if (theta == 0.0) {
        return v;
    }
    auto c = basis.to_modes(v.values);
    const auto lambda = basis.eigenvalues();
    for (std::size_t k = 0; k < c.size(); ++k) {
        c[k] *= std::pow(lambda[k], theta);
    }
    return GridVec(v.grid, basis.from_modes(c));
}

double discrete_inner(const SpectralBasis& basis, const GridVec& u, const GridVec& v, double theta) {
    check_theta(theta, "discrete_inner");
    check_grid(basis, u.grid);
    check_grid(basis, v.grid);
    const auto cu = basis.to_modes(u.values);
    const auto cv = basis.to_modes(v.values);
    const auto lambda = basis.eigenvalues();
    double acc = 0.0;
    for (std::size_t k = 0; k < cu.size(); ++k) {
        acc += std::pow(lambda[k], theta) * cu[k] * cv[k];
    }
    return basis.grid().h() * acc;
}

double discrete_norm(const SpectralBasis& basis, std::span<const double> v, double theta) {
    check_theta(theta, "discrete_norm");
    const double h = basis.grid().h();
    double acc = 0.0;
    if (theta == 0.0) {
        for (double x : v) {
            acc += x * x;
        }
        return std::sqrt(h * acc);
    }
    const auto c = basis.to_modes(v);
    const auto lambda = basis.eigenvalues();
    for (std::size_t k = 0; k < c.size(); ++k) {
        acc += std::pow(lambda[k], theta) * c[k] * c[k];
    }
    return std::sqrt(h * acc);
}

double discrete_norm(const SpectralBasis& basis, const GridVec& v, double theta) {
    check_grid(basis, v.grid);
    return discrete_norm(basis, v.values, theta);
}

double continuous_norm(const ContinuousSine& f, double s, bool homogeneous) {
    check_theta(s, "continuous_norm");
    double acc = 0.0;
    for (std::size_t k = 1; k <= f.cutoff(); ++k) {
        const double c = f.coefficients[k - 1];
        if (!std::isfinite(c)) {
            throw ConfigError("continuous_norm: non-finite coefficient");
        }
        const double lambda = std::pow(std::numbers::pi * static_cast<double>(k), 2);
        const double w = homogeneous ? std::pow(lambda, s) : std::pow(1.0 + lambda, s);
        acc += w * c * c;
    }
    return std::sqrt(acc);
}

ContinuousSine pl_sine_coefficients(const SpectralBasis& basis, const GridVec& v, std::size_t cutoff) {
    check_grid(basis, v.grid);
    const std::size_t n = v.grid.n();
    const double h = v.grid.h();
    const std::size_t period = 2 * (n + 1);
    // S_j = sum_i v_i sin(j pi i h) for j = 1..n, recovered from the DST.
    auto modes = basis.to_modes(v.values);
    const double unscale = 1.0 / std::sqrt(2.0 * h);
    ContinuousSine out;
    out.coefficients.resize(cutoff, 0.0);
    for (std::size_t k = 1; k <= cutoff; ++k) {
        const std::size_t r = k % period;
        double s = 0.0;
        if (r != 0 && r != n + 1) {
            s = (r <= n) ? modes[r - 1] * unscale : -modes[period - r - 1] * unscale;
        }
        const double w = static_cast<double>(k) * std::numbers::pi;
        const double sh = std::sin(w * h / 2.0);
        out.coefficients[k - 1] = std::numbers::sqrt2 * 4.0 * sh * sh / (w * w * h) * s;
    }
    return out;
}

PlNormWeights::PlNormWeights(const Grid& grid, double theta) : grid_(grid), theta_(theta), weights_(grid.n()) {
    check_theta(theta, "PlNormWeights");
    const std::size_t n = grid.n();
    const double h = grid.h();
    const double period = 2.0 * static_cast<double>(n + 1);
    const double expo = 2.0 * theta - 4.0;
    constexpr int kDirectTerms = 64;
    const double tail_start = kDirectTerms + 0.5;
    for (std::size_t j = 1; j <= n; ++j) {
        const double jd = static_cast<double>(j);
        double alias = std::pow(jd, expo);
        for (int m = 1; m <= kDirectTerms; ++m) {
            alias += std::pow(jd + period * m, expo) + std::pow(period * m - jd, expo);
        }
        // Tail of both alias branches: midpoint integral plus the first Euler-Maclaurin correction.
        for (double base : {jd + period * tail_start, period * tail_start - jd}) {
            alias += std::pow(base, expo + 1.0) / (-(expo + 1.0) * period);
            alias += expo * period * std::pow(base, expo - 1.0) / 24.0;
        }
        const double sh = std::sin(jd * std::numbers::pi * h / 2.0);
        // Coefficients arrive as <v, m_j> = sqrt(2h) S_j, hence the 1/(2h).
        weights_[j - 1] = 32.0 * std::pow(sh, 4) * std::pow(std::numbers::pi, expo) * alias / (h * h) / (2.0 * h);
    }
}

double PlNormWeights::norm(const SpectralBasis& basis, std::span<const double> v) const {
    if (!(basis.grid() == grid_)) {
        throw ConfigError("PlNormWeights: basis grid mismatch");
    }
    const auto c = basis.to_modes(v);
    double acc = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        acc += weights_[j] * c[j] * c[j];
    }
    return std::sqrt(acc);
}

double pl_continuous_norm(const SpectralBasis& basis, const GridVec& v, double theta) {
    check_grid(basis, v.grid);
    return PlNormWeights(v.grid, theta).norm(basis, v.values);
}

}  // namespace spme

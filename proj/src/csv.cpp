#include "spme/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace spme {

std::string format_double(double x) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,i,x,u,K\n";
    for (std::size_t j = 0; j < traj.snapshots(); ++j) {
        const std::string t = format_double(traj.times[j]);
        for (std::size_t i = 0; i < traj.grid.n(); ++i) {
            out << t << ',' << i + 1 << ',' << format_double(traj.grid.node(i + 1)) << ','
                << format_double(traj.u[j][i]) << ',' << format_double(traj.K[j][i]) << '\n';
        }
    }
}

void write_moments_csv(std::ostream& out, const MomentReport& report) {
    out << "n,p,functional,estimate,stderr,paths,stopped,clamps\n";
    for (const auto& r : report.rows) {
        out << r.n << ',' << format_double(r.p) << ',' << r.functional << ',' << format_double(r.estimate) << ','
            << format_double(r.stderr_) << ',' << r.paths << ',' << r.stopped << ',' << r.clamps << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "n_coarse,n_fine,gap,stderr,paths\n";
    for (const auto& r : report.rows) {
        out << r.n_coarse << ',' << r.n_fine << ',' << format_double(r.gap) << ',' << format_double(r.stderr_)
            << ',' << r.paths << '\n';
    }
}

void write_stickiness_csv(std::ostream& out, const StickinessReport& report) {
    out << "n,epsilon,prob,ci_lo,ci_hi,paths\n";
    for (const auto& r : report.rows) {
        out << r.n << ',' << format_double(r.epsilon) << ',' << format_double(r.prob) << ','
            << format_double(r.ci_lo) << ',' << format_double(r.ci_hi) << ',' << r.paths << '\n';
    }
}

template <typename Report>
void write_csv_file(const std::filesystem::path& dir, const std::string& name, const Report& report,
                    void (*writer)(std::ostream&, const Report&)) {
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    writer(out, report);
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

template void write_csv_file<Trajectory>(const std::filesystem::path&, const std::string&, const Trajectory&,
                                         void (*)(std::ostream&, const Trajectory&));
template void write_csv_file<MomentReport>(const std::filesystem::path&, const std::string&, const MomentReport&,
                                           void (*)(std::ostream&, const MomentReport&));
template void write_csv_file<ConvergenceReport>(const std::filesystem::path&, const std::string&,
                                                const ConvergenceReport&,
                                                void (*)(std::ostream&, const ConvergenceReport&));
template void write_csv_file<StickinessReport>(const std::filesystem::path&, const std::string&,
                                               const StickinessReport&,
                                               void (*)(std::ostream&, const StickinessReport&));

}  // namespace spme

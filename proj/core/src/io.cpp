#include "sica/io.hpp"

#include <array>
#include <charconv>
#include <stdexcept>

namespace sica {

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

void write_trajectory_csv(std::ostream& os, const std::vector<StatePoint>& states,
                          const ControlGrid& ctrl) {
    const TimeGrid& grid = ctrl.grid();
    os << "t,S,I,C,A,u\n";
    for (std::size_t n = 0; n < states.size(); ++n) {
        const auto& x = states[n];
        os << format_double(grid.time(n)) << ',' << format_double(x.S) << ',' << format_double(x.I)
           << ',' << format_double(x.C) << ',' << format_double(x.A) << ','
           << format_double(ctrl.at_node(n)) << '\n';
    }
}

void write_adjoint_csv(std::ostream& os, const std::vector<Vec4>& p, const std::vector<Vec4>& q,
                       const TimeGrid& grid) {
    os << "t,p1,p2,p3,p4,q1,q2\n";
    for (std::size_t n = 0; n < p.size(); ++n) {
        os << format_double(grid.time(n));
        for (double v : p[n])
            os << ',' << format_double(v);
        os << ',' << format_double(q[n][0]) << ',' << format_double(q[n][1]) << '\n';
    }
}

void write_control_csv(std::ostream& os, const ControlGrid& ctrl) {
    os << "t,u\n";
    for (std::size_t n = 0; n < ctrl.size(); ++n)
        os << format_double(ctrl.grid().time(n)) << ',' << format_double(ctrl[n]) << '\n';
}

void write_ksweep_csv(std::ostream& os, const std::vector<KSweepRow>& rows) {
    os << "k,J_mean,J_stderr,omega_low,omega_high,u_mean,u_max\n";
    for (const auto& r : rows)
        os << format_double(r.k) << ',' << format_double(r.J_mean) << ','
           << format_double(r.J_stderr) << ',' << format_double(r.omega_low) << ','
           << format_double(r.omega_high) << ',' << format_double(r.u_mean) << ','
           << format_double(r.u_max) << '\n';
}

AtomicFileWriter::AtomicFileWriter(std::filesystem::path path)
    : path_(std::move(path)), partial_(path_.string() + ".partial"),
      out_(partial_, std::ios::binary | std::ios::trunc) {
    if (!out_)
        throw std::runtime_error("cannot open " + partial_.string() + " for writing");
}

void AtomicFileWriter::commit() {
    if (committed_)
        return;
    out_.close();
    if (!out_)
        throw std::runtime_error("failed writing " + partial_.string());
    std::filesystem::rename(partial_, path_);
    committed_ = true;
}

} // namespace sica

#pragma once

#include "sica/adjoint.hpp"
#include "sica/control.hpp"
#include "sica/diagnostics.hpp"
#include "sica/model.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

namespace sica {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

// Header t,S,I,C,A,u; one row per node.
void write_trajectory_csv(std::ostream& os, const std::vector<StatePoint>& states,
                          const ControlGrid& ctrl);

// Header t,p1,p2,p3,p4,q1,q2; one row per node.
void write_adjoint_csv(std::ostream& os, const std::vector<Vec4>& p, const std::vector<Vec4>& q,
                       const TimeGrid& grid);

// Header t,u; one row per cell, t is the cell start.
void write_control_csv(std::ostream& os, const ControlGrid& ctrl);

// Header k,J_mean,J_stderr,omega_low,omega_high,u_mean,u_max.
void write_ksweep_csv(std::ostream& os, const std::vector<KSweepRow>& rows);

/// Writes to `<path>.partial` and renames onto `path` on commit(). An uncommitted
/// writer leaves the .partial file behind.
class AtomicFileWriter {
public:
    explicit AtomicFileWriter(std::filesystem::path path);
    AtomicFileWriter(const AtomicFileWriter&) = delete;
    AtomicFileWriter& operator=(const AtomicFileWriter&) = delete;

    std::ostream& stream() noexcept { return out_; }
    void commit();

private:
    std::filesystem::path path_;
    std::filesystem::path partial_;
    std::ofstream out_;
    bool committed_ = false;
};

} // namespace sica

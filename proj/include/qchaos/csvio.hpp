// csvio.hpp — readers/writers for the run artifacts: CSV time series and
// snapshots, phase-space distribution files, and the binary spinor container.
//
// All floating-point values are written in shortest round-trip form, so
// save -> load reproduces doubles bit-exactly.  Columns that a given run did
// not compute hold NaN in memory and serialize as empty cells.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "qchaos/phasespace.hpp"
#include "qchaos/quantum.hpp"
#include "qchaos/semiclassical.hpp"

namespace qchaos::csvio {

/** One row of the observables time series (fixed column order, see
 *  kObservablesHeader). */
struct ObservablesRow {
    double t = 0.0;
    double mean_x = NAN;
    double mean_p = NAN;
    double var_x = NAN;
    double var_p = NAN;
    double Delta_xp = NAN;   // width of the trajectory-averaged state
    double delta_xp = NAN;   // trajectory-averaged width
    double mean_n = NAN;
    double Delta_n = NAN;
    double sigma_z = NAN;
    double E_N = NAN;
    double purity = NAN;
    double N_minus = NAN;
};

inline constexpr const char* kObservablesHeader =
    "t,mean_x,mean_p,var_x,var_p,Delta_xp,delta_xp,mean_n,Delta_n,sigma_z,E_N,purity,N_minus";

void write_observables_csv(const std::string& path, const std::vector<ObservablesRow>& rows);
std::vector<ObservablesRow> read_observables_csv(const std::string& path);

/** Mean-field ensemble snapshots, one row per (time, trajectory):
 *  `t,traj,x,p,u,v,Z`. */
void write_twa_snapshots_csv(const std::string& path, const std::vector<double>& times,
                             const std::vector<std::vector<SemiclassicalState>>& snapshots);

/** Stroboscopic map, one row per (period, trajectory): `period,traj,x,p`. */
void write_stroboscopic_csv(const std::string& path,
                            const std::vector<std::vector<SemiclassicalState>>& per_period);

/** Jump records of a trajectory ensemble: `traj,jump_time`. */
void write_jumps_csv(const std::string& path, const std::vector<JumpRecord>& records);

/** Phase-space distribution as `x,p,value` triplets plus a small JSON sidecar
 *  (same path with ".json" appended) holding kind / source / time / axis
 *  metadata.  read_distribution() needs the sidecar. */
void write_distribution(const std::string& csv_path, const PhaseSpaceDistribution& dist);
PhaseSpaceDistribution read_distribution(const std::string& csv_path);

/** Self-describing binary spinor snapshot: magic, JSON header (grid metadata
 *  and time), then the two components as interleaved re/im little-endian
 *  64-bit floats. */
void write_spinor_snapshot(const std::string& path, const SpinorState& state);
SpinorState read_spinor_snapshot(const std::string& path);

}  // namespace qchaos::csvio

#pragma once

#include <string>

#include "scarfsim/dynamics.hpp"
#include "scarfsim/experiments.hpp"

// Serialization of reports and trajectories. All output is written by this
// module with 17-significant-digit decimal floats, so files round-trip doubles
// exactly and identical inputs produce bit-identical bytes.
namespace scarfsim::io {

std::string json_number(double v);  // "null" for non-finite values
std::string json_escape(const std::string& s);
std::string json_vec(const Vec3& v);

// CSV with header t,p1,p2,p3,E1,E2,E3,g,phi
std::string to_csv(const Trajectory& traj);

// Same fields plus termination metadata
std::string to_json(const Trajectory& traj);

std::string to_json(const StabilityReport& report);
std::string to_json(const EndowmentParams& params);
std::string to_json(const EndowmentMatrix& A);
std::string to_json(const EdgeFixedPoint& fp, const EdgeMinExcess& min_excess);
std::string to_json(const Figure1Result& result);
std::string to_json(const UniquenessReport& report);

std::string record_json(const TrajectoryRecord& rec);
std::string to_jsonl(const SweepOutcome& outcome);     // one record per line
std::string summary_json(const SweepOutcome& outcome);

}  // namespace scarfsim::io

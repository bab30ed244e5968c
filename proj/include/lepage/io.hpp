#pragma once

#include "lepage/epsilon.hpp"
#include "lepage/jumps.hpp"
#include "lepage/series.hpp"
#include "lepage/stats.hpp"

#include "json.hpp"

#include <ostream>
#include <span>
#include <string>

namespace lepage {

using json = nlohmann::json;

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

json to_json(const SampleMeta& m, bool with_trace = true);
json to_json(const PathSample& ps, bool with_trace = true);
json to_json(const MarkedPP& m);
json to_json(const TestReport& r);
json to_json(const IntegrabilityVerdict& v);

/// `path_id,t,value`, one row per grid point.
void write_paths_csv(std::ostream& os, std::span<const PathSample> paths);
/// `path_id,tau,mark` for paths with a jump record.
void write_jumps_csv(std::ostream& os, std::span<const PathSample> paths);
/// `tau,mark`.
void write_mpp_csv(std::ostream& os, const MarkedPP& m);

}  // namespace lepage

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rsle/dyson.hpp"
#include "rsle/hydro.hpp"
#include "rsle/loewner.hpp"

namespace rsle::io {

/// CSV writers.  All files use '.' as the decimal separator, a comma field
/// separator, LF line endings and a single header row.

void write_driving_csv(const std::string& path, const dyson::DrivingPath& dp);

/// One tracked point per file: t,re_g,im_g,re_logdg,im_logdg,swallowed.
void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<loewner::FlowPoint>& snapshots);

void write_mask_csv(const std::string& path, const loewner::HullMask& mask);

void write_curve_csv(const std::string& path, const hydro::HullCurve& curve);

void write_density_csv(const std::string& path, const std::vector<double>& phis,
                       const std::vector<double>& rhos);

/// SVG rendering of the hull boundary (curve plus its conjugate) inside the
/// unit circle, viewport [-1.05, 1.05]^2, with an optional grid-mask
/// overlay of swallowed points.
void write_hull_svg(const std::string& path, const hydro::HullCurve& curve,
                    const loewner::HullMask* mask = nullptr);

/// FNV-1a 64-bit hash of a file's bytes, as a fixed-width hex string.
std::string file_hash(const std::string& path);

} // namespace rsle::io

// SPDX-License-Identifier: Apache-2.0
//
// Scan ingestion/serialization and window operations.
//
// Scan CSV: header `frame,t,x,y,z`, one row per point. A row whose x,y,z
// fields are all empty (`3,0.3,,,`) declares a frame without returns.
// PCD series: directory of ASCII `NNNNNN.pcd` files plus `timestamps.csv`
// (`frame,t`); only the x, y and z fields are read.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "unlidar/types.hpp"

namespace unlidar {

enum class ScanFormat { Csv, PcdSeries };

ScanFormat parse_scan_format(const std::string& name);

ScanSequence load_sequence(const std::filesystem::path& path, ScanFormat format);

ScanSequence read_scan_csv(std::istream& in);
void write_scan_csv(std::ostream& out, const ScanSequence& seq);
void save_scan_csv(const std::filesystem::path& path, const ScanSequence& seq);

ScanSequence load_pcd_series(const std::filesystem::path& dir);
void save_pcd_series(const std::filesystem::path& dir, const ScanSequence& seq);

/// Union of frames w.start..w.end in frame order. Throws WindowOutOfRange.
PointSet superimpose(const ScanSequence& seq, const WindowSpec& w);

/// Points of `ps` originating from frame `n`; possibly empty.
PointSet restrict_to_frame(const PointSet& ps, int n);

/// Points of `ps` whose frame lies inside `w`.
PointSet restrict_to_window(const PointSet& ps, const WindowSpec& w);

inline WindowSpec full_window(const ScanSequence& seq) {
  return {0, seq.frame_count() - 1};
}

}  // namespace unlidar

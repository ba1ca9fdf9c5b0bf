// SPDX-License-Identifier: Apache-2.0

#include "unlidar/pointcloud.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string_view>
#include <vector>

#include "unlidar/error.hpp"
#include "unlidar/numfmt.hpp"

namespace fs = std::filesystem;

namespace unlidar {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_blank(std::string_view s) { return strip(s).empty(); }

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": " + what);
}

struct PendingFrame {
  double t = 0.0;
  std::vector<Point3T> points;
};

ScanSequence assemble(std::map<int, PendingFrame>& pending) {
  if (pending.empty()) throw Error(ErrorCode::EmptySequence, "no frames in input");
  std::vector<Frame> frames;
  frames.reserve(pending.size());
  int expected = 0;
  for (auto& [index, pf] : pending) {
    if (index != expected) {
      throw Error(ErrorCode::MalformedRecord, "missing frame " + std::to_string(expected));
    }
    frames.push_back(Frame{index, pf.t, std::move(pf.points)});
    ++expected;
  }
  return ScanSequence::from_frames(std::move(frames));
}

}  // namespace

ScanFormat parse_scan_format(const std::string& name) {
  if (name == "csv") return ScanFormat::Csv;
  if (name == "pcd_series") return ScanFormat::PcdSeries;
  throw Error(ErrorCode::InvalidConfig, "unknown scan format '" + name + "'");
}

ScanSequence read_scan_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::map<int, PendingFrame> pending;

  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto fields = split(line, ',');
    if (!have_header) {
      if (fields.size() != 5 || strip(fields[0]) != "frame" || strip(fields[1]) != "t" ||
          strip(fields[2]) != "x" || strip(fields[3]) != "y" || strip(fields[4]) != "z") {
        malformed(lineno, "expected header 'frame,t,x,y,z'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 5) malformed(lineno, "expected 5 fields, got " + std::to_string(fields.size()));

    int frame = 0;
    double t = 0.0;
    if (!parse_int(fields[0], frame) || frame < 0) malformed(lineno, "field 'frame' is not a valid index");
    if (!parse_finite(fields[1], t) || t < 0.0) malformed(lineno, "field 't' is not a valid timestamp");

    auto [it, inserted] = pending.try_emplace(frame, PendingFrame{t, {}});
    if (!inserted && it->second.t != t) {
      malformed(lineno, "frame " + std::to_string(frame) + " has conflicting timestamps");
    }

    const bool marker = is_blank(fields[2]) && is_blank(fields[3]) && is_blank(fields[4]);
    if (marker) continue;

    static constexpr const char* kNames[] = {"x", "y", "z"};
    Vector3 pos;
    for (int a = 0; a < 3; ++a) {
      double v = 0.0;
      if (!parse_finite(fields[static_cast<std::size_t>(2 + a)], v)) {
        malformed(lineno, std::string("field '") + kNames[a] + "' is not a finite number");
      }
      pos[a] = v;
    }
    it->second.points.push_back(Point3T{pos, t, frame});
  }
  if (!have_header) throw Error(ErrorCode::EmptySequence, "empty scan file");
  return assemble(pending);
}

void write_scan_csv(std::ostream& out, const ScanSequence& seq) {
  out << "frame,t,x,y,z\n";
  for (const Frame& f : seq.frames()) {
    const std::string prefix = std::to_string(f.index) + "," + format_time(f.timestamp) + ",";
    if (f.points.empty()) {
      out << prefix << ",,\n";
      continue;
    }
    for (const Point3T& p : f.points) {
      out << prefix << format_coord(p.position.x()) << ',' << format_coord(p.position.y()) << ','
          << format_coord(p.position.z()) << '\n';
    }
  }
}

void save_scan_csv(const fs::path& path, const ScanSequence& seq) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  write_scan_csv(out, seq);
}

namespace {

std::vector<Point3T> read_pcd_ascii(const fs::path& file, int frame, double t) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + file.string());

  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> fields;
  long declared = -1;
  bool data = false;
  auto bad = [&](const std::string& what) {
    throw Error(ErrorCode::MalformedRecord, file.string() + ":" + std::to_string(lineno) + ": " + what);
  };

  while (!data && std::getline(in, line)) {
    ++lineno;
    if (is_blank(line) || strip(line).front() == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "FIELDS") {
      std::string name;
      while (ss >> name) fields.push_back(name);
    } else if (key == "POINTS") {
      ss >> declared;
    } else if (key == "DATA") {
      std::string kind;
      ss >> kind;
      if (kind != "ascii") bad("only ASCII PCD data is supported");
      data = true;
    }
  }
  if (!data) bad("missing DATA line");

  int ix = -1, iy = -1, iz = -1;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i] == "x") ix = static_cast<int>(i);
    if (fields[i] == "y") iy = static_cast<int>(i);
    if (fields[i] == "z") iz = static_cast<int>(i);
  }
  if (ix < 0 || iy < 0 || iz < 0) bad("FIELDS must include x, y and z");

  std::vector<Point3T> points;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    std::string s;
    while (ss >> s) tok.push_back(s);
    if (tok.size() != fields.size()) bad("expected " + std::to_string(fields.size()) + " values");
    Vector3 pos;
    const int idx[3] = {ix, iy, iz};
    for (int a = 0; a < 3; ++a) {
      double v = 0.0;
      if (!parse_finite(tok[static_cast<std::size_t>(idx[a])], v)) bad("non-finite coordinate");
      pos[a] = v;
    }
    points.push_back(Point3T{pos, t, frame});
  }
  if (declared >= 0 && static_cast<std::size_t>(declared) != points.size()) {
    bad("POINTS declares " + std::to_string(declared) + " but file has " + std::to_string(points.size()));
  }
  return points;
}

std::string pcd_name(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d.pcd", frame);
  return buf;
}

}  // namespace

ScanSequence load_pcd_series(const fs::path& dir) {
  const fs::path stamps = dir / "timestamps.csv";
  std::ifstream in(stamps);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + stamps.string());

  std::map<int, PendingFrame> pending;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const auto f = split(line, ',');
    if (!have_header) {
      if (f.size() != 2 || strip(f[0]) != "frame" || strip(f[1]) != "t") {
        malformed(lineno, "expected header 'frame,t'");
      }
      have_header = true;
      continue;
    }
    int frame = 0;
    double t = 0.0;
    if (f.size() != 2 || !parse_int(f[0], frame) || frame < 0 || !parse_finite(f[1], t) || t < 0.0) {
      malformed(lineno, "expected 'frame,t'");
    }
    if (!pending.try_emplace(frame, PendingFrame{t, {}}).second) {
      malformed(lineno, "duplicate frame " + std::to_string(frame));
    }
  }
  for (auto& [frame, pf] : pending) {
    pf.points = read_pcd_ascii(dir / pcd_name(frame), frame, pf.t);
  }
  return assemble(pending);
}

void save_pcd_series(const fs::path& dir, const ScanSequence& seq) {
  fs::create_directories(dir);
  std::ofstream stamps(dir / "timestamps.csv", std::ios::binary);
  if (!stamps) throw Error(ErrorCode::Io, "cannot write " + (dir / "timestamps.csv").string());
  stamps << "frame,t\n";
  for (const Frame& f : seq.frames()) {
    stamps << f.index << ',' << format_time(f.timestamp) << '\n';
    std::ofstream out(dir / pcd_name(f.index), std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir / pcd_name(f.index)).string());
    out << "# .PCD v0.7 - Point Cloud Data file format\n"
        << "VERSION 0.7\nFIELDS x y z\nSIZE 8 8 8\nTYPE F F F\nCOUNT 1 1 1\n"
        << "WIDTH " << f.points.size() << "\nHEIGHT 1\nVIEWPOINT 0 0 0 1 0 0 0\n"
        << "POINTS " << f.points.size() << "\nDATA ascii\n";
    for (const Point3T& p : f.points) {
      out << format_coord(p.position.x()) << ' ' << format_coord(p.position.y()) << ' '
          << format_coord(p.position.z()) << '\n';
    }
  }
}

ScanSequence load_sequence(const fs::path& path, ScanFormat format) {
  if (format == ScanFormat::PcdSeries) return load_pcd_series(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return read_scan_csv(in);
}

PointSet superimpose(const ScanSequence& seq, const WindowSpec& w) {
  if (w.start < 0 || w.start > w.end || w.end >= seq.frame_count()) {
    throw Error(ErrorCode::WindowOutOfRange,
                "window [" + std::to_string(w.start) + "," + std::to_string(w.end) +
                    "] outside 0.." + std::to_string(seq.frame_count() - 1));
  }
  PointSet ps;
  std::size_t n = 0;
  for (int i = w.start; i <= w.end; ++i) n += seq.frame(i).points.size();
  ps.points.reserve(n);
  for (int i = w.start; i <= w.end; ++i) {
    const auto& pts = seq.frame(i).points;
    ps.points.insert(ps.points.end(), pts.begin(), pts.end());
  }
  return ps;
}

PointSet restrict_to_frame(const PointSet& ps, int n) {
  PointSet out;
  std::copy_if(ps.points.begin(), ps.points.end(), std::back_inserter(out.points),
               [n](const Point3T& p) { return p.frame_index == n; });
  return out;
}

PointSet restrict_to_window(const PointSet& ps, const WindowSpec& w) {
  PointSet out;
  std::copy_if(ps.points.begin(), ps.points.end(), std::back_inserter(out.points),
               [&w](const Point3T& p) { return w.contains(p.frame_index); });
  return out;
}

}  // namespace unlidar

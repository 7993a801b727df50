#pragma once

// Output plumbing: CSV files with '#'-prefixed metadata headers, a small
// raster writer for heatmaps, and checksums for the run manifest. All
// formatting is locale-independent and deterministic.

#include "qps/planck.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qps::io {

std::string software_version();

// Shortest round-trip decimal representation.
std::string format_double(double v);

struct Metadata {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, int value);
  void add_grid(const PhaseSpaceGrid& grid);
};

void write_csv(const std::filesystem::path& path, const Metadata& meta,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

// Section grid as rows (m, n, Q, P, value) with m the q index, n the p index.
void write_section_csv(const std::filesystem::path& path, const Metadata& meta,
                       const PhaseSpaceGrid& grid, const RVector& values,
                       double coordinate_scale = 1.0);

struct SectionData {
  int l_q = 0;
  int l_p = 0;
  RVector values;
};

// Reads back a section CSV written by write_section_csv; throws on a ragged
// or incomplete grid.
SectionData read_section_csv(const std::filesystem::path& path);

// Linear color scale over [min, max]; one image block per cell, q along x,
// p along y (low p at the bottom). Plain binary PPM.
void write_heatmap_ppm(const std::filesystem::path& path, int l_q, int l_p,
                       const RVector& values, int block_size = 12);

std::uint64_t fnv1a_checksum(const std::filesystem::path& path);

}  // namespace qps::io

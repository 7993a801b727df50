#include "qps/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#ifndef QPS_VERSION
#define QPS_VERSION "unknown"
#endif

namespace qps::io {

std::string software_version() { return QPS_VERSION; }

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void Metadata::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}
void Metadata::add(const std::string& key, double value) { add(key, format_double(value)); }
void Metadata::add(const std::string& key, int value) { add(key, std::to_string(value)); }

void Metadata::add_grid(const PhaseSpaceGrid& grid) {
  add("grid.q_origin", grid.q_origin);
  add("grid.p_origin", grid.p_origin);
  add("grid.q_extent", grid.q_extent);
  add("grid.p_extent", grid.p_extent);
  add("grid.l_q", grid.l_q);
  add("grid.l_p", grid.l_p);
  add("grid.hbar", grid.hbar);
}

namespace {
std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path.string());
  return out;
}

void write_header(std::ofstream& out, const Metadata& meta) {
  out << "# version = " << software_version() << "\n";
  for (const auto& [key, value] : meta.entries) out << "# " << key << " = " << value << "\n";
}
}  // namespace

void write_csv(const std::filesystem::path& path, const Metadata& meta,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  write_header(out, meta);
  for (std::size_t c = 0; c < columns.size(); ++c)
    out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("write_csv: row width does not match the column count");
    for (std::size_t c = 0; c < row.size(); ++c)
      out << format_double(row[c]) << (c + 1 < row.size() ? "," : "\n");
  }
}

void write_section_csv(const std::filesystem::path& path, const Metadata& meta,
                       const PhaseSpaceGrid& grid, const RVector& values,
                       double coordinate_scale) {
  if (values.size() != grid.cell_count())
    throw std::invalid_argument("write_section_csv: value count does not match the grid");
  std::vector<std::vector<double>> rows;
  rows.reserve(grid.cell_count());
  for (int iq = 0; iq < grid.l_q; ++iq) {
    for (int ip = 0; ip < grid.l_p; ++ip) {
      const int j = grid.cell_index(iq, ip);
      const PhasePoint c = grid.cell_center(j);
      rows.push_back({static_cast<double>(iq), static_cast<double>(ip),
                      c.q * coordinate_scale, c.p * coordinate_scale, values(j)});
    }
  }
  write_csv(path, meta, {"m", "n", "Q", "P", "value"}, rows);
}

SectionData read_section_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open section CSV " + path.string());
  SectionData data;
  std::vector<std::tuple<int, int, double>> cells;
  int max_m = -1, max_n = -1;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {  // column names
      saw_header = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(row, field, ',')) vals.push_back(std::stod(field));
    if (vals.size() != 5)
      throw std::runtime_error("read_section_csv: expected 5 columns, got " +
                               std::to_string(vals.size()));
    const int m = static_cast<int>(vals[0]), n = static_cast<int>(vals[1]);
    cells.emplace_back(m, n, vals[4]);
    max_m = std::max(max_m, m);
    max_n = std::max(max_n, n);
  }
  data.l_q = max_m + 1;
  data.l_p = max_n + 1;
  if (data.l_q <= 0 || data.l_p <= 0 ||
      static_cast<int>(cells.size()) != data.l_q * data.l_p)
    throw std::runtime_error("read_section_csv: ragged or incomplete grid in " + path.string());
  data.values = RVector::Zero(data.l_q * data.l_p);
  std::vector<char> seen(cells.size(), 0);
  for (const auto& [m, n, v] : cells) {
    const int j = m * data.l_p + n;
    if (seen[j]) throw std::runtime_error("read_section_csv: duplicate cell in " + path.string());
    seen[j] = 1;
    data.values(j) = v;
  }
  return data;
}

namespace {
// three-anchor linear gradient: dark blue -> teal -> yellow
void colormap(double u, unsigned char rgb[3]) {
  const double anchors[3][3] = {{0.05, 0.03, 0.35}, {0.13, 0.57, 0.55}, {0.99, 0.91, 0.14}};
  u = std::clamp(u, 0.0, 1.0);
  const double s = u * 2.0;
  const int k = s < 1.0 ? 0 : 1;
  const double w = s - k;
  for (int c = 0; c < 3; ++c) {
    const double v = anchors[k][c] * (1.0 - w) + anchors[k + 1][c] * w;
    rgb[c] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
}
}  // namespace

void write_heatmap_ppm(const std::filesystem::path& path, int l_q, int l_p,
                       const RVector& values, int block_size) {
  if (values.size() != static_cast<Eigen::Index>(l_q) * l_p)
    throw std::invalid_argument("write_heatmap_ppm: value count does not match the grid");
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  const double span = hi > lo ? hi - lo : 1.0;

  const int width = l_q * block_size;
  const int height = l_p * block_size;
  std::ofstream out = open_out(path);
  out << "P6\n" << width << " " << height << "\n255\n";
  std::string row(static_cast<std::size_t>(width) * 3, '\0');
  for (int y = 0; y < height; ++y) {
    const int ip = l_p - 1 - y / block_size;  // high p at the top
    for (int x = 0; x < width; ++x) {
      const int iq = x / block_size;
      unsigned char rgb[3];
      colormap((values(iq * l_p + ip) - lo) / span, rgb);
      row[3 * x] = static_cast<char>(rgb[0]);
      row[3 * x + 1] = static_cast<char>(rgb[1]);
      row[3 * x + 2] = static_cast<char>(rgb[2]);
    }
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

std::uint64_t fnv1a_checksum(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for checksum: " + path.string());
  std::uint64_t hash = 1469598103934665603ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
  }
  return hash;
}

}  // namespace qps::io

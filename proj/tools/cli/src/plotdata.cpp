#include <reslab/cli/plotdata.hpp>

#include <reslab/error.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace reslab::cli {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw Error(ErrorCode::InvalidArgument, "artifact has no column '" + name + "'");
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open artifact '" + path.string() + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoError, "empty artifact '" + path.string() + "'");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& c : split(line)) row.push_back(std::stod(c));
    if (row.size() != t.header.size()) throw Error(ErrorCode::IoError, "ragged row in '" + path.string() + "'");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void emit_plotdata(const std::filesystem::path& artifact, std::string_view kind, std::ostream& out) {
  if (kind != "counting-curve" && kind != "resonance-set" && kind != "dimension-fit" && kind != "modulus-counting")
    throw Error(ErrorCode::UnknownArtifactKind, "unknown plot kind '" + std::string(kind) + "'");
  const Table t = read_table(artifact);
  if (kind == "counting-curve") {
    const auto h = t.col("h"), c = t.col("count");
    out << "log10_inv_h,log10_count\n";
    for (const auto& r : t.rows)
      if (r[c] > 0) out << g17(std::log10(1.0 / r[h])) << ',' << g17(std::log10(r[c])) << '\n';
  } else if (kind == "resonance-set") {
    const auto h = t.col("h"), re = t.col("re_z"), im = t.col("im_z");
    out << "re_z_over_h,im_z_over_h\n";
    for (const auto& r : t.rows) out << g17(r[re] / r[h]) << ',' << g17(r[im] / r[h]) << '\n';
  } else if (kind == "dimension-fit") {
    const auto e = t.col("eps"), c = t.col("count");
    out << "log10_inv_eps,log10_count\n";
    for (const auto& r : t.rows)
      if (r[c] > 0) out << g17(std::log10(1.0 / r[e])) << ',' << g17(std::log10(r[c])) << '\n';
  } else {
    const auto n = t.col("N"), rr = t.col("r"), c = t.col("count");
    out << "r,log10_N,log10_count\n";
    for (const auto& r : t.rows)
      if (r[c] > 0) out << g17(r[rr]) << ',' << g17(std::log10(r[n])) << ',' << g17(std::log10(r[c])) << '\n';
  }
}

}  // namespace reslab::cli

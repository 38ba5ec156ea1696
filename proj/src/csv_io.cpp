#include "rh/csv_io.hpp"

#include "rh/hash.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace rh {
namespace {

const char* const kDecisionHeader =
    "x,y,w,h,method,verdict,statistic,f_a,f_b,f_residual,f_min_eig,f_pixels,f_converged,"
    "o_a,o_b,o_residual,o_min_eig,o_pixels,o_converged,range_scale";
const char* const kPointHeader = "x,y,X,Y,Z,d,source,cluster";
const char* const kStixelHeader = "u,width,v_top,v_bottom,median_disparity,z,cluster";

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Reads the header line and the data rows of a fixed-width table.
std::vector<std::vector<std::string>> read_rows(std::istream& in, const char* header, std::size_t fields) {
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(ErrorCode::MalformedHeader, std::string("expected CSV header '") + header + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != fields) throw Error(ErrorCode::TruncatedData, "CSV row with wrong field count: " + line);
    rows.push_back(std::move(cells));
  }
  return rows;
}

double dbl(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end) throw Error(ErrorCode::TruncatedData, "bad number '" + s + "'");
  return v;
}

int integer(const std::string& s) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (s.empty() || *end) throw Error(ErrorCode::TruncatedData, "bad integer '" + s + "'");
  return static_cast<int>(v);
}

Verdict parse_verdict(const std::string& s) {
  if (s == "obstacle") return Verdict::kObstacle;
  if (s == "free_space") return Verdict::kFreeSpace;
  if (s == "no_decision") return Verdict::kNoDecision;
  throw Error(ErrorCode::TruncatedData, "unknown verdict '" + s + "'");
}

void write_fit(std::ostream& out, const HypothesisFit& f) {
  out << num(f.line.a) << ',' << num(f.line.b) << ',' << num(f.residual_sum) << ',' << num(f.min_eigenvalue) << ','
      << f.pixels << ',' << (f.converged ? 1 : 0);
}

void read_fit(const std::vector<std::string>& r, std::size_t at, Method m, double range_scale, HypothesisFit& f) {
  f.method = m;
  f.line = {dbl(r[at]), dbl(r[at + 1])};
  f.residual_sum = dbl(r[at + 2]);
  f.min_eigenvalue = dbl(r[at + 3]);
  f.pixels = integer(r[at + 4]);
  f.converged = integer(r[at + 5]) != 0;
  f.range_scale = range_scale;
}

}  // namespace

void write_decisions_csv(std::ostream& out, const std::vector<PatchDecision>& decisions) {
  out << kDecisionHeader << '\n';
  for (const auto& d : decisions) {
    out << d.patch.xc << ',' << d.patch.yc << ',' << d.patch.w << ',' << d.patch.h << ','
        << to_string(d.fit_f.method) << ',' << to_string(d.verdict) << ',' << num(d.statistic) << ',';
    write_fit(out, d.fit_f);
    out << ',';
    write_fit(out, d.fit_o);
    out << ',' << num(d.fit_f.range_scale) << '\n';
  }
}

std::vector<PatchDecision> read_decisions_csv(std::istream& in) {
  std::vector<PatchDecision> out;
  for (const auto& r : read_rows(in, kDecisionHeader, 20)) {
    PatchDecision d;
    d.patch = {integer(r[0]), integer(r[1]), integer(r[2]), integer(r[3])};
    const Method m = parse_method(r[4]);
    d.verdict = parse_verdict(r[5]);
    d.statistic = dbl(r[6]);
    const double range_scale = dbl(r[19]);
    read_fit(r, 7, m, range_scale, d.fit_f);
    read_fit(r, 13, m, range_scale, d.fit_o);
    out.push_back(d);
  }
  return out;
}

void write_points_csv(std::ostream& out, const std::vector<ObstaclePoint>& points) {
  out << kPointHeader << '\n';
  for (const auto& p : points) {
    out << p.x << ',' << p.y << ',' << num(p.p.x()) << ',' << num(p.p.y()) << ',' << num(p.p.z()) << ','
        << num(p.d) << ',' << to_string(p.source) << ',' << p.cluster << '\n';
  }
}

std::vector<ObstaclePoint> read_points_csv(std::istream& in) {
  std::vector<ObstaclePoint> out;
  for (const auto& r : read_rows(in, kPointHeader, 8)) {
    ObstaclePoint p;
    p.x = integer(r[0]);
    p.y = integer(r[1]);
    p.p = {dbl(r[2]), dbl(r[3]), dbl(r[4])};
    p.d = dbl(r[5]);
    p.source = parse_point_source(r[6]);
    p.cluster = integer(r[7]);
    out.push_back(p);
  }
  return out;
}

void write_stixels_csv(std::ostream& out, const std::vector<CStix>& stixels) {
  out << kStixelHeader << '\n';
  for (const auto& s : stixels) {
    out << s.u << ',' << s.width << ',' << s.v_top << ',' << s.v_bottom << ',' << num(s.median_disparity) << ','
        << num(s.z) << ',' << s.cluster << '\n';
  }
}

std::vector<CStix> read_stixels_csv(std::istream& in) {
  std::vector<CStix> out;
  for (const auto& r : read_rows(in, kStixelHeader, 7)) {
    CStix s;
    s.u = integer(r[0]);
    s.width = integer(r[1]);
    s.v_top = integer(r[2]);
    s.v_bottom = integer(r[3]);
    s.median_disparity = dbl(r[4]);
    s.z = dbl(r[5]);
    s.cluster = integer(r[6]);
    out.push_back(s);
  }
  return out;
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return hex64(fnv1a64(ss.str()));
}

Json make_manifest(const std::string& command, const Json& config, const std::vector<std::filesystem::path>& inputs,
                   const std::vector<std::filesystem::path>& outputs, const std::filesystem::path& run_dir) {
  Json in = Json::array();
  for (const auto& p : inputs) in.push_back({{"path", p.generic_string()}, {"fnv1a64", hash_file(p)}});
  Json out = Json::array();
  for (const auto& p : outputs) out.push_back({{"file", p.lexically_relative(run_dir).generic_string()}, {"fnv1a64", hash_file(p)}});
  return {{"command", command}, {"config", config}, {"inputs", in}, {"outputs", out}};
}

}  // namespace rh

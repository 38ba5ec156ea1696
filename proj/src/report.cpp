#include "rh/report.hpp"

#include "rh/error.hpp"
#include "rh/hash.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <vector>

namespace rh {
namespace {

const char* const kCommon =
    "config_hash,method,level,patch_w,patch_h,stride,downsample,lambda_min,tau,phi_deg,h_min,h_max,"
    "tp,fp,gt_obstacles,gt_freespace,instances,fp_stixels,frames";

std::string axis_names(SweepLevel level) {
  return level == SweepLevel::kPixel ? "fpr,tpr" : "fp_per_frame,iint";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double to_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end) throw Error(ErrorCode::TruncatedData, "bad number '" + s + "' in sweep CSV");
  return v;
}

long long to_int(const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end) throw Error(ErrorCode::TruncatedData, "bad integer '" + s + "' in sweep CSV");
  return v;
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << kCommon << ',' << axis_names(result.level) << ",on_hull\n";
  for (const auto& p : result.points) {
    const auto& c = p.config;
    out << hex64(config_hash(c)) << ',' << c.method << ',' << to_string(result.level) << ',' << c.patch_w << ','
        << c.patch_h << ',' << c.stride << ',' << c.downsample << ',' << num(c.lambda_min) << ',' << num(c.tau)
        << ',' << num(c.phi_deg) << ',' << num(c.h_min) << ',' << num(c.h_max) << ',' << p.counts.tp << ','
        << p.counts.fp << ',' << p.counts.gt_obstacles << ',' << p.counts.gt_freespace << ','
        << p.instance.instances << ',' << p.instance.fp_stixels << ',' << p.instance.frames << ','
        << num(p.point.x) << ',' << num(p.point.y) << ',' << (p.on_hull ? 1 : 0) << '\n';
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw Error(ErrorCode::MalformedHeader, "empty sweep CSV");
  SweepResult r;
  if (header == std::string(kCommon) + ',' + axis_names(SweepLevel::kPixel) + ",on_hull") {
    r.level = SweepLevel::kPixel;
  } else if (header == std::string(kCommon) + ',' + axis_names(SweepLevel::kInstance) + ",on_hull") {
    r.level = SweepLevel::kInstance;
  } else {
    throw Error(ErrorCode::MalformedHeader, "unexpected sweep CSV header");
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 22) throw Error(ErrorCode::TruncatedData, "sweep CSV row has the wrong number of fields");
    SweepPoint p;
    auto& c = p.config;
    c.method = f[1];
    if (parse_level(f[2]) != r.level) throw Error(ErrorCode::TruncatedData, "mixed levels in sweep CSV");
    c.patch_w = static_cast<int>(to_int(f[3]));
    c.patch_h = static_cast<int>(to_int(f[4]));
    c.stride = static_cast<int>(to_int(f[5]));
    c.downsample = static_cast<int>(to_int(f[6]));
    c.lambda_min = to_double(f[7]);
    c.tau = to_double(f[8]);
    c.phi_deg = to_double(f[9]);
    c.h_min = to_double(f[10]);
    c.h_max = to_double(f[11]);
    if (f[0] != hex64(config_hash(c))) throw Error(ErrorCode::TruncatedData, "config hash mismatch in sweep CSV");
    p.counts.sub = std::max(1, c.stride);
    p.counts.dwn = std::max(1, c.downsample);
    p.counts.tp = static_cast<std::uint64_t>(to_int(f[12]));
    p.counts.fp = static_cast<std::uint64_t>(to_int(f[13]));
    p.counts.gt_obstacles = static_cast<std::uint64_t>(to_int(f[14]));
    p.counts.gt_freespace = static_cast<std::uint64_t>(to_int(f[15]));
    p.instance.instances = static_cast<std::uint64_t>(to_int(f[16]));
    p.instance.fp_stixels = static_cast<std::uint64_t>(to_int(f[17]));
    p.instance.frames = static_cast<std::uint64_t>(to_int(f[18]));
    p.point = {to_double(f[19]), to_double(f[20])};
    if (r.level == SweepLevel::kInstance) {
      p.instance.fp_per_frame = p.point.x;
      p.instance.iint = p.point.y;
    }
    p.on_hull = to_int(f[21]) != 0;
    if (r.method.empty()) r.method = c.method;
    r.points.push_back(p);
  }
  finalize_hull(r);
  return r;
}

void write_sweep_svg(std::ostream& out, const SweepResult& result) {
  constexpr double W = 800, H = 600, left = 80, right = 30, top = 40, bottom = 70;
  double xmax = 1.0;
  if (result.level == SweepLevel::kInstance) {
    for (const auto& p : result.points) xmax = std::max(xmax, p.point.x);
    xmax *= 1.05;
  }
  const auto sx = [&](double x) { return left + (W - left - right) * x / xmax; };
  const auto sy = [&](double y) { return H - bottom - (H - top - bottom) * y; };
  const char* xlabel = result.level == SweepLevel::kPixel ? "false positive rate" : "false positive stixels per frame";
  const char* ylabel = result.level == SweepLevel::kPixel ? "true positive rate" : "instance intersection";

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << result.method << " ("
      << to_string(result.level) << ")</text>\n";
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << num(sx(0)) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(sx(xmax)) << "\" y2=\""
      << num(sy(0)) << "\"/>\n";
  out << "<line x1=\"" << num(sx(0)) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(sx(0)) << "\" y2=\""
      << num(sy(1)) << "\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double tx = xmax * i / 5.0, ty = i / 5.0;
    out << "<line x1=\"" << num(sx(tx)) << "\" y1=\"" << num(sy(0)) << "\" x2=\"" << num(sx(tx)) << "\" y2=\""
        << num(sy(0) + 6) << "\"/>\n";
    out << "<line x1=\"" << num(sx(0) - 6) << "\" y1=\"" << num(sy(ty)) << "\" x2=\"" << num(sx(0)) << "\" y2=\""
        << num(sy(ty)) << "\"/>\n";
  }
  out << "</g>\n<g font-size=\"12\">\n";
  char buf[64];
  for (int i = 0; i <= 5; ++i) {
    const double tx = xmax * i / 5.0, ty = i / 5.0;
    std::snprintf(buf, sizeof buf, "%.2f", tx);
    out << "<text x=\"" << num(sx(tx)) << "\" y=\"" << num(sy(0) + 22) << "\" text-anchor=\"middle\">" << buf
        << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.1f", ty);
    out << "<text x=\"" << num(sx(0) - 10) << "\" y=\"" << num(sy(ty) + 4) << "\" text-anchor=\"end\">" << buf
        << "</text>\n";
  }
  out << "<text x=\"" << num(sx(xmax / 2)) << "\" y=\"" << num(H - 20) << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
  out << "<text x=\"20\" y=\"" << num(sy(0.5)) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << num(sy(0.5)) << ")\">" << ylabel << "</text>\n";
  out << "</g>\n";

  if (!result.hull.empty()) {
    out << "<polyline fill=\"none\" stroke=\"#c03020\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < result.hull.size(); ++i) {
      out << (i ? " " : "") << num(sx(result.hull[i].x)) << ',' << num(sy(result.hull[i].y));
    }
    out << "\"/>\n";
  }
  out << "<g fill=\"#2060c0\">\n";
  for (const auto& p : result.points) {
    out << "<circle cx=\"" << num(sx(p.point.x)) << "\" cy=\"" << num(sy(p.point.y)) << "\" r=\"3\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

void emit_report(const SweepResult& result, const std::filesystem::path& stem) {
  auto csv_path = stem;
  csv_path += ".csv";
  auto svg_path = stem;
  svg_path += ".svg";
  std::ofstream csv(csv_path, std::ios::binary);
  std::ofstream svg(svg_path, std::ios::binary);
  if (!csv || !svg) throw Error(ErrorCode::IoFailure, "cannot write report next to " + stem.string());
  write_sweep_csv(csv, result);
  write_sweep_svg(svg, result);
  if (!csv.flush() || !svg.flush()) throw Error(ErrorCode::IoFailure, "write failed for " + stem.string());
}

}  // namespace rh

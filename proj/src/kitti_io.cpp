#include "uniloc/kitti_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "uniloc/errors.hpp"

namespace uniloc {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_le32(std::uint32_t v, std::vector<std::uint8_t>& out) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xffu));
}

}  // namespace

std::string format_fixed(double v, int decimals) {
  if (v == 0.0) v = 0.0;  // no "-0.000000"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string format_exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view token, std::size_t line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || token.empty())
    throw ParseError("expected a number, got '" + std::string(token) + "'", line);
  return v;
}

long long parse_int(std::string_view token, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
    throw ParseError("expected an integer, got '" + std::string(token) + "'", line);
  return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Labels

std::vector<KittiLabel> parse_labels(std::string_view text) {
  std::vector<KittiLabel> labels;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const auto tok = split_ws(lines[n]);
    if (tok.empty()) continue;
    if (tok.size() != 15 && tok.size() != 16)
      throw ParseError("expected 15 or 16 fields, got " + std::to_string(tok.size()), line_no);
    KittiLabel l;
    l.type = std::string(tok[0]);
    l.truncated = parse_double(tok[1], line_no);
    // Occlusion is an integer in the format, but some writers emit "0.00".
    const double occ = parse_double(tok[2], line_no);
    if (occ != std::floor(occ)) throw ParseError("occlusion must be an integer", line_no);
    l.occluded = static_cast<int>(occ);
    l.alpha = parse_double(tok[3], line_no);
    for (int i = 0; i < 4; ++i) l.bbox[i] = parse_double(tok[4 + i], line_no);
    for (int i = 0; i < 3; ++i) l.dims_hwl[i] = parse_double(tok[8 + i], line_no);
    for (int i = 0; i < 3; ++i) l.location[i] = parse_double(tok[11 + i], line_no);
    l.rotation_y = parse_double(tok[14], line_no);
    if (tok.size() == 16) l.score = parse_double(tok[15], line_no);
    for (double d : l.dims_hwl)
      if (d < 0.0) throw ParseError("negative dimension", line_no);
    labels.push_back(std::move(l));
  }
  return labels;
}

std::string format_label(const KittiLabel& l) {
  std::string s = l.type;
  auto add = [&s](double v) { s += ' ' + format_fixed(v); };
  add(l.truncated);
  s += ' ' + std::to_string(l.occluded);
  add(l.alpha);
  for (double v : l.bbox) add(v);
  for (double v : l.dims_hwl) add(v);
  for (double v : l.location) add(v);
  add(l.rotation_y);
  if (l.score) add(*l.score);
  return s;
}

std::string write_labels(std::span<const KittiLabel> labels) {
  std::string out;
  for (const KittiLabel& l : labels) out += format_label(l) + '\n';
  return out;
}

ObjectBox3D label_to_box(const KittiLabel& l) {
  const double h = l.dims_hwl[0], w = l.dims_hwl[1], len = l.dims_hwl[2];
  if (!(h > 0.0) || !(w > 0.0) || !(len > 0.0)) throw DomainError("label has nonpositive dimensions");
  // y points down: the volumetric center sits h/2 above the bottom face.
  const Vec3 center(l.location[0], l.location[1] - 0.5 * h, l.location[2]);
  return {center, Vec3(w, h, len), l.rotation_y + 0.5 * kPi};
}

KittiLabel box_to_label(const ObjectBox3D& box, std::string type, const Roi2D& bbox,
                        std::optional<double> score) {
  KittiLabel l;
  l.type = std::move(type);
  l.rotation_y = normalize_angle(box.yaw() - 0.5 * kPi);
  l.alpha = l.rotation_y;
  if (box.center().z() > 0.0) l.alpha = normalize_angle(l.rotation_y - std::atan2(box.center().x(), box.center().z()));
  l.bbox = {bbox.left(), bbox.top(), bbox.right(), bbox.bottom()};
  l.dims_hwl = {box.height(), box.width(), box.length()};
  l.location = {box.center().x(), box.center().y() + 0.5 * box.height(), box.center().z()};
  l.score = score;
  return l;
}

// ---------------------------------------------------------------------------
// Point clouds

std::vector<PointXYZI> read_pointcloud(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % 16 != 0)
    throw LengthError("point cloud byte length " + std::to_string(bytes.size()) + " is not a multiple of 16");
  std::vector<PointXYZI> pts(bytes.size() / 16);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::uint8_t* p = bytes.data() + 16 * i;
    pts[i].x = std::bit_cast<float>(load_le32(p));
    pts[i].y = std::bit_cast<float>(load_le32(p + 4));
    pts[i].z = std::bit_cast<float>(load_le32(p + 8));
    pts[i].intensity = std::bit_cast<float>(load_le32(p + 12));
  }
  return pts;
}

std::vector<std::uint8_t> write_pointcloud(std::span<const PointXYZI> points) {
  std::vector<std::uint8_t> out;
  out.reserve(points.size() * 16);
  for (const PointXYZI& p : points) {
    store_le32(std::bit_cast<std::uint32_t>(p.x), out);
    store_le32(std::bit_cast<std::uint32_t>(p.y), out);
    store_le32(std::bit_cast<std::uint32_t>(p.z), out);
    store_le32(std::bit_cast<std::uint32_t>(p.intensity), out);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calibration

KittiCalib parse_calib_file(std::string_view text) {
  std::map<std::string, std::pair<std::vector<double>, std::size_t>> rows;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      if (!split_ws(line).empty()) throw ParseError("expected 'NAME: values'", n + 1);
      continue;
    }
    const auto name_tok = split_ws(line.substr(0, colon));
    if (name_tok.size() != 1) throw ParseError("malformed calibration key", n + 1);
    std::vector<double> values;
    for (std::string_view t : split_ws(line.substr(colon + 1))) values.push_back(parse_double(t, n + 1));
    rows[std::string(name_tok[0])] = {std::move(values), n + 1};
  }
  auto matrix = [&](const std::string& name, std::size_t count) -> const std::vector<double>* {
    const auto it = rows.find(name);
    if (it == rows.end()) return nullptr;
    if (it->second.first.size() != count)
      throw ParseError(name + " needs " + std::to_string(count) + " values, got " +
                           std::to_string(it->second.first.size()),
                       it->second.second);
    return &it->second.first;
  };
  const auto* p2 = matrix("P2", 12);
  const auto* p3 = matrix("P3", 12);
  if (!p2) throw ParseError("calibration is missing P2", 0);
  if (!p3) throw ParseError("calibration is missing P3", 0);
  const double fx = (*p2)[0], fy = (*p2)[5], cx = (*p2)[2], cy = (*p2)[6];
  try {
    CameraIntrinsics k(fx, fy, cx, cy);
    KittiCalib calib{StereoRig(k, ((*p2)[3] - (*p3)[3]) / fx)};
    if (const auto* tr = matrix("Tr_velo_to_cam", 12))
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) calib.velo_to_cam(r, c) = (*tr)[4 * r + c];
    return calib;
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid calibration: ") + e.what(), 0);
  }
}

StereoRig parse_calib(std::string_view text) { return parse_calib_file(text).rig; }

std::string write_calib(const StereoRig& rig) {
  const CameraIntrinsics& k = rig.intrinsics;
  auto row = [](const std::string& name, std::initializer_list<double> values) {
    std::string s = name + ":";
    char buf[64];
    for (double v : values) {
      std::snprintf(buf, sizeof buf, " %.12e", v);
      s += buf;
    }
    return s + '\n';
  };
  const double tx = -k.fx * rig.baseline;
  std::string out;
  out += row("P0", {k.fx, 0, k.cx, 0, 0, k.fy, k.cy, 0, 0, 0, 1, 0});
  out += row("P1", {k.fx, 0, k.cx, tx, 0, k.fy, k.cy, 0, 0, 0, 1, 0});
  out += row("P2", {k.fx, 0, k.cx, 0, 0, k.fy, k.cy, 0, 0, 0, 1, 0});
  out += row("P3", {k.fx, 0, k.cx, tx, 0, k.fy, k.cy, 0, 0, 0, 1, 0});
  out += row("R0_rect", {1, 0, 0, 0, 1, 0, 0, 0, 1});
  out += row("Tr_velo_to_cam", {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0});
  out += row("Tr_imu_to_velo", {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0});
  return out;
}

// ---------------------------------------------------------------------------
// PGM

double quantize_u16(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return std::round(c * 65535.0) / 65535.0;
}

std::vector<std::uint8_t> write_pgm(const IntensityImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n65535\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.values().size() * 2);
  for (double v : img.values()) {
    const auto q = static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
    out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xffu));
  }
  return out;
}

IntensityImage read_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto next_token = [&]() {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) ++pos;
    return std::string(bytes.begin() + start, bytes.begin() + pos);
  };
  if (next_token() != "P5") throw ParseError("not a binary PGM (P5)", 0);
  const long long w = parse_int(next_token()), h = parse_int(next_token()), maxval = parse_int(next_token());
  if (w < 2 || h < 2 || maxval < 1 || maxval > 65535) throw ParseError("unsupported PGM header", 0);
  ++pos;  // single whitespace before the raster
  const std::size_t sample = maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(w * h) * sample;
  if (bytes.size() < pos + need) throw LengthError("PGM raster is truncated");
  std::vector<double> values(static_cast<std::size_t>(w * h));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint8_t* p = bytes.data() + pos + i * sample;
    const unsigned raw = sample == 2 ? (static_cast<unsigned>(p[0]) << 8 | p[1]) : p[0];
    values[i] = static_cast<double>(raw) / static_cast<double>(maxval);
  }
  return IntensityImage(static_cast<int>(w), static_cast<int>(h), std::move(values));
}

// ---------------------------------------------------------------------------
// Files

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  const std::string s = read_file(path);
  return {s.begin(), s.end()};
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing " + path);
}

void write_binary_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace uniloc

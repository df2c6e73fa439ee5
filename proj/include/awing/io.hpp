#pragma once

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "awing/types.hpp"

namespace awing::io {

/// Shortest round-trip decimal form of a double; identical inputs always
/// produce identical text.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw Error("failed to format number");
  return std::string(buf.data(), ptr);
}

inline double parse_double(std::string_view s, std::string_view what = "number") {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

inline std::size_t parse_size(std::string_view s, std::string_view what = "integer") {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

inline std::vector<double> parse_double_list(std::string_view s, std::string_view what = "number") {
  std::vector<double> out;
  for (auto tok : split(s, ',')) out.push_back(parse_double(tok, what));
  return out;
}

/// Writes to `path` via a sibling temporary and a rename, so readers never
/// observe a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Binary heatmap dump: "HMAP", u32 C, u32 H, u32 W, then C·H·W little-endian
// float32 values, row-major per channel.

inline constexpr std::array<char, 4> kHeatmapMagic{'H', 'M', 'A', 'P'};

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

inline std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw DomainError(std::string(what) + " does not fit in 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

inline std::string encode_heatmap(const HeatmapStack& stack) {
  std::string out;
  out.reserve(16 + 4 * stack.size());
  out.append(kHeatmapMagic.data(), kHeatmapMagic.size());
  detail::put_u32(out, detail::checked_u32(stack.channels(), "channel count"));
  detail::put_u32(out, detail::checked_u32(stack.height(), "height"));
  detail::put_u32(out, detail::checked_u32(stack.width(), "width"));
  for (double v : stack.values()) detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

inline HeatmapStack decode_heatmap(std::string_view bytes, bool has_boundary_channel = false) {
  if (bytes.size() < 16 || bytes.substr(0, 4) != std::string_view(kHeatmapMagic.data(), 4)) {
    throw ParseError("not a heatmap dump (missing HMAP header)");
  }
  const std::size_t c = detail::get_u32(bytes, 4);
  const std::size_t h = detail::get_u32(bytes, 8);
  const std::size_t w = detail::get_u32(bytes, 12);
  const std::size_t count = c * h * w;
  if (bytes.size() != 16 + 4 * count) {
    throw ParseError("heatmap dump size " + std::to_string(bytes.size()) + " does not match header " +
                     std::to_string(c) + "x" + std::to_string(h) + "x" + std::to_string(w));
  }
  HeatmapStack stack(c, Frame{h, w}, has_boundary_channel && c > 0);
  auto v = stack.values();
  for (std::size_t i = 0; i < count; ++i) {
    v[i] = static_cast<double>(std::bit_cast<float>(detail::get_u32(bytes, 16 + 4 * i)));
  }
  return stack;
}

inline void write_heatmap(const std::filesystem::path& path, const HeatmapStack& stack) {
  write_file_atomic(path, encode_heatmap(stack));
}

inline HeatmapStack read_heatmap(const std::filesystem::path& path, bool has_boundary_channel = false) {
  return decode_heatmap(read_file(path), has_boundary_channel);
}

// ---------------------------------------------------------------------------
// Landmark annotations: one image per line,
//   <image-id> <W> <H> x,y[,v] x,y[,v] ...
// with v in {0 unlabeled, 1 occluded, 2 visible} (default 2). Blank lines and
// lines starting with '#' are ignored.

struct Annotation {
  std::string id;
  LandmarkSet landmarks;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

inline Annotation parse_annotation_line(std::string_view line, std::size_t lineno = 0) {
  std::istringstream ss{std::string(line)};
  std::string id, w, h;
  const std::string where = "annotation line " + std::to_string(lineno) + ": ";
  if (!(ss >> id >> w >> h)) throw ParseError(where + "expected '<id> <W> <H> points...'");
  const Frame frame{parse_size(h, "frame height"), parse_size(w, "frame width")};
  std::vector<Point> pts;
  std::vector<Visibility> vis;
  std::string tok;
  while (ss >> tok) {
    auto fields = split(tok, ',');
    if (fields.size() != 2 && fields.size() != 3) throw ParseError(where + "point '" + tok + "' is not x,y[,v]");
    pts.push_back({parse_double(fields[0], "x coordinate"), parse_double(fields[1], "y coordinate")});
    Visibility v = Visibility::Visible;
    if (fields.size() == 3) {
      const auto code = parse_size(fields[2], "visibility");
      if (code > 2) throw ParseError(where + "visibility must be 0, 1 or 2");
      v = static_cast<Visibility>(code);
    }
    vis.push_back(v);
  }
  try {
    return {id, LandmarkSet(frame, std::move(pts), std::move(vis))};
  } catch (const OutOfFrameError& e) {
    throw OutOfFrameError(where + e.what());
  }
}

inline std::vector<Annotation> parse_annotations(std::istream& in) {
  std::vector<Annotation> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_annotation_line(line, lineno));
  }
  return out;
}

inline std::vector<Annotation> read_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_annotations(in);
}

inline std::string format_annotation(const Annotation& a) {
  std::string out = a.id + " " + std::to_string(a.landmarks.frame().width) + " " +
                    std::to_string(a.landmarks.frame().height);
  for (std::size_t i = 0; i < a.landmarks.size(); ++i) {
    out += " " + format_double(a.landmarks[i].x) + "," + format_double(a.landmarks[i].y);
    if (a.landmarks.visibility(i) != Visibility::Visible) {
      out += "," + std::to_string(static_cast<int>(a.landmarks.visibility(i)));
    }
  }
  return out;
}

inline std::string format_annotations(const std::vector<Annotation>& all) {
  std::string out;
  for (const auto& a : all) out += format_annotation(a) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// key = value config files. '#' starts a comment.

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline KeyValues parse_key_values(std::istream& in) {
  KeyValues out;
  std::string line;
  std::size_t lineno = 0;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return std::string_view{};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    const auto key = trim(view.substr(0, eq));
    if (key.empty()) throw ParseError("config line " + std::to_string(lineno) + ": empty key");
    out[std::string(key)] = std::string(trim(view.substr(eq + 1)));
  }
  return out;
}

inline KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_key_values(in);
}

}  // namespace awing::io

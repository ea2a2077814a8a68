#include "geocode/obj_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "geocode/error.hpp"

namespace geocode::geom {

namespace {

// Keeps "-0.000000" out of the output so the text depends only on the
// rounded value.
double tidy(double x) { return std::abs(x) < 5e-7 ? 0.0 : x; }

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_double(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(fmt::format("obj line {}: bad number '{}'", line_no, s));
  return v;
}

std::uint32_t parse_index(std::string_view tok, std::size_t vertex_count, std::size_t line_no) {
  const auto slash = tok.find('/');
  if (slash != std::string_view::npos) tok = tok.substr(0, slash);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v == 0)
    throw ParseError(fmt::format("obj line {}: bad face index '{}'", line_no, tok));
  const long long idx = v > 0 ? v - 1 : static_cast<long long>(vertex_count) + v;
  if (idx < 0 || idx >= static_cast<long long>(vertex_count))
    throw ParseError(fmt::format("obj line {}: face index {} out of range", line_no, v));
  return static_cast<std::uint32_t>(idx);
}

}  // namespace

std::string write_obj(const LabeledMesh& m) {
  fmt::memory_buffer buf;
  for (const auto& v : m.vertices)
    fmt::format_to(std::back_inserter(buf), "v {:.6f} {:.6f} {:.6f}\n", tidy(v.x()), tidy(v.y()), tidy(v.z()));

  std::vector<std::uint32_t> order;
  std::vector<bool> seen(m.parts.size(), false);
  for (auto p : m.face_part)
    if (!seen[p]) {
      seen[p] = true;
      order.push_back(p);
    }
  for (auto p : order) {
    fmt::format_to(std::back_inserter(buf), "g {}\n", m.parts[p]);
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
      if (m.face_part[f] != p) continue;
      const auto& t = m.faces[f];
      fmt::format_to(std::back_inserter(buf), "f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1);
    }
  }
  return fmt::to_string(buf);
}

LabeledMesh read_obj(std::string_view text) {
  LabeledMesh m;
  std::uint32_t current = 0;
  bool have_group = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) throw ParseError(fmt::format("obj line {}: vertex needs 3 coordinates", line_no));
      m.vertices.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no),
                              parse_double(tok[3], line_no));
    } else if (tok[0] == "g" || tok[0] == "o") {
      std::string name;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (i > 1) name += ' ';
        name += tok[i];
      }
      current = m.intern_part(name.empty() ? "default" : name);
      have_group = true;
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw ParseError(fmt::format("obj line {}: face needs 3 vertices", line_no));
      if (!have_group) {
        current = m.intern_part("default");
        have_group = true;
      }
      std::vector<std::uint32_t> idx;
      for (std::size_t i = 1; i < tok.size(); ++i) idx.push_back(parse_index(tok[i], m.vertices.size(), line_no));
      for (std::size_t i = 1; i + 1 < idx.size(); ++i) {
        m.faces.push_back({idx[0], idx[i], idx[i + 1]});
        m.face_part.push_back(current);
      }
    }
    // vt, vn, s, usemtl and friends are ignored.
  }
  // Drop parts that never received a face.
  std::vector<std::int64_t> remap(m.parts.size(), -1);
  std::vector<std::string> used;
  for (auto& p : m.face_part) {
    if (remap[p] < 0) {
      remap[p] = static_cast<std::int64_t>(used.size());
      used.push_back(m.parts[p]);
    }
    p = static_cast<std::uint32_t>(remap[p]);
  }
  m.parts = std::move(used);
  return m;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  // Write beside the target and rename, so readers never see a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void save_obj(const LabeledMesh& m, const std::filesystem::path& path) { write_file(path, write_obj(m)); }

LabeledMesh load_obj(const std::filesystem::path& path) { return read_obj(read_file(path)); }

}  // namespace geocode::geom

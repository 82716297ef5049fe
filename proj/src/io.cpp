#include "lossperc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lossperc {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::string header(std::string_view schema, std::string_view hash, std::string_view columns) {
  std::string s = "# schema=";
  s += schema;
  s += " v1\n# config_hash=";
  s += hash;
  s += '\n';
  s += columns;
  s += '\n';
  return s;
}

}  // namespace

std::string curve_csv(const CanonicalCurve& curve, std::string_view config_hash) {
  std::string s = header("curve", config_hash, "p,mean_S,span_prob");
  for (std::size_t k = 0; k < curve.size(); ++k) {
    s += format_double(curve.p[k]);
    s += ',';
    s += format_double(curve.mean_largest[k]);
    s += ',';
    s += format_double(curve.span_probability[k]);
    s += '\n';
  }
  return s;
}

CanonicalCurve read_curve_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line != "# schema=curve v1") {
    throw IoError("'" + path.string() + "' is not a curve v1 file");
  }
  CanonicalCurve c;
  bool columns = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!columns) {
      if (line != "p,mean_S,span_prob") throw IoError("unexpected curve columns in '" + path.string() + "'");
      columns = true;
      continue;
    }
    double v[3];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 3; ++i) {
      const auto r = std::from_chars(p, end, v[i]);
      if (r.ec != std::errc{}) throw IoError("malformed row in '" + path.string() + "'");
      p = r.ptr;
      if (i < 2) {
        if (p == end || *p != ',') throw IoError("malformed row in '" + path.string() + "'");
        ++p;
      }
    }
    c.p.push_back(v[0]);
    c.mean_largest.push_back(v[1]);
    c.span_probability.push_back(v[2]);
  }
  return c;
}

std::string threshold_csv(const std::vector<SizeThreshold>& rows, std::string_view config_hash) {
  std::string s = header("threshold", config_hash, "L,lambda,stderr");
  for (const auto& r : rows) {
    s += format_double(r.size) + ',' + format_double(r.value) + ',' + format_double(r.error) + '\n';
  }
  return s;
}

std::string bench_csv(const std::vector<BenchRow>& rows, std::string_view config_hash) {
  std::string s = header("bench", config_hash, "variable,value,wall_time_s");
  for (const auto& r : rows) {
    s += r.variable + ',' + format_double(r.value) + ',' + format_double(r.wall_time_s) + '\n';
  }
  return s;
}

}  // namespace lossperc

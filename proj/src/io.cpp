#include "fairdiv/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace fairdiv {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

bool parse_real(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_integer(const std::string& s, long long& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(source + ":" + std::to_string(line) + ": " + what);
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) return true;
  }
  return false;
}

// Maps raw label tokens to dense group indices.
std::vector<std::size_t> index_labels(const std::vector<std::string>& raw, std::vector<std::string>& labels) {
  std::vector<std::string> distinct;
  for (const auto& r : raw) {
    if (std::find(distinct.begin(), distinct.end(), r) == distinct.end()) distinct.push_back(r);
  }
  bool numeric = !distinct.empty();
  std::vector<long long> values(distinct.size());
  for (std::size_t i = 0; i < distinct.size() && numeric; ++i) numeric = parse_integer(distinct[i], values[i]);
  if (numeric) {
    std::vector<std::size_t> order(distinct.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::string> sorted;
    for (std::size_t i : order) sorted.push_back(distinct[i]);
    distinct = std::move(sorted);
  }
  std::map<std::string, std::size_t> lookup;
  for (std::size_t g = 0; g < distinct.size(); ++g) lookup[distinct[g]] = g;
  std::vector<std::size_t> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(lookup.at(r));
  labels = std::move(distinct);
  return out;
}

}  // namespace

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

Dataset read_points_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno)) throw Error(source + ": empty input");
  const auto header = split_fields(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "group") {
    fail(source, lineno, "expected header `id,group,x1,...,xD`");
  }
  const std::size_t dim = header.size() - 2;
  std::vector<std::string> ids, raw_groups;
  std::vector<std::vector<double>> coords;
  std::map<std::string, std::size_t> seen;
  while (next_content_line(in, line, lineno)) {
    const auto f = split_fields(line);
    if (f.size() != dim + 2) {
      fail(source, lineno, "expected " + std::to_string(dim + 2) + " fields, got " + std::to_string(f.size()));
    }
    if (f[0].empty()) fail(source, lineno, "empty point id");
    if (f[1].empty()) fail(source, lineno, "bad group label (empty)");
    if (!seen.emplace(f[0], ids.size()).second) fail(source, lineno, "duplicate point id " + f[0]);
    std::vector<double> c(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      if (!parse_real(f[d + 2], c[d])) fail(source, lineno, "malformed coordinate `" + f[d + 2] + "`");
    }
    ids.push_back(f[0]);
    raw_groups.push_back(f[1]);
    coords.push_back(std::move(c));
  }
  std::vector<std::string> labels;
  const auto groups = index_labels(raw_groups, labels);
  std::vector<Point> pts;
  pts.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) pts.push_back({ids[i], groups[i], std::move(coords[i])});
  Dataset data = Dataset::euclidean(std::move(pts), std::move(labels));
  for (const Issue& issue : validate(data).issues) {
    if (issue.kind == IssueKind::NotFinite) throw Error(source + ": " + issue.message);
  }
  return data;
}

Dataset read_matrix(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  if (!next_content_line(in, line, lineno)) throw Error(source + ": empty input");
  long long n_raw = 0;
  if (!parse_integer(trim(line), n_raw) || n_raw < 1) fail(source, lineno, "expected point count n >= 1");
  const auto n = static_cast<std::size_t>(n_raw);
  if (!next_content_line(in, line, lineno)) fail(source, lineno, "missing group label line");
  const auto raw_groups = split_fields(line);
  if (raw_groups.size() != n) {
    fail(source, lineno, "expected " + std::to_string(n) + " group labels, got " + std::to_string(raw_groups.size()));
  }
  for (const auto& g : raw_groups) {
    if (g.empty()) fail(source, lineno, "bad group label (empty)");
  }
  std::vector<double> m(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!next_content_line(in, line, lineno)) fail(source, lineno, "missing matrix row " + std::to_string(r + 1));
    const auto f = split_fields(line);
    if (f.size() != n) {
      fail(source, lineno, "expected " + std::to_string(n) + " entries, got " + std::to_string(f.size()));
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (!parse_real(f[c], m[r * n + c])) fail(source, lineno, "malformed distance `" + f[c] + "`");
    }
  }
  if (next_content_line(in, line, lineno)) fail(source, lineno, "trailing content after matrix");
  std::vector<std::string> labels;
  const auto groups = index_labels(raw_groups, labels);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({"p" + std::to_string(i + 1), groups[i], {}});
  Dataset data = Dataset::with_matrix(std::move(pts), std::move(labels), std::move(m));
  for (const Issue& issue : validate(data).issues) {
    if (issue.kind != IssueKind::TriangleCheckSkipped && issue.kind != IssueKind::EmptyGroup) {
      throw Error(source + ": " + issue.message);
    }
  }
  return data;
}

Dataset read_dataset(const std::string& path, InputFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  if (format == InputFormat::Auto) {
    std::string first;
    while (std::getline(in, first) && trim(first).empty()) {
    }
    long long n = 0;
    format = parse_integer(trim(first), n) ? InputFormat::Matrix : InputFormat::Points;
    in.clear();
    in.seekg(0);
  }
  return format == InputFormat::Matrix ? read_matrix(in, path) : read_points_csv(in, path);
}

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

void write_points_csv(std::ostream& out, const Dataset& data) {
  if (!data.is_euclidean()) throw Error("dataset has no coordinates");
  out << "id,group";
  for (std::size_t d = 0; d < data.dimension(); ++d) out << ",x" << d + 1;
  out << '\n';
  for (const Point& p : data.points()) {
    out << p.id << ',' << data.group_labels()[p.group];
    for (double c : p.coords) out << ',' << format_real(c);
    out << '\n';
  }
}

void write_matrix(std::ostream& out, const Dataset& data) {
  const std::size_t n = data.size();
  out << n << '\n';
  for (std::size_t i = 0; i < n; ++i) out << (i ? "," : "") << data.group_labels()[data.group_of(i)];
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << format_real(data.dist(i, j));
    out << '\n';
  }
}

}  // namespace fairdiv

#include "twinsim/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace twinsim::io {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& context) {
  const std::string t = trim(text);
  double value{};
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("cannot parse '" + text + "' as a number (" + context + ")");
  }
  return value;
}

bool looks_numeric(const std::string& field) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  double value{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  return ec == std::errc{} && ptr == t.data() + t.size();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return fields;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    cfg.entries_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  return parse(in);
}

bool KeyValueConfig::has(const std::string& key) const {
  return entries_.count(key) != 0;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw std::invalid_argument("missing config key: " + key);
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  return parse_double(get_string(key), "config key " + key);
}

double KeyValueConfig::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int KeyValueConfig::get_int_or(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  return static_cast<int>(parse_double(get_string(key), "config key " + key));
}

std::uint64_t KeyValueConfig::get_u64_or(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  return static_cast<std::uint64_t>(std::stoull(trim(get_string(key))));
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
  std::string text = get_string(key);
  for (auto& ch : text) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream ss(text);
  std::vector<double> values;
  std::string token;
  while (ss >> token) {
    values.push_back(parse_double(token, "config key " + key));
  }
  if (values.empty()) throw std::invalid_argument("config key " + key + " holds no numbers");
  return values;
}

void write_visibility_csv(std::ostream& out, std::span<const hom::VisibilityPoint> points) {
  out << "p,visibility\n";
  for (const auto& pt : points) {
    out << format_double(pt.p) << ',' << format_double(pt.v) << '\n';
  }
}

std::vector<hom::VisibilityPoint> read_visibility_csv(std::istream& in) {
  std::vector<hom::VisibilityPoint> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (line_no == 1 && !looks_numeric(fields[0])) continue;  // header
    if (fields.size() != 2) {
      throw std::invalid_argument("visibility CSV line " + std::to_string(line_no) +
                               ": expected 'p,visibility'");
    }
    hom::VisibilityPoint pt;
    pt.p = parse_double(fields[0], "p");
    pt.v = parse_double(fields[1], "visibility");
    points.push_back(pt);
  }
  return points;
}

std::vector<hom::VisibilityPoint> read_fit_points_csv(std::istream& in) {
  std::vector<hom::VisibilityPoint> points;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (line_no == 1 && !looks_numeric(fields[0])) continue;  // header
    if (fields.size() != 2 && fields.size() != 3) {
      throw std::invalid_argument("fit CSV line " + std::to_string(line_no) +
                               ": expected 'p,v[,sigma_v]'");
    }
    hom::VisibilityPoint pt;
    pt.p = parse_double(fields[0], "p");
    pt.v = parse_double(fields[1], "v");
    if (fields.size() == 3) pt.sigma_v = parse_double(fields[2], "sigma_v");
    points.push_back(pt);
  }
  return points;
}

void write_fit_points_csv(std::ostream& out, std::span<const hom::VisibilityPoint> points) {
  bool any_sigma = false;
  for (const auto& pt : points) any_sigma |= pt.sigma_v.has_value();
  out << (any_sigma ? "p,v,sigma_v\n" : "p,v\n");
  for (const auto& pt : points) {
    out << format_double(pt.p) << ',' << format_double(pt.v);
    if (any_sigma) out << ',' << format_double(pt.sigma_v.value_or(0.0));
    out << '\n';
  }
}

}  // namespace twinsim::io

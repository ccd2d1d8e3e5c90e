#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "twinsim/hom.hpp"

namespace twinsim::io {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Flat "key = value" configuration text; '#' starts a comment, blank lines
// are ignored. Values keep their raw text until queried.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  int get_int_or(const std::string& key, int fallback) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;
  // Comma- or whitespace-separated list of reals.
  std::vector<double> get_double_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// "p,visibility" rows.
void write_visibility_csv(std::ostream& out, std::span<const hom::VisibilityPoint> points);
std::vector<hom::VisibilityPoint> read_visibility_csv(std::istream& in);

// "p,v[,sigma_v]" rows (fit input data).
std::vector<hom::VisibilityPoint> read_fit_points_csv(std::istream& in);
void write_fit_points_csv(std::ostream& out, std::span<const hom::VisibilityPoint> points);

}  // namespace twinsim::io

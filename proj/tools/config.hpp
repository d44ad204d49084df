#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace gmlab::cli {

/// Flat key=value configuration. Every accepted key has a default; keys not in
/// the table are rejected at parse time. '#' starts a comment.
class Config {
 public:
  Config();

  static Config parse(std::istream& in);
  static Config load(const std::string& path);

  /// Overrides a value (command-line flags). The key must be known.
  void set(const std::string& key, const std::string& value);
  bool provided(const std::string& key) const;

  const std::string& str(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::size_t> counts(const std::string& key) const;

  /// key=value lines in key order.
  void write_resolved(std::ostream& out) const;

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
    bool provided = false;
  };
  const Entry& entry(const std::string& key) const;

  std::map<std::string, Entry> entries_;
};

}  // namespace gmlab::cli

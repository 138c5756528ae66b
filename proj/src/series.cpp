#include "hzn/series.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hzn {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_series_csv(const Series& s, const std::filesystem::path& path,
                      const std::string& value_header) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  out << "t_hours," << value_header << "\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_number(s.t_hours(i)) << ',' << format_number(s.values[i])
        << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

}  // namespace hzn

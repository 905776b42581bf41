#include "inertia/trace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace inertia {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, ptr);
}

namespace {

double parse_double(std::string_view s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw std::runtime_error("trace csv: bad number '" + std::string(s) + "'");
  return value;
}

}  // namespace

void Trace::append(TraceRow row) {
  if (!rows_.empty() && !(row.index > rows_.back().index))
    throw std::invalid_argument("trace rows must be strictly increasing in index");
  if (!std::isfinite(row.index) || !std::isfinite(row.gap) ||
      !std::isfinite(row.norm) || !std::isfinite(row.energy_w0) ||
      !std::isfinite(row.energy_w1) || !std::isfinite(row.envelope))
    throw std::invalid_argument("trace rows must be finite");
  rows_.push_back(row);
}

void Trace::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  for (const TraceRow& r : rows_) {
    out << format_double(r.index) << ',' << format_double(r.gap) << ','
        << format_double(r.norm) << ',' << format_double(r.energy_w0) << ','
        << format_double(r.energy_w1) << ',' << format_double(r.envelope)
        << '\n';
  }
}

Trace Trace::read_csv(std::istream& in) {
  Trace trace;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace csv: empty input");
  if (line != kHeader)
    throw std::runtime_error("trace csv: unexpected header '" + line + "'");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double fields[6];
    std::size_t pos = 0;
    for (int f = 0; f < 6; ++f) {
      std::size_t comma = (f < 5) ? line.find(',', pos) : line.size();
      if (comma == std::string::npos)
        throw std::runtime_error("trace csv: expected 6 columns");
      fields[f] = parse_double(std::string_view(line).substr(pos, comma - pos));
      pos = comma + 1;
    }
    trace.append(TraceRow{fields[0], fields[1], fields[2], fields[3],
                          fields[4], fields[5]});
  }
  return trace;
}

}  // namespace inertia

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace inertia {

/// One record of a solver run. `index` is the iteration count k for the
/// discrete methods and the time t for the continuous one. The two energy
/// columns carry the omega = 0 and omega = 1 energies for the gradient
/// method; the proximal method and the integrator have a single energy and
/// write it to both columns. `envelope` holds the certified bound when a
/// certification is configured and 0 otherwise.
struct TraceRow {
  double index = 0.0;
  double gap = 0.0;
  double norm = 0.0;
  double energy_w0 = 0.0;
  double energy_w1 = 0.0;
  double envelope = 0.0;
};

/// Column order is fixed: index,gap,norm,energy_w0,energy_w1,envelope.
/// Values are written with shortest round-trip formatting so a parsed file
/// reproduces the doubles bit for bit.
class Trace {
 public:
  static constexpr const char* kHeader =
      "index,gap,norm,energy_w0,energy_w1,envelope";

  void append(TraceRow row);

  const std::vector<TraceRow>& rows() const { return rows_; }
  std::vector<TraceRow>& rows() { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const TraceRow& operator[](std::size_t i) const { return rows_[i]; }
  const TraceRow& back() const { return rows_.back(); }

  void write_csv(std::ostream& out) const;
  static Trace read_csv(std::istream& in);

 private:
  std::vector<TraceRow> rows_;
};

/// Shortest round-trip decimal form of a double ("1.25", "1e-09", ...).
std::string format_double(double x);

}  // namespace inertia

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "q4nl/field.hpp"
#include "q4nl/grid.hpp"
#include "q4nl/morawetz.hpp"
#include "q4nl/system.hpp"

namespace q4nl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary snapshot, little-endian:
///   "Q4NL" | u32 version | u32 d | u32 N | u32 n (x d) | f64 L | f64 t | i32 kappa | f64 p
/// followed by N * M complex values as interleaved (re, im) f64, component by
/// component, row-major.
struct Checkpoint {
  GridSpec grid;
  int kappa = 0;
  double p = 1.0;
  FieldState state;

  bool operator==(const Checkpoint&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& cp);
/// Throws FormatError on a bad magic, a version other than kCheckpointVersion,
/// unequal axis sizes, or a payload of the wrong length.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const std::string& path, const Checkpoint& cp);
Checkpoint read_checkpoint(const std::string& path);

/// Time-series CSV. Columns, in order:
///   t, mass_1..mass_N, energy_total, energy_biharmonic, energy_gradient,
///   energy_potential, h2_1..h2_N, lq_<q> per q, boundary_mass, morawetz_action
///   and, when enabled, interaction_action.
/// Values use %.17g; q in column names uses %g.
class SeriesWriter {
 public:
  SeriesWriter(std::ostream& out, const Grid& grid, const SystemParams& sys, std::vector<double> q_list,
               const WeightSpec& weight, bool interaction);

  static std::vector<std::string> columns(int components, const std::vector<double>& q_list, bool interaction);

  void write_header();
  void write_row(const FieldState& state);
  long rows() const noexcept { return rows_; }

 private:
  std::ostream& out_;
  Grid grid_;
  SystemParams sys_;
  std::vector<double> q_list_;
  WeightSpec weight_spec_;
  WeightFields weight_;
  bool interaction_;
  long rows_ = 0;
};

std::string format_value(double v);

}  // namespace q4nl

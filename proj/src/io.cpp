#include "q4nl/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "q4nl/error.hpp"
#include "q4nl/functionals.hpp"

namespace q4nl {

namespace {

constexpr char kMagic[4] = {'Q', '4', 'N', 'L'};

template <class T>
void put(std::vector<std::uint8_t>& out, T value) {
  auto bits = std::bit_cast<std::array<std::uint8_t, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.insert(out.end(), bits.begin(), bits.end());
}

class Cursor {
 public:
  explicit Cursor(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  template <class T>
  T get(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) throw FormatError(std::string("checkpoint truncated while reading ") + what);
    std::array<std::uint8_t, sizeof(T)> bits;
    std::memcpy(bits.data(), bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& cp) {
  const Grid grid(cp.grid);
  check_shape(cp.state, grid, cp.state.components());
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cp.grid.dimension));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cp.state.components()));
  for (int a = 0; a < cp.grid.dimension; ++a) put<std::uint32_t>(out, static_cast<std::uint32_t>(cp.grid.points_per_axis));
  put<double>(out, cp.grid.side_length);
  put<double>(out, cp.state.t);
  put<std::int32_t>(out, cp.kappa);
  put<double>(out, cp.p);
  out.reserve(out.size() + 16 * grid.size() * cp.state.u.size());
  for (const auto& f : cp.state.u)
    for (const auto& v : f) {
      put<double>(out, v.real());
      put<double>(out, v.imag());
    }
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("not a checkpoint (bad magic)");
  std::vector<std::uint8_t> rest(bytes.begin() + 4, bytes.end());
  Cursor c(rest);
  const auto version = c.get<std::uint32_t>("version");
  if (version != kCheckpointVersion)
    throw FormatError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  Checkpoint cp;
  const auto d = c.get<std::uint32_t>("dimension");
  const auto n_comp = c.get<std::uint32_t>("component count");
  if (d < 1 || d > 3) throw FormatError("checkpoint dimension " + std::to_string(d) + " out of range");
  if (n_comp < 1 || n_comp > 64) throw FormatError("checkpoint component count out of range");
  std::uint32_t n = 0;
  for (std::uint32_t a = 0; a < d; ++a) {
    const auto na = c.get<std::uint32_t>("axis size");
    if (a > 0 && na != n) throw FormatError("checkpoint axes must have equal sizes");
    n = na;
  }
  cp.grid = {static_cast<int>(d), static_cast<int>(n), c.get<double>("L")};
  try {
    validate(cp.grid);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint grid invalid: ") + e.what());
  }
  cp.state.t = c.get<double>("t");
  cp.kappa = c.get<std::int32_t>("kappa");
  cp.p = c.get<double>("p");
  std::size_t m = 1;
  for (std::uint32_t a = 0; a < d; ++a) m *= n;
  if (c.remaining() != 16 * m * n_comp)
    throw FormatError("checkpoint payload has " + std::to_string(c.remaining()) + " bytes, expected " +
                      std::to_string(16 * m * n_comp));
  cp.state.u.assign(n_comp, ComplexField(m));
  for (auto& f : cp.state.u)
    for (auto& v : f) {
      const double re = c.get<double>("payload");
      const double im = c.get<double>("payload");
      v = Complex(re, im);
    }
  return cp;
}

void write_checkpoint(const std::string& path, const Checkpoint& cp) {
  const auto bytes = encode_checkpoint(cp);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write to '" + path + "' failed");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string format_q(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", q);
  return buf;
}

}  // namespace

SeriesWriter::SeriesWriter(std::ostream& out, const Grid& grid, const SystemParams& sys, std::vector<double> q_list,
                           const WeightSpec& weight, bool interaction)
    : out_(out),
      grid_(grid),
      sys_(sys),
      q_list_(std::move(q_list)),
      weight_spec_(weight),
      weight_(weight_derivatives(weight, grid)),
      interaction_(interaction) {}

std::vector<std::string> SeriesWriter::columns(int components, const std::vector<double>& q_list, bool interaction) {
  std::vector<std::string> cols{"t"};
  for (int c = 1; c <= components; ++c) cols.push_back("mass_" + std::to_string(c));
  for (const char* e : {"energy_total", "energy_biharmonic", "energy_gradient", "energy_potential"}) cols.emplace_back(e);
  for (int c = 1; c <= components; ++c) cols.push_back("h2_" + std::to_string(c));
  for (double q : q_list) cols.push_back("lq_" + format_q(q));
  cols.emplace_back("boundary_mass");
  cols.emplace_back("morawetz_action");
  if (interaction) cols.emplace_back("interaction_action");
  return cols;
}

void SeriesWriter::write_header() {
  const auto cols = columns(sys_.components, q_list_, interaction_);
  for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
  out_ << '\n';
}

void SeriesWriter::write_row(const FieldState& state) {
  std::vector<double> row{state.t};
  for (double m : mass(state, grid_)) row.push_back(m);
  const auto e = energy(state, grid_, sys_);
  row.insert(row.end(), {e.total, e.kinetic_biharmonic, e.kinetic_gradient, e.potential});
  for (double h : sobolev_h2_norm(state, grid_)) row.push_back(h);
  for (double q : q_list_) row.push_back(lq_norm_total(state, grid_, q));
  row.push_back(boundary_mass(state, grid_));
  row.push_back(action_M(state, grid_, weight_));
  if (interaction_) row.push_back(interaction_action(state, grid_, sys_, weight_spec_));
  for (std::size_t i = 0; i < row.size(); ++i) out_ << (i ? "," : "") << format_value(row[i]);
  out_ << '\n';
  ++rows_;
}

}  // namespace q4nl

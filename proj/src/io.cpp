#include "washerkorn/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "washerkorn/error.hpp"

namespace wk {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw InvalidArgument("not a number: '" + std::string(text) + "'");
  return v;
}

namespace {

const char* kComponentNames[6] = {"a_rho", "b_rho", "a_theta", "b_theta", "a_z", "b_z"};

Coef FourierMode::*component_member(int c) {
  static Coef FourierMode::*const members[6] = {&FourierMode::a_rho,   &FourierMode::b_rho, &FourierMode::a_theta,
                                                &FourierMode::b_theta, &FourierMode::a_z,   &FourierMode::b_z};
  return members[c];
}

int component_index(const std::string& name) {
  for (int c = 0; c < 6; ++c)
    if (name == kComponentNames[c]) return c;
  throw InvalidArgument("field file: unknown component " + name);
}

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    return line;
  }
  throw InvalidArgument(std::string("field file: missing ") + what);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  is.imbue(std::locale::classic());
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> expect(std::istream& in, const std::string& key, std::size_t min_tokens) {
  auto tok = split_ws(next_line(in, key.c_str()));
  if (tok.empty() || tok[0] != key || tok.size() < min_tokens)
    throw InvalidArgument("field file: expected '" + key + "' line");
  return tok;
}

int parse_int(const std::string& s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InvalidArgument("not an integer: '" + s + "'");
  return v;
}

}  // namespace

void write_field(std::ostream& out, const FourierField& field, BoundaryCondition bc, int n_rho, int n_z) {
  if (n_rho < 3 || n_z < 3) throw InvalidArgument("write_field: need at least 3x3 samples");
  const auto& g = field.geometry();
  out << "washerkorn-field 1\n";
  out << "geometry " << format_number(g.r) << ' ' << format_number(g.R) << ' ' << format_number(g.h) << ' '
      << format_number(g.c) << '\n';
  out << "bc " << to_string(bc) << '\n';
  out << "modes";
  for (const auto& m : field.modes()) out << ' ' << m.n;
  out << "\nsamples " << n_rho << ' ' << n_z << '\n';
  for (const auto& m : field.modes()) {
    for (int c = 0; c < 6; ++c) {
      const Coef& coef = m.*component_member(c);
      if (!coef) continue;
      out << "mode " << m.n << ' ' << kComponentNames[c] << '\n';
      for (int i = 0; i < n_rho; ++i) {
        const double rho = i == n_rho - 1 ? g.R : g.r + (g.R - g.r) * i / (n_rho - 1);
        for (int j = 0; j < n_z; ++j) {
          const double z = j == n_z - 1 ? g.h : g.h * j / (n_z - 1);
          out << (j ? " " : "") << format_number(coef->eval(rho, z).v);
        }
        out << '\n';
      }
    }
  }
}

FieldFile read_field(std::istream& in) {
  auto head = expect(in, "washerkorn-field", 2);
  if (head[1] != "1") throw InvalidArgument("field file: unsupported version " + head[1]);
  auto geo = expect(in, "geometry", 4);
  WasherGeometry g;
  g.r = parse_number(geo[1]);
  g.R = parse_number(geo[2]);
  g.h = parse_number(geo[3]);
  if (geo.size() > 4) g.c = parse_number(geo[4]);
  g.validate();
  const auto bc = parse_boundary_condition(expect(in, "bc", 2)[1]);
  auto mtok = expect(in, "modes", 1);
  std::map<int, FourierMode> modes;
  for (std::size_t i = 1; i < mtok.size(); ++i) {
    const int n = parse_int(mtok[i]);
    modes[n].n = n;
  }
  auto st = expect(in, "samples", 3);
  const int ns = parse_int(st[1]), nz = parse_int(st[2]);
  if (ns < 3 || nz < 3) throw InvalidArgument("field file: need at least 3x3 samples");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tok = split_ws(line);
    if (tok.size() != 3 || tok[0] != "mode") throw InvalidArgument("field file: expected 'mode' line");
    const int n = parse_int(tok[1]);
    auto it = modes.find(n);
    if (it == modes.end()) throw InvalidArgument("field file: mode " + tok[1] + " not declared");
    const int c = component_index(tok[2]);
    std::vector<double> vals;
    vals.reserve(static_cast<std::size_t>(ns) * nz);
    for (int i = 0; i < ns; ++i) {
      auto row = split_ws(next_line(in, "sample row"));
      if (static_cast<int>(row.size()) != nz) throw InvalidArgument("field file: sample row has wrong length");
      for (const auto& v : row) vals.push_back(parse_number(v));
    }
    it->second.*component_member(c) = std::make_shared<GridSampledField>(g.r, g.R, ns, 0.0, g.h, nz, std::move(vals));
  }
  std::vector<FourierMode> list;
  for (auto& [n, m] : modes) list.push_back(std::move(m));
  return {FourierField(g, std::move(list)), bc};
}

void write_matrix_market(std::ostream& out, const SpMat& m, const std::string& comment) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  if (!comment.empty()) out << "% " << comment << '\n';
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_number(it.value()) << '\n';
}

SpMat read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real", 0) != 0)
    throw InvalidArgument("matrix file: missing MatrixMarket banner");
  const bool symmetric = line.find("symmetric") != std::string::npos;
  do {
    if (!std::getline(in, line)) throw InvalidArgument("matrix file: missing size line");
  } while (line.empty() || line[0] == '%');
  auto sz = split_ws(line);
  if (sz.size() != 3) throw InvalidArgument("matrix file: bad size line");
  const int rows = parse_int(sz[0]), cols = parse_int(sz[1]), nnz = parse_int(sz[2]);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nnz);
  for (int k = 0; k < nnz; ++k) {
    if (!std::getline(in, line)) throw InvalidArgument("matrix file: truncated");
    auto t = split_ws(line);
    if (t.size() != 3) throw InvalidArgument("matrix file: bad entry line");
    const int i = parse_int(t[0]) - 1, j = parse_int(t[1]) - 1;
    if (i < 0 || j < 0 || i >= rows || j >= cols) throw InvalidArgument("matrix file: index out of range");
    const double v = parse_number(t[2]);
    trip.emplace_back(i, j, v);
    if (symmetric && i != j) trip.emplace_back(j, i, v);
  }
  SpMat m(rows, cols);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

void write_eigenpairs_csv(std::ostream& out, const EigenPairs& pairs) {
  out << "index,eigenvalue,residual\n";
  for (std::size_t i = 0; i < pairs.values.size(); ++i)
    out << i << ',' << format_number(pairs.values[i]) << ','
        << format_number(i < pairs.residuals.size() ? pairs.residuals[i] : NAN) << '\n';
}

void write_eigenvectors_csv(std::ostream& out, const EigenPairs& pairs) {
  const auto& v = pairs.vectors;
  for (Eigen::Index j = 0; j < v.cols(); ++j) out << (j ? "," : "") << "v" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) out << (j ? "," : "") << format_number(v(i, j));
    out << '\n';
  }
}

}  // namespace wk

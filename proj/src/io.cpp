#include "qcorr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace qcorr::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::size_t positive(const Json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(where, "expected a positive integer");
  const auto v = j.get<long long>();
  if (v < 1) fail(where, "expected a positive integer");
  return static_cast<std::size_t>(v);
}

double finite(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "non-finite number");
  return v;
}

void check_format(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find("format");
  if (it == j.end()) return;
  if (!it->is_string() || it->get<std::string>() != kFormat) {
    fail(where, std::string("unsupported format (expected \"") + kFormat + "\")");
  }
}

void check_kind(const Json& j, const char* kind, const std::string& where) {
  auto it = j.find("kind");
  if (it == j.end()) return;
  if (!it->is_string() || it->get<std::string>() != kind) {
    fail(where, std::string("expected kind \"") + kind + "\"");
  }
}

Json complex_list(const CVector& v) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(Json::array({v(i).real(), v(i).imag()}));
  return data;
}

Complex complex_entry(const Json& e, const std::string& where) {
  if (e.is_number()) return {finite(e, where), 0.0};
  if (!e.is_array() || e.size() != 2) fail(where, "expected [re, im] or a number");
  return {finite(e[0], where + ".re"), finite(e[1], where + ".im")};
}

CVector complex_vector(const Json& data, const std::string& where) {
  if (!data.is_array()) fail(where, "expected an array");
  CVector v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_entry(data[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

std::vector<std::size_t> dims_of(const Json& j, std::size_t count, const std::string& where) {
  const Json& d = field(j, "dims", where);
  if (!d.is_array() || d.size() != count) {
    fail(where + ".dims", "expected " + std::to_string(count) + " dimensions");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(positive(d[i], where + ".dims[" + std::to_string(i) + "]"));
  return out;
}

std::vector<CMatrix> matrix_list(const Json& j, const char* key, const std::string& where) {
  const Json& list = field(j, key, where);
  if (!list.is_array() || list.empty()) fail(where + "." + key, "expected a nonempty array of matrices");
  std::vector<CMatrix> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.push_back(matrix_from_json(list[i], where + "." + key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Json matrix_array(const std::vector<CMatrix>& ms) {
  Json out = Json::array();
  for (const auto& m : ms) out.push_back(matrix_to_json(m));
  return out;
}

Json header(const char* kind) {
  Json j;
  j["format"] = kFormat;
  j["kind"] = kind;
  return j;
}

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Resolves an inline object or a relative file reference.
Json resolve(const Json& ref, const std::filesystem::path& base, const std::string& where) {
  if (ref.is_string()) {
    const std::filesystem::path p = base / ref.get<std::string>();
    return read_json_file(p);
  }
  if (!ref.is_object()) fail(where, "expected an object or a file path");
  return ref;
}

}  // namespace

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

Json read_json_file(const std::filesystem::path& path) { return parse_json(read_file(path), path.string()); }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json matrix_to_json(const CMatrix& m) {
  Json j;
  j["format"] = kFormat;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
  j["data"] = std::move(data);
  return j;
}

CMatrix matrix_from_json(const Json& j, const std::string& where) {
  check_format(j, where);
  const std::size_t rows = positive(field(j, "rows", where), where + ".rows");
  const std::size_t cols = positive(field(j, "cols", where), where + ".cols");
  const Json& data = field(j, "data", where);
  if (!data.is_array()) fail(where + ".data", "expected an array");
  if (data.size() != rows * cols) {
    fail(where + ".data", "has " + std::to_string(data.size()) + " entries, expected " + std::to_string(rows * cols));
  }
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < data.size(); ++k) {
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) =
        complex_entry(data[k], where + ".data[" + std::to_string(k) + "]");
  }
  return m;
}

Json real_matrix_to_json(const RMatrix& m) {
  Json j;
  j["format"] = kFormat;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  j["data"] = std::move(data);
  return j;
}

RMatrix real_matrix_from_json(const Json& j, const std::string& where) {
  const CMatrix m = matrix_from_json(j, where);
  if (m.imag().cwiseAbs().maxCoeff() != 0.0) fail(where, "expected real entries");
  return m.real();
}

Json state_to_json(const PureState& s) {
  Json j = header("pure_state");
  const Json m = matrix_to_json(pure::vec_inv(s));
  for (auto it = m.begin(); it != m.end(); ++it) {
    if (it.key() != "format") j[it.key()] = it.value();
  }
  return j;
}

PureState state_from_json(const Json& j, const std::string& where) {
  check_kind(j, "pure_state", where);
  const CMatrix a = matrix_from_json(j, where);
  CVector amps(a.size());
  for (Eigen::Index x = 0; x < a.rows(); ++x) amps.segment(x * a.cols(), a.cols()) = a.row(x).transpose();
  return make_pure_state(std::move(amps), static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()));
}

Json density_to_json(const DensityMatrix& rho) {
  Json j = header("density");
  j["dims"] = Json::array({rho.dim_a, rho.dim_b});
  const Json m = matrix_to_json(rho.mat);
  for (auto it = m.begin(); it != m.end(); ++it) {
    if (it.key() != "format") j[it.key()] = it.value();
  }
  return j;
}

DensityMatrix density_from_json(const Json& j, const std::string& where) {
  check_kind(j, "density", where);
  const CMatrix m = matrix_from_json(j, where);
  const auto dims = dims_of(j, 2, where);
  return linalg::make_density(m, dims[0], dims[1]);
}

DensityMatrix target_from_json(const Json& j, const std::string& where) {
  auto it = j.is_object() ? j.find("kind") : j.end();
  if (it != j.end() && it->is_string() && it->get<std::string>() == "density") return density_from_json(j, where);
  const PureState s = state_from_json(j, where);
  return linalg::pure_density(s.amps, s.dim_a, s.dim_b);
}

RMatrix parse_csv(std::string_view text, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> row;
    std::size_t start = 0, col = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view cell = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
      ++col;
      const std::string at = source + ": row " + std::to_string(rows.size() + 1) + ", column " + std::to_string(col) +
                             " (line " + std::to_string(line_no) + ")";
      double v = 0.0;
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (!cell.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (cell.empty() || ec != std::errc() || ptr != last) throw ParseError(at + ": not a number '" + std::string(cell) + "'");
      if (!std::isfinite(v)) throw ParseError(at + ": non-finite value");
      if (v < 0.0) throw ParseError(at + ": negative probability " + std::string(cell));
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(source + ": row " + std::to_string(rows.size() + 1) + " has " + std::to_string(row.size()) +
                       " columns, expected " + std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": no data rows");
  RMatrix p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t x = 0; x < rows.size(); ++x)
    for (std::size_t y = 0; y < rows[x].size(); ++y) p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = rows[x][y];
  return p;
}

RMatrix read_csv_file(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

std::string csv_string(const RMatrix& p) {
  std::string out;
  char buf[40];
  for (Eigen::Index x = 0; x < p.rows(); ++x) {
    for (Eigen::Index y = 0; y < p.cols(); ++y) {
      std::snprintf(buf, sizeof buf, "%.17g", p(x, y));
      if (y) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

RMatrix read_distribution(const std::filesystem::path& path) {
  if (path.extension() == ".json") return real_matrix_from_json(read_json_file(path), path.string());
  return read_csv_file(path);
}

Json psd_to_json(const PsdFactorization& f) {
  Json j = header("psd_factorization");
  j["r"] = f.r;
  j["dims"] = Json::array({f.cs.size(), f.ds.size()});
  j["residual"] = f.residual;
  j["C"] = matrix_array(f.cs);
  j["D"] = matrix_array(f.ds);
  return j;
}

PsdFactorization psd_from_json(const Json& j) {
  const std::string where = "psd_factorization";
  check_format(j, where);
  check_kind(j, "psd_factorization", where);
  PsdFactorization f;
  f.r = positive(field(j, "r", where), where + ".r");
  f.cs = matrix_list(j, "C", where);
  f.ds = matrix_list(j, "D", where);
  if (j.contains("dims")) {
    const auto dims = dims_of(j, 2, where);
    if (dims[0] != f.cs.size() || dims[1] != f.ds.size()) fail(where + ".dims", "do not match the factor counts");
  }
  const auto r = static_cast<Eigen::Index>(f.r);
  for (const auto* family : {&f.cs, &f.ds}) {
    for (const auto& m : *family) {
      if (m.rows() != r || m.cols() != r) fail(where, "factor is not " + std::to_string(f.r) + "x" + std::to_string(f.r));
    }
  }
  if (j.contains("residual")) f.residual = finite(j["residual"], where + ".residual");
  return f;
}

Json general_to_json(const GeneralFactorization& f) {
  Json j = header("general_factorization");
  j["r"] = f.r;
  j["dims"] = Json::array({f.dim_a(), f.dim_b()});
  j["A"] = matrix_array(f.as);
  j["B"] = matrix_array(f.bs);
  return j;
}

GeneralFactorization general_from_json(const Json& j) {
  const std::string where = "general_factorization";
  check_format(j, where);
  check_kind(j, "general_factorization", where);
  GeneralFactorization f;
  f.r = positive(field(j, "r", where), where + ".r");
  f.as = matrix_list(j, "A", where);
  f.bs = matrix_list(j, "B", where);
  if (j.contains("dims")) {
    const auto dims = dims_of(j, 2, where);
    if (dims[0] != f.as.size() || dims[1] != f.bs.size()) fail(where + ".dims", "do not match the factor counts");
  }
  return f;
}

Json purification_to_json(const Purification& p) {
  Json j = header("purification");
  j["dims"] = Json::array({p.dim_a, p.dim_a1, p.dim_b, p.dim_b1});
  j["amps"] = complex_list(p.amps);
  return j;
}

Purification purification_from_json(const Json& j) {
  const std::string where = "purification";
  check_format(j, where);
  check_kind(j, "purification", where);
  const auto d = dims_of(j, 4, where);
  return general::make_purification(complex_vector(field(j, "amps", where), where + ".amps"), d[0], d[1], d[2], d[3]);
}

Json channel_to_json(const LocalChannel& c) {
  Json j = header("channel");
  j["kraus"] = matrix_array(c.kraus);
  return j;
}

LocalChannel channel_from_json(const Json& j, const std::string& where) {
  check_format(j, where);
  check_kind(j, "channel", where);
  return make_channel(matrix_list(j, "kraus", where));
}

Json protocol_to_json(const ProtocolSpec& spec) {
  Json j = header("protocol");
  if (const auto* pure = std::get_if<PureState>(&spec.seed)) {
    j["seed"] = state_to_json(*pure);
  } else {
    j["seed"] = density_to_json(std::get<DensityMatrix>(spec.seed));
  }
  j["seed_size_qubits"] = spec.seed_size_qubits;
  j["alice"] = channel_to_json(spec.alice);
  j["bob"] = channel_to_json(spec.bob);
  j["target"] = density_to_json(spec.target);
  j["eps"] = spec.eps;
  return j;
}

ProtocolSpec protocol_from_json(const Json& j, const std::filesystem::path& base) {
  const std::string where = "protocol";
  check_format(j, where);
  check_kind(j, "protocol", where);
  ProtocolSpec spec;
  const Json seed = resolve(field(j, "seed", where), base, where + ".seed");
  auto kind = seed.find("kind");
  if (kind != seed.end() && kind->is_string() && kind->get<std::string>() == "density") {
    spec.seed = density_from_json(seed, where + ".seed");
  } else {
    spec.seed = state_from_json(seed, where + ".seed");
  }
  const Json& size = field(j, "seed_size_qubits", where);
  if (!size.is_number_integer() || size.get<long long>() < 0) fail(where + ".seed_size_qubits", "expected a nonnegative integer");
  spec.seed_size_qubits = size.get<int>();
  spec.alice = channel_from_json(resolve(field(j, "alice", where), base, where + ".alice"), where + ".alice");
  spec.bob = channel_from_json(resolve(field(j, "bob", where), base, where + ".bob"), where + ".bob");
  spec.target = target_from_json(resolve(field(j, "target", where), base, where + ".target"), where + ".target");
  spec.eps = j.contains("eps") ? finite(j["eps"], where + ".eps") : 0.0;
  return spec;
}

}  // namespace qcorr::io

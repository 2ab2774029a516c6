#include "advlab/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "advlab/errors.hpp"

namespace advlab {
namespace {

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(std::string("json: missing field \"") + key + "\"");
  return j.at(key);
}

int need_int(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_number_integer()) throw ConfigError(std::string("json: \"") + key + "\" must be an integer");
  return v.get<int>();
}

double finite_number(const Json& v, const char* what) {
  if (!v.is_number()) throw ConfigError(std::string("json: ") + what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(std::string("json: ") + what + " must be finite");
  return d;
}

std::uint8_t bit_entry(const Json& v, const char* what) {
  if (!v.is_number_integer()) throw ConfigError(std::string("json: ") + what + " must be 0 or 1");
  const int b = v.get<int>();
  if (b != 0 && b != 1) throw ConfigError(std::string("json: ") + what + " must be 0 or 1");
  return static_cast<std::uint8_t>(b);
}

std::vector<double> vector_from_json(const Json& v, const char* what) {
  if (!v.is_array()) throw ConfigError(std::string("json: ") + what + " must be an array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(finite_number(e, what));
  return out;
}

std::string pair_key(int x, int i) { return std::to_string(x) + "," + std::to_string(i); }

// "x,i" -> (x, i); both parts must be plain non-negative integers
std::pair<int, int> parse_pair_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos || comma == 0 || comma + 1 >= key.size())
    throw ConfigError("json: witness key \"" + key + "\" is not of the form \"x,i\"");
  for (std::size_t t = 0; t < key.size(); ++t)
    if (t != comma && (key[t] < '0' || key[t] > '9'))
      throw ConfigError("json: witness key \"" + key + "\" is not of the form \"x,i\"");
  try {
    return {std::stoi(key.substr(0, comma)), std::stoi(key.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("json: witness key \"" + key + "\" is out of range");
  }
}

Json uv_to_json(int arity, const std::vector<std::vector<std::vector<double>>>& fam) {
  Json out = Json::object();
  for (std::size_t x = 0; x < fam.size(); ++x)
    for (int i = 1; i <= arity; ++i)
      if (!fam[x][i - 1].empty()) out[pair_key(static_cast<int>(x), i)] = fam[x][i - 1];
  return out;
}

void uv_from_json(const Json& j, const char* key, int arity, int dim,
                  std::vector<std::vector<std::vector<double>>>& fam) {
  const int nx = 1 << arity;
  fam.assign(nx, std::vector<std::vector<double>>(arity));
  if (!j.contains(key)) return;
  const Json& m = j.at(key);
  if (!m.is_object()) throw ConfigError(std::string("json: \"") + key + "\" must be an object");
  for (const auto& [k, v] : m.items()) {
    const auto [x, i] = parse_pair_key(k);
    if (x < 0 || x >= nx || i < 1 || i > arity)
      throw ConfigError("json: witness key \"" + k + "\" is out of range");
    auto vec = vector_from_json(v, "witness vector entry");
    if (!vec.empty() && static_cast<int>(vec.size()) != dim)
      throw ConfigError("json: witness vector \"" + k + "\" length differs from dim");
    fam[x][i - 1] = std::move(vec);
  }
}

Json map_to_json(const std::map<std::string, double>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

Json map_to_json(const std::map<std::string, bool>& m) {
  Json out = Json::object();
  for (const auto& [k, v] : m) out[k] = v;
  return out;
}

}  // namespace

Json to_json(const BooleanFunction& g) {
  Json j;
  j["arity"] = g.arity();
  j["table"] = Json::array();
  for (auto b : g.table()) j["table"].push_back(static_cast<int>(b));
  return j;
}

Json to_json(const Relation& f) {
  Json j;
  j["arity"] = f.arity();
  j["k"] = f.alphabet();
  j["incidence"] = Json::array();
  for (const auto& row : f.incidence()) {
    Json r = Json::array();
    for (auto b : row) r.push_back(static_cast<int>(b));
    j["incidence"].push_back(std::move(r));
  }
  return j;
}

Json to_json(const DenseMatrix& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = Json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) j["data"].push_back(m(r, c));
  return j;
}

Json to_json(const FunctionalDualWitness& w) {
  Json j;
  j["kind"] = "functional-witness";
  j["arity"] = w.arity;
  j["dim"] = w.dim;
  j["u"] = uv_to_json(w.arity, w.u);
  j["v"] = uv_to_json(w.arity, w.v);
  return j;
}

Json to_json(const RelationalDualWitness& w) {
  Json j;
  j["kind"] = "relational-witness";
  j["arity"] = w.arity;
  j["alphabet"] = w.alphabet;
  j["dim"] = w.dim;
  j["u"] = uv_to_json(w.arity, w.u);
  j["v"] = uv_to_json(w.arity, w.v);
  Json sigma = Json::object();
  for (std::size_t x = 0; x < w.sigma.size(); ++x)
    for (int a = 1; a <= w.alphabet; ++a)
      if (!w.sigma[x][a - 1].empty())
        sigma[pair_key(static_cast<int>(x), a)] = w.sigma[x][a - 1];
  j["sigma"] = std::move(sigma);
  return j;
}

Json to_json(const BoundCertificate& cert) {
  Json j;
  j["value"] = cert.value;
  j["kind"] = to_string(cert.kind);
  j["tolerance"] = cert.tolerance;
  j["pass"] = cert.pass;
  j["residuals"] = map_to_json(cert.residuals);
  if (cert.functional_witness) j["witness"] = to_json(*cert.functional_witness);
  if (cert.relational_witness) j["witness"] = to_json(*cert.relational_witness);
  if (cert.gamma) j["gamma"] = to_json(*cert.gamma);
  return j;
}

Json to_json(const VerifiabilityReport& rep) {
  Json j;
  j["relational_value"] = rep.relational_value;
  j["slice_values"] = rep.slice_values;
  j["ratios"] = rep.ratios;
  j["degenerate"] = rep.degenerate;
  return j;
}

Json to_json(const CompositionReport& rep) {
  Json j;
  j["lower_value"] = rep.lower_value;
  j["upper_value"] = rep.upper_value;
  if (rep.direct_value) j["direct_value"] = *rep.direct_value;
  j["values"] = map_to_json(rep.values);
  j["residuals"] = map_to_json(rep.residuals);
  j["verdicts"] = map_to_json(rep.verdicts);
  if (rep.verifiability) j["verifiability"] = to_json(*rep.verifiability);
  j["pass"] = rep.pass;
  return j;
}

BooleanFunction function_from_json(const Json& j) {
  const int arity = need_int(j, "arity");
  if (arity < 1 || arity > kMaxArity)
    throw ConfigError("json: function arity out of range");
  const Json& table = need(j, "table");
  if (!table.is_array() || table.size() != (1u << arity))
    throw ConfigError("json: function table must have 2^arity entries");
  std::vector<std::uint8_t> bits;
  bits.reserve(table.size());
  for (const auto& e : table) bits.push_back(bit_entry(e, "table entry"));
  return BooleanFunction(arity, std::move(bits));
}

Relation relation_from_json(const Json& j) {
  const int arity = need_int(j, "arity");
  const int k = need_int(j, "k");
  if (arity < 1 || arity > kMaxArity) throw ConfigError("json: relation arity out of range");
  if (k < 1 || k > kMaxAlphabet) throw ConfigError("json: relation alphabet out of range");
  const Json& inc = need(j, "incidence");
  if (!inc.is_array() || inc.size() != (1u << arity))
    throw ConfigError("json: incidence must have 2^arity rows");
  std::vector<std::vector<std::uint8_t>> rows;
  rows.reserve(inc.size());
  for (const auto& row : inc) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(k))
      throw ConfigError("json: incidence rows must have k entries");
    std::vector<std::uint8_t> r;
    r.reserve(k);
    for (const auto& e : row) r.push_back(bit_entry(e, "incidence entry"));
    rows.push_back(std::move(r));
  }
  return Relation(arity, k, std::move(rows));
}

DenseMatrix matrix_from_json(const Json& j) {
  const int rows = need_int(j, "rows");
  const int cols = need_int(j, "cols");
  if (rows < 1 || cols < 1 || rows > kMaxMatrixDim || cols > kMaxMatrixDim)
    throw ConfigError("json: matrix dimensions out of range");
  const Json& data = need(j, "data");
  if (!data.is_array() || data.size() != static_cast<std::size_t>(rows) * cols)
    throw ConfigError("json: matrix data must have rows*cols entries");
  DenseMatrix m(rows, cols);
  std::size_t t = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = finite_number(data.at(t++), "matrix entry");
  return m;
}

FunctionalDualWitness functional_witness_from_json(const Json& j) {
  FunctionalDualWitness w;
  w.arity = need_int(j, "arity");
  if (w.arity < 1 || w.arity > kMaxArity) throw ConfigError("json: witness arity out of range");
  w.dim = need_int(j, "dim");
  if (w.dim < 0) throw ConfigError("json: witness dim must be non-negative");
  uv_from_json(j, "u", w.arity, w.dim, w.u);
  uv_from_json(j, "v", w.arity, w.dim, w.v);
  return w;
}

RelationalDualWitness relational_witness_from_json(const Json& j) {
  RelationalDualWitness w;
  w.arity = need_int(j, "arity");
  if (w.arity < 1 || w.arity > kMaxArity) throw ConfigError("json: witness arity out of range");
  w.alphabet = need_int(j, "alphabet");
  if (w.alphabet < 1 || w.alphabet > kMaxAlphabet)
    throw ConfigError("json: witness alphabet out of range");
  w.dim = need_int(j, "dim");
  if (w.dim < 0) throw ConfigError("json: witness dim must be non-negative");
  uv_from_json(j, "u", w.arity, w.dim, w.u);
  uv_from_json(j, "v", w.arity, w.dim, w.v);
  const int nx = 1 << w.arity;
  w.sigma.assign(nx, std::vector<std::vector<double>>(w.alphabet));
  if (j.contains("sigma")) {
    const Json& m = j.at("sigma");
    if (!m.is_object()) throw ConfigError("json: \"sigma\" must be an object");
    for (const auto& [k, v] : m.items()) {
      const auto [x, a] = parse_pair_key(k);
      if (x < 0 || x >= nx || a < 1 || a > w.alphabet)
        throw ConfigError("json: sigma key \"" + k + "\" is out of range");
      w.sigma[x][a - 1] = vector_from_json(v, "sigma entry");
    }
  }
  return w;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("cannot parse " + path + " as JSON");
  return j;
}

void save_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << pretty(doc);
  if (!out) throw ConfigError("write to " + path + " failed");
}

std::string pretty(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace advlab

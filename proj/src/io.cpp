#include "flexgate/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace flexgate {

namespace {

using nlohmann::json;

std::string read_all(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Strips comments and blank lines, keeping 1-based line numbers for errors.
struct OffLines {
  std::vector<std::pair<int, std::string>> lines;
  size_t cursor = 0;

  explicit OffLines(std::istream& in) {
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      const auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      if (raw.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      lines.emplace_back(number, raw);
    }
  }
  bool done() const { return cursor >= lines.size(); }
  const std::pair<int, std::string>& next() {
    if (done()) throw ParseError("OFF: unexpected end of file");
    return lines[cursor++];
  }
};

json parse_json_or_throw(const std::string& text, const std::string& what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw ParseError("malformed JSON in " + what);
  return doc;
}

Vec3 vec3_from_json(const json& arr, const std::string& what) {
  if (!arr.is_array() || arr.size() != 3 || !arr[0].is_number() || !arr[1].is_number() ||
      !arr[2].is_number())
    throw ParseError(what + " must be an array of 3 numbers");
  return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

LengthBasis basis_from_json(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw ParseError("length_basis must be a non-empty array");
  LengthBasis basis;
  for (const auto& el : arr) {
    if (!el.is_object() || !el.contains("label") || !el.contains("value") ||
        !el["label"].is_string() || !el["value"].is_number())
      throw ParseError("length_basis entries need a string label and a numeric value");
    basis.elements.push_back({el["label"].get<std::string>(), el["value"].get<double>()});
  }
  return basis;
}

std::map<std::pair<int, int>, std::vector<Rational>> alpha_from_json(const json& obj) {
  if (!obj.is_object()) throw ParseError("alpha must be an object keyed by \"i-j\"");
  std::map<std::pair<int, int>, std::vector<Rational>> alpha;
  for (const auto& [key, val] : obj.items()) {
    const auto dash = key.find('-');
    if (dash == std::string::npos) throw ParseError("alpha key '" + key + "' is not \"i-j\"");
    int i = 0, j = 0;
    try {
      i = std::stoi(key.substr(0, dash));
      j = std::stoi(key.substr(dash + 1));
    } catch (...) {
      throw ParseError("alpha key '" + key + "' is not \"i-j\"");
    }
    if (i > j) std::swap(i, j);
    if (!val.is_array()) throw ParseError("alpha['" + key + "'] must be an array of rationals");
    std::vector<Rational> row;
    for (const auto& r : val) {
      if (!r.is_string()) throw ParseError("alpha entries are rational strings like \"3/2\"");
      row.push_back(parse_rational(r.get<std::string>()));
    }
    alpha[{i, j}] = std::move(row);
  }
  return alpha;
}

}  // namespace

MeshDocument parse_off(std::istream& in) {
  OffLines off(in);
  auto [ln0, first] = off.next();
  std::istringstream head(first);
  std::string magic;
  head >> magic;
  long v_count = 0, f_count = 0, e_count = 0;
  if (magic == "OFF") {
    // counts may share the header line
    if (!(head >> v_count >> f_count >> e_count)) {
      auto [ln1, counts] = off.next();
      std::istringstream cs(counts);
      if (!(cs >> v_count >> f_count >> e_count))
        throw ParseError("OFF line " + std::to_string(ln1) + ": expected 'V F E' counts");
    }
  } else {
    std::istringstream cs(first);
    if (!(cs >> v_count >> f_count >> e_count))
      throw ParseError("OFF line " + std::to_string(ln0) + ": expected OFF header or counts");
  }
  if (v_count <= 0 || f_count <= 0)
    throw ParseError("OFF: vertex and face counts must be positive");

  MeshDocument doc;
  doc.vertices.reserve(v_count);
  for (long i = 0; i < v_count; ++i) {
    auto [ln, line] = off.next();
    std::istringstream vs(line);
    Vec3 v;
    if (!(vs >> v.x >> v.y >> v.z))
      throw ParseError("OFF line " + std::to_string(ln) + ": expected vertex coordinates");
    doc.vertices.push_back(v);
  }
  for (long i = 0; i < f_count; ++i) {
    auto [ln, line] = off.next();
    std::istringstream fs(line);
    int arity = 0;
    if (!(fs >> arity))
      throw ParseError("OFF line " + std::to_string(ln) + ": expected face arity");
    if (arity != 3)
      throw ParseError("OFF line " + std::to_string(ln) + ": only triangular faces supported");
    std::array<int, 3> f{};
    if (!(fs >> f[0] >> f[1] >> f[2]))
      throw ParseError("OFF line " + std::to_string(ln) + ": expected 3 vertex indices");
    doc.faces.push_back(f);
  }
  return doc;
}

MeshDocument parse_mesh_json(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = parse_json_or_throw(buf.str(), "mesh document");
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("faces"))
    throw ParseError("mesh JSON needs 'vertices' and 'faces'");

  MeshDocument out;
  for (const auto& v : doc["vertices"]) out.vertices.push_back(vec3_from_json(v, "vertex"));
  for (const auto& f : doc["faces"]) {
    if (!f.is_array() || f.size() != 3 || !f[0].is_number_integer() ||
        !f[1].is_number_integer() || !f[2].is_number_integer())
      throw ParseError("faces must be triples of integer indices");
    out.faces.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>()});
  }
  if (doc.contains("length_basis")) out.basis = basis_from_json(doc["length_basis"]);
  if (doc.contains("alpha")) out.alpha = alpha_from_json(doc["alpha"]);
  return out;
}

MeshDocument read_mesh_document(const std::string& path) {
  const std::string text = read_all(path);
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start == std::string::npos) throw ParseError("empty mesh file: " + path);
  std::istringstream in(text);
  if (text[start] == '{') return parse_mesh_json(in);
  return parse_off(in);
}

FirstOrderFlex parse_flex_json(std::istream& in) {
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = parse_json_or_throw(buf.str(), "flex document");
  if (!doc.is_object() || !doc.contains("velocities"))
    throw ParseError("flex JSON needs 'velocities'");
  FirstOrderFlex flex;
  for (const auto& v : doc["velocities"])
    flex.velocities.push_back(vec3_from_json(v, "velocity"));
  return flex;
}

FirstOrderFlex read_flex_file(const std::string& path) {
  const std::string text = read_all(path);
  std::istringstream in(text);
  return parse_flex_json(in);
}

BasisDocument read_basis_file(const std::string& path) {
  json doc = parse_json_or_throw(read_all(path), "basis file " + path);
  if (!doc.is_object() || !doc.contains("length_basis"))
    throw ParseError("basis JSON needs 'length_basis'");
  BasisDocument out;
  out.basis = basis_from_json(doc["length_basis"]);
  if (doc.contains("alpha")) out.alpha = alpha_from_json(doc["alpha"]);
  return out;
}

std::string mesh_to_json(const Polyhedron& p, const std::optional<LengthBasis>& basis,
                         const std::optional<LengthDecomposition>& decomp) {
  json doc;
  doc["vertices"] = json::array();
  for (const auto& v : p.vertices) doc["vertices"].push_back({v.x, v.y, v.z});
  doc["faces"] = json::array();
  for (const auto& f : p.faces) doc["faces"].push_back({f[0], f[1], f[2]});
  if (basis) {
    doc["length_basis"] = json::array();
    for (const auto& el : basis->elements)
      doc["length_basis"].push_back({{"label", el.label}, {"value", el.value}});
  }
  if (decomp) {
    json alpha = json::object();
    for (int e = 0; e < p.edge_count(); ++e) {
      auto [i, j] = p.edges[e];
      json row = json::array();
      for (const auto& r : decomp->coeffs[e]) row.push_back(r.to_string());
      alpha[std::to_string(i) + "-" + std::to_string(j)] = std::move(row);
    }
    doc["alpha"] = std::move(alpha);
  }
  return doc.dump(2);
}

std::string flex_to_json(const FirstOrderFlex& flex) {
  json doc;
  doc["velocities"] = json::array();
  for (const auto& v : flex.velocities) doc["velocities"].push_back({v.x, v.y, v.z});
  return doc.dump(2);
}

LengthDecomposition resolve_decomposition(
    const Polyhedron& p, const std::optional<LengthBasis>& basis,
    const std::optional<std::map<std::pair<int, int>, std::vector<Rational>>>& alpha,
    double decomp_tol, std::int64_t max_denominator, double recon_eps) {
  if (alpha) {
    if (!basis) throw ParseError("alpha block requires a length_basis");
    std::vector<std::vector<Rational>> coeffs;
    coeffs.reserve(p.edges.size());
    for (auto [i, j] : p.edges) {
      const auto it = alpha->find({i, j});
      if (it == alpha->end())
        throw ParseError("alpha block is missing edge " + std::to_string(i) + "-" +
                         std::to_string(j));
      coeffs.push_back(it->second);
    }
    return make_decomposition(p, *basis, std::move(coeffs), decomp_tol);
  }
  const LengthBasis b = basis ? *basis : auto_length_basis(p, decomp_tol);
  return decompose_lengths(p, b, decomp_tol, max_denominator, recon_eps);
}

}  // namespace flexgate

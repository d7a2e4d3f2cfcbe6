#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flexgate/dehn.hpp"
#include "flexgate/flex_space.hpp"
#include "flexgate/mesh.hpp"

namespace flexgate {

// Parsed mesh file before validation: vertices/faces plus the optional
// Dehn-basis block of the JSON schema.
struct MeshDocument {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::optional<LengthBasis> basis;
  // "alpha": per-edge rational coordinates keyed by "i-j" (i<j, mesh indices).
  std::optional<std::map<std::pair<int, int>, std::vector<Rational>>> alpha;
};

// OFF (ASCII) or mesh JSON, chosen by content sniffing; throws ParseError.
MeshDocument read_mesh_document(const std::string& path);
MeshDocument parse_off(std::istream& in);
MeshDocument parse_mesh_json(std::istream& in);

FirstOrderFlex read_flex_file(const std::string& path);
FirstOrderFlex parse_flex_json(std::istream& in);

// Standalone basis file: {"length_basis": [...], "alpha": {...}?}
struct BasisDocument {
  LengthBasis basis;
  std::optional<std::map<std::pair<int, int>, std::vector<Rational>>> alpha;
};
BasisDocument read_basis_file(const std::string& path);

std::string mesh_to_json(const Polyhedron& p, const std::optional<LengthBasis>& basis = {},
                         const std::optional<LengthDecomposition>& decomp = {});
std::string flex_to_json(const FirstOrderFlex& flex);

// Resolves a decomposition for a mesh: explicit alpha block if present, else
// reconstruction over the given basis, else reconstruction over the distinct
// edge lengths.
LengthDecomposition resolve_decomposition(
    const Polyhedron& p, const std::optional<LengthBasis>& basis,
    const std::optional<std::map<std::pair<int, int>, std::vector<Rational>>>& alpha,
    double decomp_tol = kDefaultDecompTol, std::int64_t max_denominator = kDefaultMaxDenominator,
    double recon_eps = kDefaultReconEps);

}  // namespace flexgate

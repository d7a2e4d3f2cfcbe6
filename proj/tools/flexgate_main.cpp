#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "flexgate/certify.hpp"
#include "flexgate/dehn.hpp"
#include "flexgate/edge_geometry.hpp"
#include "flexgate/errors.hpp"
#include "flexgate/flex_space.hpp"
#include "flexgate/io.hpp"
#include "flexgate/mesh.hpp"
#include "flexgate/oracle.hpp"

namespace {

using nlohmann::json;
using namespace flexgate;

constexpr int kExitOk = 0;
constexpr int kExitObstructed = 1;
constexpr int kExitError = 2;
constexpr int kExitStalled = 3;

OutwardPolicy parse_orientation(const std::string& s) {
  if (s == "auto") return OutwardPolicy::Auto;
  if (s == "keep") return OutwardPolicy::Keep;
  if (s == "flip") return OutwardPolicy::Flip;
  throw InvalidParams("unknown orientation policy: " + s);
}

BranchPolicy parse_policy(const std::string& s) {
  if (s == "prefer-stable") return BranchPolicy::PreferStable;
  if (s == "force-r") return BranchPolicy::ForceR;
  if (s == "force-s") return BranchPolicy::ForceS;
  if (s == "mixed-slots") return BranchPolicy::MixedSlots;
  throw InvalidParams("unknown branch policy: " + s);
}

std::uint64_t sampling_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("FLEXGATE_SEED")) return std::strtoull(env, nullptr, 10);
  return flag_seed;
}

Polyhedron load_mesh(const std::string& path, const std::string& orientation,
                     MeshDocument* doc_out = nullptr) {
  MeshDocument doc = read_mesh_document(path);
  if (doc_out) *doc_out = doc;
  return build_polyhedron(doc.vertices, doc.faces, parse_orientation(orientation));
}

void emit(const json& j, bool pretty) { std::cout << j.dump(pretty ? 2 : -1) << "\n"; }

int cmd_analyze(const std::string& mesh_path, const std::string& orientation, bool pretty) {
  const Polyhedron p = load_mesh(mesh_path, orientation);
  const TopologyStats stats = topology_stats(p);

  json j;
  j["mesh"] = {{"V", stats.V},
               {"E", stats.E},
               {"F", stats.F},
               {"euler_characteristic", stats.euler_char},
               {"orientable", stats.orientable},
               {"oriented", p.oriented},
               {"genus_or_crosscaps", stats.genus_or_crosscaps}};

  int degenerate_faces = 0;
  json faces = json::array();
  for (int f = 0; f < p.face_count(); ++f) {
    const bool deg = is_face_degenerate(p, f);
    if (deg) ++degenerate_faces;
    faces.push_back({{"vertices", p.faces[f]}, {"degenerate", deg}});
  }
  j["faces"] = std::move(faces);
  j["degenerate_face_count"] = degenerate_faces;

  int flat_edges = 0;
  json edges = json::array();
  if (p.oriented) {
    for (const auto& frame : edge_frames(p)) {
      auto [i, jv] = p.edges[frame.edge_id];
      json entry = {{"edge", std::to_string(i) + "-" + std::to_string(jv)},
                    {"length", norm(p.vertices[jv] - p.vertices[i])}};
      try {
        const DihedralData d = dihedral_data(p, frame);
        const bool flat = std::abs(d.sin_phi) <= kDefaultTrigTol;
        if (flat) ++flat_edges;
        entry["phi"] = d.phi;
        entry["cos_phi"] = d.cos_phi;
        entry["sin_phi"] = d.sin_phi;
        entry["flat"] = flat;
      } catch (const DegenerateFace&) {
        entry["degenerate_adjacent"] = true;
      }
      edges.push_back(std::move(entry));
    }
  } else {
    for (auto [i, jv] : p.edges)
      edges.push_back({{"edge", std::to_string(i) + "-" + std::to_string(jv)},
                       {"length", norm(p.vertices[jv] - p.vertices[i])}});
  }
  j["edges"] = std::move(edges);
  j["flat_edge_count"] = flat_edges;
  emit(j, pretty);
  return kExitOk;
}

int cmd_flexspace(const std::string& mesh_path, const std::string& orientation, double rank_tol,
                  bool pretty) {
  const Polyhedron p = load_mesh(mesh_path, orientation);
  const FlexSpaceReport rep = flex_space(p, rank_tol);
  json j;
  j["kernel_dim"] = rep.kernel_dim;
  j["infinitesimally_flexible"] = rep.infinitesimally_flexible;
  j["singular_values"] = rep.singular_values;
  j["nontrivial_basis"] = json::array();
  for (const auto& flex : rep.nontrivial_basis) {
    json vel = json::array();
    for (const auto& v : flex.velocities) vel.push_back({v.x, v.y, v.z});
    j["nontrivial_basis"].push_back(std::move(vel));
  }
  emit(j, pretty);
  return kExitOk;
}

int cmd_certify(const std::string& mesh_path, const std::string& flex_path,
                const std::string& basis_path, const std::string& orientation,
                const CertifyOptions& opts, double decomp_tol, std::int64_t max_denominator,
                double recon_eps, bool pretty) {
  MeshDocument doc;
  const Polyhedron p = load_mesh(mesh_path, orientation, &doc);
  const FirstOrderFlex flex = read_flex_file(flex_path);

  std::optional<LengthBasis> basis = doc.basis;
  auto alpha = doc.alpha;
  if (!basis_path.empty()) {
    const BasisDocument bd = read_basis_file(basis_path);
    basis = bd.basis;
    alpha = bd.alpha;
  }
  const LengthDecomposition decomp =
      resolve_decomposition(p, basis, alpha, decomp_tol, max_denominator, recon_eps);

  const CertifyReport rep = certify(p, flex, decomp, opts);
  std::cout << certify_report_to_json(rep, pretty) << "\n";
  return rep.obstructed ? kExitObstructed : kExitOk;
}

int cmd_continue(const std::string& mesh_path, int direction_index,
                 const std::string& orientation, int steps, double step_size, double newton_tol,
                 const std::string& out_mesh, double decomp_tol, std::int64_t max_denominator,
                 double recon_eps) {
  MeshDocument doc;
  const Polyhedron p = load_mesh(mesh_path, orientation, &doc);
  const FlexSpaceReport fs = flex_space(p);
  if (direction_index < 0 || direction_index >= static_cast<int>(fs.nontrivial_basis.size()))
    throw InvalidParams("direction index " + std::to_string(direction_index) +
                        " out of range: mesh has " +
                        std::to_string(fs.nontrivial_basis.size()) +
                        " nontrivial flex directions");
  const LengthDecomposition decomp =
      resolve_decomposition(p, doc.basis, doc.alpha, decomp_tol, max_denominator, recon_eps);

  const ContinuationResult result =
      continue_flex(p, fs.nontrivial_basis[direction_index], step_size, steps, newton_tol);

  std::cout << "t,maxEdgeDrift";
  for (int j = 1; j <= decomp.basis.size(); ++j) std::cout << ",dehnExpr_" << j;
  std::cout << ",kernelDim\n";
  std::cout.precision(17);
  for (const auto& step : result.steps) {
    const Polyhedron at = with_positions(p, step.positions);
    double drift = 0.0;
    for (int e = 0; e < p.edge_count(); ++e) {
      auto [i, j] = p.edges[e];
      drift = std::max(drift, std::abs(norm(step.positions[j] - step.positions[i]) -
                                       norm(p.vertices[j] - p.vertices[i])));
    }
    std::cout << step.t << "," << drift;
    for (double v : dehn_expression_values(at, decomp)) std::cout << "," << v;
    std::cout << "," << step.kernel_dim << "\n";
  }

  if (!out_mesh.empty()) {
    const Polyhedron final_mesh = with_positions(p, result.steps.back().positions);
    std::ofstream out(out_mesh);
    if (!out) throw ParseError("cannot write mesh file: " + out_mesh);
    out << mesh_to_json(final_mesh) << "\n";
  }
  return kExitOk;
}

int cmd_gen(const std::string& name, const std::string& out_path, bool with_basis) {
  ExampleSpec spec;
  if (name == "tetra-regular") {
    spec.name = ExampleSpec::Name::TetraRegular;
    spec.params = {1.0};
  } else if (name == "bipyramid-q") {
    spec.name = ExampleSpec::Name::BipyramidQ;
  } else if (name == "bricard1") {
    spec.name = ExampleSpec::Name::Bricard1;
  } else if (name == "octa-regular") {
    spec.name = ExampleSpec::Name::OctaRegular;
    spec.params = {1.0};
  } else {
    throw UnknownExample("unknown example name: " + name +
                         " (expected tetra-regular, bipyramid-q, bricard1, octa-regular)");
  }
  const Polyhedron p = gen_example(spec);

  std::optional<LengthBasis> basis;
  std::optional<LengthDecomposition> decomp;
  if (with_basis) {
    if (name == "bipyramid-q") {
      // {1, 4*sqrt(3)-3} spans the edge lengths {8, 5, 4*sqrt(3)-3}.
      basis = LengthBasis{{{"1", 1.0}, {"4sqrt3-3", 4.0 * std::sqrt(3.0) - 3.0}}};
    } else {
      basis = auto_length_basis(p);
    }
    decomp = decompose_lengths(p, *basis);
  }

  const std::string text = mesh_to_json(p, basis, decomp);
  if (out_path.empty() || out_path == "-") {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot write mesh file: " + out_path);
    out << text << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Necessary-condition checks for extending first-order flexes of triangulated "
               "closed surfaces"};
  app.require_subcommand(1);
  app.fallthrough();  // let --orientation / --pretty appear after the subcommand

  std::string orientation = "auto";
  bool pretty = false;
  app.add_option("--orientation", orientation, "Winding handling: auto|keep|flip")
      ->capture_default_str();
  app.add_flag("--pretty", pretty, "Pretty-print JSON output");

  std::string mesh_path, flex_path, basis_path, out_path, gen_name;
  int direction_index = 0;

  auto* analyze = app.add_subcommand("analyze", "Topology and per-edge dihedral report");
  analyze->add_option("mesh", mesh_path, "Mesh file (.off or .json)")->required();

  auto* flexspace = app.add_subcommand("flexspace", "First-order flex space report");
  flexspace->add_option("mesh", mesh_path, "Mesh file")->required();
  double rank_tol = kDefaultRankTol;
  flexspace->add_option("--rank-tol", rank_tol, "Relative singular-value cutoff")
      ->capture_default_str();

  auto* certify_cmd = app.add_subcommand(
      "certify", "Run the extendibility necessary-condition checks on a first-order flex");
  certify_cmd->add_option("mesh", mesh_path, "Mesh file")->required();
  certify_cmd->add_option("flex", flex_path, "Flex file (JSON velocities)")->required();
  certify_cmd->add_option("basis", basis_path, "Optional basis file");
  CertifyOptions opts;
  double decomp_tol = kDefaultDecompTol;
  double recon_eps = kDefaultReconEps;
  std::int64_t max_denominator = kDefaultMaxDenominator;
  std::string policy = "prefer-stable";
  std::string minor_strategy = "auto";
  std::int64_t samples = kDefaultSampleCount;
  std::uint64_t seed = kDefaultSampleSeed;
  certify_cmd->add_option("--minor-size", opts.minor_size, "Minor size k (default 3V-7)");
  certify_cmd->add_option("--minor-strategy", minor_strategy, "full|sampled|auto")
      ->capture_default_str();
  certify_cmd->add_option("--samples", samples, "Sample count for sampled strategy")
      ->capture_default_str();
  certify_cmd->add_option("--seed", seed, "Sampling seed (FLEXGATE_SEED overrides)");
  certify_cmd->add_option("--policy", policy, "prefer-stable|force-r|force-s|mixed-slots")
      ->capture_default_str();
  certify_cmd->add_option("--flex-tol", opts.flex_tol)->capture_default_str();
  certify_cmd->add_option("--trig-tol", opts.trig_tol)->capture_default_str();
  certify_cmd->add_option("--rank-tol", opts.rank_tol)->capture_default_str();
  certify_cmd->add_option("--dehn-tol", opts.dehn_tol)->capture_default_str();
  certify_cmd->add_option("--branch-tol", opts.branch_tol)->capture_default_str();
  certify_cmd->add_option("--value-tol", opts.value_tol)->capture_default_str();
  certify_cmd->add_option("--deriv-tol", opts.deriv_tol)->capture_default_str();
  certify_cmd->add_option("--decomp-tol", decomp_tol)->capture_default_str();
  certify_cmd->add_option("--recon-eps", recon_eps)->capture_default_str();
  certify_cmd->add_option("--max-denominator", max_denominator)->capture_default_str();
  certify_cmd->add_flag("--minors-project-trivial", opts.minors_project_trivial,
                        "Also scan minors with the flex projected off the trivial motions");

  auto* continue_cmd = app.add_subcommand("continue", "Numeric flex continuation (CSV log)");
  continue_cmd->add_option("mesh", mesh_path, "Mesh file")->required();
  continue_cmd->add_option("direction", direction_index, "Nontrivial flex direction index")
      ->required();
  int steps = 50;
  double step_size = 1e-2;
  double newton_tol = kDefaultNewtonTol;
  continue_cmd->add_option("--steps", steps)->capture_default_str();
  continue_cmd->add_option("--step-size", step_size)->capture_default_str();
  continue_cmd->add_option("--newton-tol", newton_tol)->capture_default_str();
  continue_cmd->add_option("--out", out_path, "Write the final mesh JSON here");

  auto* gen = app.add_subcommand("gen", "Write a canonical example mesh");
  gen->add_option("name", gen_name, "tetra-regular|bipyramid-q|bricard1|octa-regular")
      ->required();
  gen->add_option("--out", out_path, "Output path (default stdout)");
  bool with_basis = false;
  gen->add_flag("--with-basis", with_basis, "Embed a length basis and alpha block");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(mesh_path, orientation, pretty);
    if (app.got_subcommand(flexspace))
      return cmd_flexspace(mesh_path, orientation, rank_tol, pretty);
    if (app.got_subcommand(certify_cmd)) {
      opts.policy = parse_policy(policy);
      if (minor_strategy == "full") {
        opts.strategy = MinorStrategy::full();
      } else if (minor_strategy == "sampled") {
        opts.strategy = MinorStrategy::sampled(samples, sampling_seed(seed));
      } else if (minor_strategy != "auto") {
        throw InvalidParams("unknown minor strategy: " + minor_strategy);
      }
      return cmd_certify(mesh_path, flex_path, basis_path, orientation, opts, decomp_tol,
                         max_denominator, recon_eps, pretty);
    }
    if (app.got_subcommand(continue_cmd))
      return cmd_continue(mesh_path, direction_index, orientation, steps, step_size, newton_tol,
                          out_path, kDefaultDecompTol, kDefaultMaxDenominator, kDefaultReconEps);
    if (app.got_subcommand(gen)) return cmd_gen(gen_name, out_path, with_basis);
  } catch (const ContinuationStalled& e) {
    std::cerr << "continuation stalled: " << e.what() << "\n";
    return kExitStalled;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

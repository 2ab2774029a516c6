// Command-line front end for the adversary bound laboratory.
//
// Subcommands: compute, rel-compute, gamma2, compose, verify, battery, report.
// Exit codes: 0 all checks passed; 1 a verdict or numerical check failed;
// 2 configuration or I/O problem; 3 a solver cap was exceeded.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "advlab/adversary.hpp"
#include "advlab/boolfn.hpp"
#include "advlab/compose.hpp"
#include "advlab/errors.hpp"
#include "advlab/harness.hpp"
#include "advlab/json_io.hpp"
#include "advlab/sdp.hpp"

namespace {

using namespace advlab;

constexpr int kExitPass = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCaps = 3;

struct CommonOpts {
  double tol = kDefaultSolveTol;
  std::string out;
  std::string format = "json";
  int max_dim = kMaxSdpDimension;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--tol", opts.tol, "solver / checker tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", opts.out, "write the JSON document to this path");
  cmd->add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"json", "markdown"}));
  cmd->add_option("--max-dim", opts.max_dim, "refuse Gram programs larger than this")
      ->check(CLI::PositiveNumber);
}

// flat human-readable rendering of a report document
void print_markdown(const Json& j, int depth = 0) {
  const std::string indent(2 * depth, ' ');
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      std::cout << indent << "- " << key << ":\n";
      print_markdown(value, depth + 1);
    } else if (value.is_array()) {
      std::cout << indent << "- " << key << ": " << value.dump() << "\n";
    } else {
      std::cout << indent << "- " << key << ": " << value.dump() << "\n";
    }
  }
}

void emit(const Json& doc, const CommonOpts& opts) {
  if (!opts.out.empty()) save_json_file(opts.out, doc);
  if (opts.format == "markdown")
    print_markdown(doc);
  else
    std::cout << pretty(doc);
}

std::string default_witness_path(const std::string& input) {
  return std::filesystem::path(input).stem().string() + ".witness.json";
}

void enforce_max_dim(int gram_dim, int max_dim) {
  if (gram_dim > max_dim)
    throw SizeError("Gram program dimension " + std::to_string(gram_dim) +
                    " exceeds --max-dim " + std::to_string(max_dim));
}

int cmd_compute(const std::string& path, const CommonOpts& opts) {
  const BooleanFunction g = function_from_json(load_json_file(path));
  enforce_max_dim(2 * g.arity() * static_cast<int>(g.domain_size()), opts.max_dim);
  const BoundCertificate cert = solve_adv(g, opts.tol);
  std::printf("value = %.9f\n", cert.value);
  const std::string wpath = opts.out.empty() ? default_witness_path(path) : opts.out;
  if (cert.functional_witness) {
    save_json_file(wpath, to_json(*cert.functional_witness));
    std::printf("witness written to %s\n", wpath.c_str());
  }
  if (opts.format == "markdown") print_markdown(to_json(cert));
  return cert.pass ? kExitPass : kExitVerdictFail;
}

int cmd_rel_compute(const std::string& path, const CommonOpts& opts) {
  const Relation f = relation_from_json(load_json_file(path));
  enforce_max_dim(relational_gram_dimension(f), opts.max_dim);
  const BoundCertificate cert = solve_adv_rel(f, opts.tol);
  std::printf("value = %.9f\n", cert.value);
  const std::string wpath = opts.out.empty() ? default_witness_path(path) : opts.out;
  if (cert.relational_witness) {
    save_json_file(wpath, to_json(*cert.relational_witness));
    std::printf("witness written to %s\n", wpath.c_str());
  }
  if (opts.format == "markdown") print_markdown(to_json(cert));
  return cert.pass ? kExitPass : kExitVerdictFail;
}

int cmd_gamma2(const std::string& path, const CommonOpts& opts) {
  const DenseMatrix a = matrix_from_json(load_json_file(path));
  const BoundCertificate cert = gamma2_filtered(a, opts.tol);
  std::printf("value = %.9f\n", cert.value);
  if (!opts.out.empty()) save_json_file(opts.out, to_json(cert));
  if (opts.format == "markdown") print_markdown(to_json(cert));
  return cert.pass ? kExitPass : kExitVerdictFail;
}

int cmd_compose(const std::string& function_path, const std::string& relation_path,
                const std::string& inner_path, bool force_direct, bool skip_direct,
                const CommonOpts& opts) {
  const BooleanFunction g = function_from_json(load_json_file(inner_path));
  DirectMode mode = DirectMode::Auto;
  if (force_direct) mode = DirectMode::Force;
  if (skip_direct) mode = DirectMode::Skip;

  CompositionReport rep;
  if (!function_path.empty()) {
    const BooleanFunction f = function_from_json(load_json_file(function_path));
    const int nh = f.arity() * g.arity();
    if (mode == DirectMode::Auto && nh <= kMaxSolveArity &&
        2 * nh * (1 << nh) > opts.max_dim)
      mode = DirectMode::Skip;
    rep = functional_composition_check(f, g, opts.tol, mode);
  } else {
    const Relation f = relation_from_json(load_json_file(relation_path));
    if (mode == DirectMode::Auto &&
        relational_gram_dimension(compose_relation(f, g)) > opts.max_dim)
      mode = DirectMode::Skip;
    rep = relational_composition_check(f, g, opts.tol, mode);
  }
  emit(to_json(rep), opts);
  return rep.pass ? kExitPass : kExitVerdictFail;
}

int cmd_verify(const std::string& witness_path, const std::string& function_path,
               const std::string& relation_path, const CommonOpts& opts) {
  const Json wj = load_json_file(witness_path);
  BoundCertificate cert;
  if (!function_path.empty()) {
    const BooleanFunction g = function_from_json(load_json_file(function_path));
    cert = check_functional_witness(g, functional_witness_from_json(wj), opts.tol);
  } else {
    const Relation f = relation_from_json(load_json_file(relation_path));
    cert = check_relational_witness(f, relational_witness_from_json(wj), opts.tol);
  }
  Json doc;
  doc["value"] = cert.value;
  doc["tolerance"] = cert.tolerance;
  Json residuals = Json::object();
  for (const auto& [k, v] : cert.residuals) residuals[k] = v;
  doc["residuals"] = std::move(residuals);
  doc["pass"] = cert.pass;
  emit(doc, opts);
  return cert.pass ? kExitPass : kExitVerdictFail;
}

int cmd_battery(std::uint64_t seed, bool force_direct, bool skip_direct, const CommonOpts& opts) {
  DirectMode mode = DirectMode::Auto;
  if (force_direct) mode = DirectMode::Force;
  if (skip_direct) mode = DirectMode::Skip;
  const FixtureRegistry fixtures;
  const RunReport rep = run_battery(seed, opts.tol, mode, fixtures);
  if (!opts.out.empty()) save_json_file(opts.out, to_json(rep));
  if (opts.format == "markdown")
    std::cout << render_markdown(rep);
  else
    std::cout << pretty(to_json(rep));
  return rep.pass ? kExitPass : kExitVerdictFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"negative-weight adversary bound laboratory"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string function_path, relation_path, inner_path, matrix_path, witness_path;
  std::uint64_t seed = 7;
  bool force_direct = false, skip_direct = false;

  auto* compute = app.add_subcommand("compute", "bound of a Boolean function");
  compute->add_option("--function", function_path, "function JSON")->required();
  add_common(compute, opts);

  auto* relc = app.add_subcommand("rel-compute", "bound of a relation");
  relc->add_option("--relation", relation_path, "relation JSON")->required();
  add_common(relc, opts);

  auto* gamma2 = app.add_subcommand("gamma2", "filtered norm of a target matrix");
  gamma2->add_option("--matrix", matrix_path, "matrix JSON")->required();
  add_common(gamma2, opts);

  auto* compose = app.add_subcommand("compose", "verify a blockwise composition");
  auto* cf = compose->add_option("--function", function_path, "outer function JSON");
  auto* cr = compose->add_option("--relation", relation_path, "outer relation JSON");
  compose->add_option("--inner", inner_path, "inner function JSON")->required();
  compose->add_flag("--direct", force_direct, "force the direct solve of the composition");
  compose->add_flag("--skip-direct", skip_direct, "skip the direct solve");
  cf->excludes(cr);
  add_common(compose, opts);

  auto* verify = app.add_subcommand("verify", "check a dual witness against its target");
  verify->add_option("--witness", witness_path, "witness JSON")->required();
  auto* vf = verify->add_option("--function", function_path, "function JSON");
  auto* vr = verify->add_option("--relation", relation_path, "relation JSON");
  vf->excludes(vr);
  add_common(verify, opts);

  auto* battery = app.add_subcommand("battery", "run the full verification battery");
  battery->add_option("--seed", seed, "battery seed");
  battery->add_flag("--direct", force_direct, "force direct composition solves");
  battery->add_flag("--skip-direct", skip_direct, "skip direct composition solves");
  add_common(battery, opts);

  auto* report = app.add_subcommand("report", "battery with a human-readable rendering");
  report->add_option("--seed", seed, "battery seed");
  report->add_flag("--direct", force_direct, "force direct composition solves");
  report->add_flag("--skip-direct", skip_direct, "skip direct composition solves");
  add_common(report, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (compute->parsed()) return cmd_compute(function_path, opts);
    if (relc->parsed()) return cmd_rel_compute(relation_path, opts);
    if (gamma2->parsed()) return cmd_gamma2(matrix_path, opts);
    if (compose->parsed()) {
      if (function_path.empty() == relation_path.empty())
        throw ConfigError("compose needs exactly one of --function or --relation");
      return cmd_compose(function_path, relation_path, inner_path, force_direct, skip_direct,
                         opts);
    }
    if (verify->parsed()) {
      if (function_path.empty() == relation_path.empty())
        throw ConfigError("verify needs exactly one of --function or --relation");
      if (opts.tol == kDefaultSolveTol) opts.tol = 1e-6;  // checker default
      return cmd_verify(witness_path, function_path, relation_path, opts);
    }
    if (battery->parsed()) return cmd_battery(seed, force_direct, skip_direct, opts);
    if (report->parsed()) {
      if (report->count("--format") == 0) opts.format = "markdown";
      return cmd_battery(seed, force_direct, skip_direct, opts);
    }
    throw ConfigError("no subcommand selected");
  } catch (const SizeError& e) {
    std::fprintf(stderr, "error (caps): %s\n", e.what());
    return kExitCaps;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return kExitConfig;
  } catch (const StructuralError& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return kExitConfig;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error (config): %s\n", e.what());
    return kExitConfig;
  } catch (const CertificateError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerdictFail;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "error (numeric): %s\n", e.what());
    return kExitVerdictFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitVerdictFail;
  }
}

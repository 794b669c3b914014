#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "gevrey/pipeline.hpp"
#include "gevrey/version.hpp"

namespace {

void add_common(CLI::App* cmd, std::string& spec_path, gevrey::PipelineOptions& opt) {
  cmd->add_option("spec", spec_path, "system spec file (JSON)")->required();
  cmd->add_option("--order", opt.order, "truncation order N");
  cmd->add_option("--theta", opt.theta, "direction in radians");
  cmd->add_option("--ray", opt.ray, "evaluation ray angle in radians");
  cmd->add_option("--samples", opt.samples, "number of sample moduli");
  cmd->add_option("--xmin", opt.xmin, "smallest sample modulus");
  cmd->add_option("--xmax", opt.xmax, "largest sample modulus");
  cmd->add_option("--tol", opt.tol, "quadrature relative tolerance");
  cmd->add_option("--seed", opt.seed, "seed recorded in reports");
  cmd->add_option("--level", opt.level, "Borel/Laplace level k (default: the spec's q)");
  cmd->add_option("--poly", opt.polys, "q-short polynomial, comma-separated rational coefficients (repeatable)");
  cmd->add_option("--func", opt.func_path, "convergent series F as MultiSeries JSON");
  cmd->add_option("--out", opt.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Borel-Laplace summation toolkit for interlaced final-form systems"};
  app.set_version_flag("--version", gevrey::kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> commands{"validate", "solve", "gauge", "shift", "borel",
                                          "sum", "stokes", "compose", "separate", "witness"};
  struct Invocation {
    std::string command;
    std::string spec_path;
    gevrey::PipelineOptions opt;
  };
  std::vector<std::unique_ptr<Invocation>> invocations;
  for (const std::string& name : commands) {
    auto inv = std::make_unique<Invocation>();
    inv->command = name;
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, inv->spec_path, inv->opt);
    inv->opt.out_dir = "gevrey-out/" + name;
    invocations.push_back(std::move(inv));
  }

  CLI11_PARSE(app, argc, argv);

  const Invocation* active = nullptr;
  for (size_t i = 0; i < commands.size(); ++i)
    if (app.get_subcommands().front()->get_name() == commands[i]) active = invocations[i].get();

  auto error_json = [](const char* kind, const std::string& msg) {
    gevrey::Json e;
    e["error"]["kind"] = kind;
    e["error"]["message"] = msg;
    std::cerr << e.dump() << std::endl;
  };

  try {
    gevrey::RunReport rep = gevrey::run_pipeline(active->command, active->spec_path, active->opt);
    for (const std::string& f : rep.files) std::cout << f << "\n";
    return 0;
  } catch (const gevrey::parse_error& e) {
    error_json("parse", e.what());
    return 1;
  } catch (const gevrey::validation_error& e) {
    error_json("validation", e.what());
    return 1;
  } catch (const gevrey::numeric_error& e) {
    error_json("numeric", e.what());
    return 2;
  } catch (const std::exception& e) {
    error_json("numeric", e.what());
    return 2;
  }
}

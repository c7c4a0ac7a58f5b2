#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wflowcli/report.hpp"
#include "wflowcli/spec_io.hpp"
#include "wflowcli/suites.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

struct VerifyOptions {
  std::string spec_path;
  std::string example;
  std::string suite;
  std::int64_t seed = -1;  // -1 keeps the spec's own seed
  std::string out_path;
  std::string format = "text";
};

struct ExampleOptions {
  std::string name;
  std::string out_path;
  std::vector<int> blocks;
  std::vector<int> block_weights;
  int dimension = 4;
  std::uint64_t seed = 0;
  bool nontracial = false;
};

wflow::cli::ExampleParams to_params(const ExampleOptions& opt) {
  wflow::cli::ExampleParams p;
  if (!opt.blocks.empty()) p.blocks = opt.blocks;
  if (!opt.block_weights.empty()) p.block_weights = opt.block_weights;
  p.dimension = opt.dimension;
  p.seed = opt.seed;
  p.nontracial = opt.nontracial;
  return p;
}

void emit(const std::string& text, const std::string& out_path) {
  if (!out_path.empty()) {
    std::FILE* f = std::fopen(out_path.c_str(), "wb");
    if (f == nullptr) throw wflow::InputError("cannot open output file: " + out_path);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
  }
  std::cout << text;
}

int run_verify(const VerifyOptions& opt, const ExampleOptions& ex) {
  wflow::cli::SystemSpec spec;
  if (!opt.spec_path.empty())
    spec = wflow::cli::load_spec(opt.spec_path);
  else
    spec = wflow::cli::make_example(opt.example, to_params(ex));
  if (opt.seed >= 0) spec.seed = static_cast<std::uint64_t>(opt.seed);

  wflow::cli::Report report = wflow::cli::run_suite(spec, opt.suite);
  emit(opt.format == "json" ? report.to_json() : report.to_text(), opt.out_path);
  return wflow::cli::exit_code(report);
}

int run_example(const ExampleOptions& opt) {
  const wflow::cli::SystemSpec spec = wflow::cli::make_example(opt.name, to_params(opt));
  const std::string text = wflow::cli::save_spec(spec);
  emit(text, opt.out_path);
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted-flow operator-algebra verification toolkit"};
  app.require_subcommand(1);

  VerifyOptions vopt;
  ExampleOptions eopt;

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite and report results");
  auto* spec_opt = verify->add_option("--spec", vopt.spec_path, "path to a spec JSON file");
  auto* example_opt =
      verify->add_option("--example", vopt.example, "built-in input: full3, nest, jordan4, random");
  spec_opt->excludes(example_opt);
  verify->add_option("--suite", vopt.suite,
                     "identities, hardy, reflexivity, approximation, nogo, or all")
      ->required();
  verify->add_option("--seed", vopt.seed, "override the input's sampling seed");
  verify->add_option("--out", vopt.out_path, "also write the report to this file");
  verify->add_option("--format", vopt.format, "report format (default text)")
      ->check(CLI::IsMember({"json", "text"}));
  verify->add_option("--dimension", eopt.dimension, "random example: matrix dimension (1..6)");
  verify->add_flag("--nontracial", eopt.nontracial,
                   "random example: attach a seeded non-tracial state density");
  verify->add_option("--blocks", eopt.blocks, "nest example: block sizes");
  verify->add_option("--weights", eopt.block_weights, "nest example: strictly decreasing block weights");

  CLI::App* example = app.add_subcommand("example", "emit a built-in spec file");
  example->add_option("name", eopt.name, "full3, nest, jordan4, or random")->required();
  example->add_option("--out", eopt.out_path, "write the spec to this file");
  example->add_option("--dimension", eopt.dimension, "random example: matrix dimension (1..6)");
  example->add_option("--seed", eopt.seed, "random example: generation seed");
  example->add_flag("--nontracial", eopt.nontracial,
                    "random example: attach a seeded non-tracial state density");
  example->add_option("--blocks", eopt.blocks, "nest example: block sizes");
  example->add_option("--weights", eopt.block_weights, "nest example: strictly decreasing block weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (verify->parsed()) {
      if (vopt.spec_path.empty() == vopt.example.empty())
        throw wflow::InputError("verify: exactly one of --spec or --example is required");
      eopt.seed = vopt.seed >= 0 ? static_cast<std::uint64_t>(vopt.seed) : 0;
      return run_verify(vopt, eopt);
    }
    return run_example(eopt);
  } catch (const wflow::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

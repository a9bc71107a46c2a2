#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "blockdp/errors.hpp"
#include "blockdp/population.hpp"
#include "blockdp/serialization.hpp"
#include "commands.hpp"

namespace blockdp::cli {

namespace {

struct GenOpts {
  std::string spec_path;
  std::string out_path;
  int n = 1000;
  std::uint64_t seed = 1;
};

int gen_main(const GenOpts& opts) {
  std::ifstream in(opts.spec_path);
  if (!in) throw ConfigError("config: cannot open " + opts.spec_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: " + opts.spec_path + ": " + e.what());
  }
  const PopulationSpec spec = parse_population_spec(j);
  const Dataset dataset = sample_dataset(spec, opts.n, mix_seed(opts.seed, 0, "data"));
  const std::string csv = dataset_csv(dataset);

  if (opts.out_path == "-") {
    std::fwrite(csv.data(), 1, csv.size(), stdout);
    return 0;
  }
  std::ofstream out(opts.out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + opts.out_path);
  out << csv;
  return 0;
}

}  // namespace

void register_gen(CLI::App& app, int& rc) {
  auto opts = std::make_shared<GenOpts>();
  CLI::App* sub =
      app.add_subcommand("gen", "sample a dataset from a population spec and write it as CSV");
  sub->add_option("--spec", opts->spec_path, "population spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--n", opts->n, "individuals to sample")->check(CLI::PositiveNumber);
  sub->add_option("--seed", opts->seed, "sampling seed");
  sub->add_option("--out", opts->out_path, "output CSV path, or - for stdout")->required();
  sub->callback([opts, &rc] { rc = gen_main(*opts); });
}

}  // namespace blockdp::cli

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockdp/version.hpp"
#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct CommandResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

CommandResult run_cli(const std::string& args) {
  const std::string cmd = std::string(BLOCKDP_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CommandResult r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Fresh per-test scratch directory under the build tree.
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(BLOCKDP_TEST_TMPDIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out.good());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  return fields;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream ss(text);
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

const char* kTinyRunConfig = R"({
  "population": {"model": "independent_blocks", "m": 6, "blocks": {"size": 2}},
  "mechanism": {"policy": {"kind": "cross_block_refusal"}, "answerer": "exact"},
  "analyst": {"strategy": "random", "family": "threshold", "steps": 8},
  "bound": {"theorem": "full", "sample_alpha": 0.1, "beta_target": 0.2},
  "n": 50, "trials": 10, "base_seed": 7
})";

TEST_SUITE_BEGIN("cli");

TEST_CASE("version flag prints the library version") {
  const CommandResult r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.output == std::string(blockdp::kVersion) + "\n");
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("bounds --no-such-flag 1").exit_code == 2);
  CHECK(run_cli("run --out somewhere").exit_code == 2);  // --config is required
}

TEST_CASE("bounds evaluates fixed slacks to the known transfer values") {
  const CommandResult r = run_cli(
      "bounds --csv --theorem transfer --eps 0.1 --delta 1e-6 --alpha 0.05 --beta 0.01 "
      "--slack-c 0.1 --slack-f 0.05");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "theorem,eps,delta,alpha,beta,m,n,p,width,slack_c,slack_f,"
        "alpha_prime,beta_prime,feasible,min_achievable_beta");
  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == 15);
  CHECK(fields[0] == "transfer");
  CHECK(std::stod(fields[11]) == 0.3551709180756476);
  CHECK(std::stod(fields[12]) == 0.10002);
  CHECK(fields[13] == "1");
}

TEST_CASE("bounds optimizes slack constants when none are pinned") {
  const CommandResult r = run_cli(
      "bounds --csv --theorem full --eps 0.1 --delta 1e-6 --alpha 0.05 --beta 0.01 "
      "--m 22 --n 100 --beta-target 0.05");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 2);
  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == 15);
  CHECK(fields[0] == "full");
  CHECK(std::stod(fields[9]) == doctest::Approx(4.462225396744417).epsilon(1e-6));
  CHECK(std::stod(fields[10]) == doctest::Approx(0.031552698372208095).epsilon(1e-6));
  CHECK(std::stod(fields[11]) == doctest::Approx(4.680501711564481).epsilon(1e-9));
  CHECK(std::stod(fields[12]) <= 0.05 * (1.0 + 1e-9));
  CHECK(fields[13] == "1");
}

TEST_CASE("bounds reports an infeasible target without failing") {
  const CommandResult r = run_cli(
      "bounds --csv --theorem full --eps 0.1 --delta 0.01 --alpha 0.05 --beta 0.01 "
      "--m 10 --n 100 --beta-target 1e-6");
  REQUIRE(r.exit_code == 0);
  const auto fields = split(lines_of(r.output)[1], ',');
  REQUIRE(fields.size() == 15);
  CHECK(fields[13] == "0");
  CHECK(std::stod(fields[14]) == doctest::Approx(0.002).epsilon(1e-12));
}

TEST_CASE("bounds handles the label split theorem") {
  const CommandResult r = run_cli(
      "bounds --csv --theorem label --alpha0 0.1 --beta0 0.01 --alpha1 0.2 --beta1 0.02 "
      "--p-label 0.5 --n 10000 --margin 2.0");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "theorem,alpha0,beta0,alpha1,beta1,p_label,n,margin,alpha,beta");
  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == 10);
  CHECK(std::stod(fields[8]) == 0.16000000000000003);
  CHECK(std::stod(fields[9]) == 0.03067092525580502);
}

TEST_CASE("bounds handles the sequential composition baseline") {
  const CommandResult r =
      run_cli("bounds --csv --theorem naive --eps 0.1 --delta 0 --k 100 --delta-prime 1e-6");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.output);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "theorem,eps,delta,k,delta_prime,eps_total,delta_total");
  const auto fields = split(lines[1], ',');
  REQUIRE(fields.size() == 7);
  CHECK(std::stod(fields[5]) == 6.308230950513408);
  CHECK(std::stod(fields[6]) == 1e-6);
}

TEST_CASE("bounds rejects bad inputs with exit 2") {
  CHECK(run_cli("bounds --theorem full --slack-c 0.1").exit_code == 2);
  CHECK(run_cli("bounds --theorem quantum").exit_code == 2);
  const CommandResult r =
      run_cli("bounds --theorem transfer --alpha -1 --slack-c 0.1 --slack-f 0.1");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("error:") != std::string::npos);
}

TEST_CASE("gen samples a deterministic labeled dataset") {
  const fs::path dir = scratch("cli_gen");
  write_file(dir / "spec.json", R"({
    "model": "labeled", "m": 3,
    "marginals": {"kind": "bernoulli", "theta": 0.5},
    "label": {"kind": "bernoulli", "q": 0.3}
  })");

  const std::string spec = (dir / "spec.json").string();
  REQUIRE(run_cli("gen --spec " + spec + " --n 20 --seed 5 --out " + (dir / "a.csv").string())
              .exit_code == 0);
  REQUIRE(run_cli("gen --spec " + spec + " --n 20 --seed 5 --out " + (dir / "b.csv").string())
              .exit_code == 0);
  REQUIRE(run_cli("gen --spec " + spec + " --n 20 --seed 6 --out " + (dir / "c.csv").string())
              .exit_code == 0);

  const std::string a = read_file(dir / "a.csv");
  CHECK(a == read_file(dir / "b.csv"));
  CHECK(a != read_file(dir / "c.csv"));

  const auto lines = lines_of(a);
  REQUIRE(lines.size() == 21);
  CHECK(lines[0] == "attr_1,attr_2,attr_3,label");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    for (const std::string& cell : split(lines[i], ',')) {
      CHECK((cell == "0" || cell == "1"));
    }
  }

  // Stdout mode emits exactly the file bytes.
  const CommandResult piped = run_cli("gen --spec " + spec + " --n 20 --seed 5 --out -");
  CHECK(piped.exit_code == 0);
  CHECK(piped.output == a);
}

TEST_CASE("gen rejects malformed specs with exit 2") {
  const fs::path dir = scratch("cli_gen_bad");
  write_file(dir / "broken.json", "{nope");
  write_file(dir / "unknown.json", R"({"model": "zebra", "m": 3})");

  CHECK(run_cli("gen --spec " + (dir / "broken.json").string() + " --out -").exit_code == 2);
  CHECK(run_cli("gen --spec " + (dir / "unknown.json").string() + " --out -").exit_code == 2);
  CHECK(run_cli("gen --spec " + (dir / "missing.json").string() + " --out -").exit_code == 2);
}

TEST_CASE("run writes summary.json and results.csv and reruns byte-identically") {
  const fs::path dir = scratch("cli_run");
  write_file(dir / "config.json", kTinyRunConfig);
  const std::string cfg = (dir / "config.json").string();

  const CommandResult first =
      run_cli("run --config " + cfg + " --out " + (dir / "out1").string());
  REQUIRE(first.exit_code == 0);
  CHECK(first.output.find("theorem full:") != std::string::npos);
  CHECK(first.output.find("check FAIL") != std::string::npos);  // beta' = 0 cannot be certified

  const std::string summary_text = read_file(dir / "out1" / "summary.json");
  const std::string results_text = read_file(dir / "out1" / "results.csv");
  REQUIRE(lines_of(results_text).size() == 11);

  const nlohmann::json summary = nlohmann::json::parse(summary_text);
  CHECK(summary.at("version") == blockdp::kVersion);
  CHECK(summary.at("config").at("n") == 50);
  CHECK(summary.at("check").at("passed") == false);
  CHECK(summary.at("empirical").at("sample_failure").at("failures") == 0);

  REQUIRE(run_cli("run --config " + cfg + " --out " + (dir / "out2").string() + " --jobs 3")
              .exit_code == 0);
  CHECK(read_file(dir / "out2" / "summary.json") == summary_text);
  CHECK(read_file(dir / "out2" / "results.csv") == results_text);
}

TEST_CASE("run exports transcripts for the first trials on request") {
  const fs::path dir = scratch("cli_run_transcripts");
  write_file(dir / "config.json", kTinyRunConfig);

  REQUIRE(run_cli("run --config " + (dir / "config.json").string() + " --out " +
                  (dir / "out").string() + " --transcripts 2")
              .exit_code == 0);

  const auto transcripts = lines_of(read_file(dir / "out" / "transcripts.csv"));
  REQUIRE(transcripts.size() == 17);  // header + 2 trials x 8 accepted queries
  CHECK(transcripts[0] ==
        "trial_id,step,query_descriptor,window_lo,window_hi,answer,sample_value,population_value");
  CHECK(split(transcripts[1], ',')[0] == "0");
  CHECK(split(transcripts[16], ',')[0] == "1");

  const auto rejections = lines_of(read_file(dir / "out" / "rejections.csv"));
  REQUIRE(rejections.size() == 1);  // header only: nothing is refused here
  CHECK(rejections[0] == "trial_id,step,query_descriptor,reason");
}

TEST_CASE("run check mode exits 3 when the bound cannot cover the rate") {
  const fs::path dir = scratch("cli_run_check");
  write_file(dir / "config.json", R"({
    "population": {"model": "independent_blocks", "m": 6, "blocks": {"size": 2}},
    "mechanism": {"policy": {"kind": "cross_block_refusal"}, "answerer": "exact"},
    "analyst": {"strategy": "random", "family": "threshold", "steps": 8},
    "bound": {"theorem": "full", "sample_alpha": 0.1, "sample_beta": 0.5, "beta_target": 1e-6},
    "n": 50, "trials": 5, "base_seed": 7
  })");
  const std::string cfg = (dir / "config.json").string();

  const CommandResult plain = run_cli("run --config " + cfg + " --out " + (dir / "a").string());
  CHECK(plain.exit_code == 0);  // reporting an uncovered rate is not an error
  CHECK(plain.output.find("infeasible target") != std::string::npos);

  const CommandResult checked =
      run_cli("run --config " + cfg + " --out " + (dir / "b").string() + " --check");
  CHECK(checked.exit_code == 3);
  CHECK(checked.output.find("check FAIL") != std::string::npos);
}

TEST_CASE("run check mode exits 0 when the bound covers the rate") {
  const fs::path dir = scratch("cli_run_pass");
  write_file(dir / "config.json", R"({
    "population": {"model": "independent_blocks", "m": 6, "blocks": {"size": 2}},
    "mechanism": {"policy": {"kind": "cross_block_refusal"}, "answerer": "laplace",
                  "eps_cap": 1.0, "quota": 10},
    "analyst": {"strategy": "random", "family": "threshold", "steps": 8},
    "bound": {"theorem": "full", "sample_alpha": 0.3, "beta_target": 0.3},
    "n": 400, "trials": 10, "base_seed": 7
  })");

  const CommandResult r = run_cli("run --config " + (dir / "config.json").string() + " --out " +
                                  (dir / "out").string() + " --check");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("check PASS") != std::string::npos);
}

TEST_CASE("run surfaces config problems as exit 2") {
  const fs::path dir = scratch("cli_run_bad");
  write_file(dir / "zero_n.json", R"({
    "population": {"model": "independent_blocks", "m": 6, "blocks": {"size": 2}},
    "mechanism": {"policy": {"kind": "cross_block_refusal"}, "answerer": "exact"},
    "analyst": {"strategy": "random", "family": "threshold", "steps": 8},
    "bound": {"theorem": "full"},
    "n": 0, "trials": 5
  })");
  write_file(dir / "broken.json", "[not json");

  const std::string out = (dir / "out").string();
  CHECK(run_cli("run --config " + (dir / "zero_n.json").string() + " --out " + out).exit_code ==
        2);
  CHECK(run_cli("run --config " + (dir / "broken.json").string() + " --out " + out).exit_code ==
        2);
  CHECK(run_cli("run --config " + (dir / "missing.json").string() + " --out " + out).exit_code ==
        2);
}

TEST_SUITE_END();

}  // namespace

#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "inclab/covariance.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out_path = dir / "stdout.txt";
  const std::string command = "cd '" + dir.string() + "' && '" + INCLAB_CLI_PATH + "' " + args +
                              " > stdout.txt 2> stderr.txt";
  const int status = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.stdout_text = read_file(out_path);
  return result;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("inclab_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("check command: exit codes and report shape") {
  TempDir dir;
  inclab::write_matrix_csv(inclab::identity_cov(5), (dir.path / "id5.csv").string());

  const RunResult holds =
      run_cli("check --matrix id5.csv --support 0..1 --spread 2 --delta 0.5 --condition mri",
              dir.path);
  CHECK(holds.exit_code == 0);
  const auto report = nlohmann::json::parse(holds.stdout_text);
  CHECK(report.at("condition_name") == "mri");
  CHECK(report.at("holds") == true);
  CHECK(report.at("margins").size() == 2 * 3 * 2);

  const RunResult fails = run_cli(
      "check --matrix id5.csv --support 0,1 --spread 2 --delta 1.0 --condition mri", dir.path);
  CHECK(fails.exit_code == 1);

  std::ofstream(dir.path / "rect.csv") << "1,0,0\n0,1,0\n";
  const RunResult input_error =
      run_cli("check --matrix rect.csv --support 0 --condition mri", dir.path);
  CHECK(input_error.exit_code == 2);

  // Manifest is written even on failure and carries the error.
  const auto manifest = nlohmann::json::parse(read_file(dir.path / "inclab_check.manifest.json"));
  CHECK(manifest.contains("error"));
  CHECK(manifest.at("command") == "check");
  CHECK(manifest.contains("started_at"));
  CHECK(manifest.contains("finished_at"));
}

TEST_CASE("check command: lai value on the aligned-block boundary") {
  TempDir dir;
  const inclab::Support support({0, 1}, 3);
  // r eta / (1 + (r-1) mu) = 1 exactly at eta = (1 + mu)/2.
  inclab::write_matrix_csv(inclab::block_example_cov(3, support, {2}, 0.3, 0.65, 0),
                           (dir.path / "block.csv").string());
  const RunResult lai =
      run_cli("check --matrix block.csv --support 0,1 --condition lai", dir.path);
  const auto report = nlohmann::json::parse(lai.stdout_text);
  CHECK(report.at("binding").at("lhs").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lai.exit_code == 0);  // holds at delta = 0 (non-strict threshold 1)

  // delta_2 scans 2x2 principal blocks: max(|mu|, |eta|) here.
  const RunResult rip = run_cli("check --matrix block.csv --support 0,1 --condition rip:2",
                                dir.path);
  CHECK(nlohmann::json::parse(rip.stdout_text).at("binding").at("lhs").get<double>() ==
        doctest::Approx(0.65).epsilon(1e-6));
}

TEST_CASE("region command is deterministic and reproduces the figure structure") {
  TempDir dir;
  const RunResult first = run_cli("region --r 2 --R 1 --grid 20 --out region_a.csv", dir.path);
  CHECK(first.exit_code == 0);
  const RunResult second = run_cli("region --r 2 --R 1 --grid 20 --out region_b.csv", dir.path);
  CHECK(second.exit_code == 0);
  const std::string a = read_file(dir.path / "region_a.csv");
  CHECK(a == read_file(dir.path / "region_b.csv"));
  CHECK(a.rfind("mu,eta,lasso_ok,mri_closed,mri_direct,pwi_ok,psd_ok,mri_slack\n", 0) == 0);
  CHECK(nlohmann::json::parse(read_file(dir.path / "region_a.csv.manifest.json"))
            .at("outputs")[0] == "region_a.csv");
}

TEST_CASE("thread cap does not change results") {
  TempDir dir;
  const std::string flags = "region --r 3 --R 2 --grid 16";
  const std::string one = "INCOHERENCE_LAB_THREADS=1 '" + std::string(INCLAB_CLI_PATH) + "' " +
                          flags + " --out one.csv";
  const std::string many = "INCOHERENCE_LAB_THREADS=4 '" + std::string(INCLAB_CLI_PATH) + "' " +
                           flags + " --out many.csv";
  CHECK(std::system(("cd '" + dir.path.string() + "' && " + one + " > /dev/null").c_str()) == 0);
  CHECK(std::system(("cd '" + dir.path.string() + "' && " + many + " > /dev/null").c_str()) == 0);
  CHECK(read_file(dir.path / "one.csv") == read_file(dir.path / "many.csv"));
}

TEST_CASE("verify command exits zero on clean suites") {
  TempDir dir;
  const RunResult conjecture =
      run_cli("verify --suite conjecture1 --instances 150 --seed 5", dir.path);
  CHECK(conjecture.exit_code == 0);
  const auto summary = nlohmann::json::parse(conjecture.stdout_text);
  CHECK(summary.at("suite") == "conjecture1");
  CHECK(summary.at("violations") == 0);

  const RunResult theorem =
      run_cli("verify --suite theorem1 --instances 24 --seed 5", dir.path);
  CHECK(theorem.exit_code == 0);

  const RunResult unknown = run_cli("verify --suite nonsense", dir.path);
  CHECK(unknown.exit_code == 2);
}

TEST_CASE("sample command: determinism and PSD rejection") {
  TempDir dir;
  const std::string flags =
      "sample --p 40 --s 3 --n-grid 20,80 --sigma 1 --rho 1 --R 1 --replicates 40 --seed 11 "
      "--family identity --delta 0.1";
  CHECK(run_cli(flags + " --out sweep_a.csv", dir.path).exit_code == 0);
  CHECK(run_cli(flags + " --out sweep_b.csv", dir.path).exit_code == 0);
  const std::string a = read_file(dir.path / "sweep_a.csv");
  CHECK(a == read_file(dir.path / "sweep_b.csv"));
  CHECK(a.rfind("p,s,n,success_rate,replicates,seed\n", 0) == 0);

  const RunResult psd_reject = run_cli(
      "sample --p 40 --s 4 --n-grid 20 --replicates 4 --family block:0.99,0.9,2 --seed 1 "
      "--out bad.csv",
      dir.path);
  CHECK(psd_reject.exit_code == 2);
  CHECK(!fs::exists(dir.path / "bad.csv"));
}

TEST_SUITE_END();

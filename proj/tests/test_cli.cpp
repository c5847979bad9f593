#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef UFA_CLI_PATH
#error "UFA_CLI_PATH must point at the built command-line tool"
#endif

namespace fs = std::filesystem;

namespace {

struct run_result {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct scratch_dir {
  fs::path path = fs::temp_directory_path() / ("ufa_cli_test_" + std::to_string(::getpid()));
  scratch_dir() { fs::create_directories(path); }
  ~scratch_dir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

const fs::path& scratch() {
  static const scratch_dir dir;
  return dir.path;
}

run_result run(const std::string& args) {
  const auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = std::string("'") + UFA_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return {WEXITSTATUS(status), slurp(out), slurp(err)};
}

std::string kv_value(const std::string& text, const std::string& key) {
  const std::string body = "\n" + text;
  const auto pos = body.find("\n" + key + "=");
  REQUIRE(pos != std::string::npos);
  const auto start = pos + key.size() + 2;
  return body.substr(start, body.find('\n', start) - start);
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

} // namespace

TEST_CASE("build succeeds on the sine task and verify reproduces the residual") {
  const auto net = (scratch() / "sine.ufanet").string();
  const auto b = run("build --builtin sine-bump --per-axis 101 --shift 1 --sigma sigmoid --g identity --tol 1e-9 "
                     "--format kv -o '" + net + "'");
  CHECK(b.code == 0);
  CHECK(std::stod(kv_value(b.out, "max_abs_residual")) <= 1e-9);
  CHECK(kv_value(b.out, "passed") == "true");
  CHECK(slurp(net).rfind("UFANET v1\n", 0) == 0);

  const auto v = run("verify --network '" + net + "' --builtin sine-bump --per-axis 101 --shift 1 --format kv");
  CHECK(v.code == 0);
  CHECK(kv_value(v.out, "max_abs_residual") == kv_value(b.out, "max_abs_residual"));
  CHECK(kv_value(v.out, "sse") == kv_value(b.out, "sse"));

  const auto e = run("eval --network '" + net + "' --point 1.25 --point 1.5");
  CHECK(e.code == 0);
  CHECK(e.out.find("0.782842712474619") != std::string::npos);

  const auto miss = run("eval --network '" + net + "' --point 1.251");
  CHECK(miss.code == 3);
  CHECK(miss.err.find("NoMatchingAnchor") != std::string::npos);

  const auto near = run("eval --network '" + net + "' --point 1.251 --routing nearest-anchor");
  CHECK(near.code == 0);

  const auto other = run("verify --network '" + net + "' --builtin sine-bump --per-axis 51 --shift 1");
  CHECK(other.code == 3);
  CHECK(other.err.find("AnchorMismatch") != std::string::npos);
}

TEST_CASE("build from csv and verify against the same file") {
  const auto csv = scratch() / "swirl.csv";
  const auto net = (scratch() / "swirl.ufanet").string();
  std::ostringstream rows;
  rows << "x1,x2,y1,y2\n";
  for (int i = 1; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j) rows << i * 0.25 << "," << j * 0.25 << "," << 0.1 * i << "," << 0.05 * j << "\n";
  write_file(csv, rows.str());
  const auto b = run("build --input '" + csv.string() + "' --g sigmoid --sigma sigmoid --sigma 'scale:0.5,0.5:tanh' "
                     "--format kv -o '" + net + "'");
  CHECK(b.code == 0);
  const auto v = run("verify --network '" + net + "' --input '" + csv.string() + "' --format kv");
  CHECK(v.code == 0);
  CHECK(kv_value(v.out, "max_abs_residual") == kv_value(b.out, "max_abs_residual"));
}

TEST_CASE("hypothesis failures exit with 1") {
  const auto csv = scratch() / "bad.csv";
  write_file(csv, "x1,y1\n1,0.5\n2,2\n3,0.25\n");
  const auto c = run("check --input '" + csv.string() + "' --sigma sigmoid --format kv");
  CHECK(c.code == 1);
  CHECK(kv_value(c.out, "range_containment.passed") == "false");
  CHECK(kv_value(c.out, "range_containment.violation.0.sample") == "1");

  const auto s = run("check --input '" + csv.string() + "' --sigma sigmoid --suggest");
  CHECK(s.code == 1);
  CHECK(s.out.find("scale:") != std::string::npos);

  const auto b = run("build --input '" + csv.string() + "' --sigma sigmoid -o '" + (scratch() / "x").string() + "'");
  CHECK(b.code == 1);
  CHECK(b.err.find("RangeViolation") != std::string::npos);

  const auto w = run("build --builtin sine-bump --per-axis 11 -o '" + (scratch() / "y").string() + "'");
  CHECK(w.code == 1);
  CHECK(w.err.find("WeightUndefined") != std::string::npos);

  const auto ok = run("check --builtin gauss2d --per-axis 15 --shift 1");
  CHECK(ok.code == 0);
}

TEST_CASE("usage and data errors") {
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("build --builtin sine-bump --frob").code == 2);
  CHECK(run("eval --point 1").code == 2);
  CHECK(run("build --builtin sine-bump --input x.csv -o y").code == 2);
  CHECK(run("build --builtin sine-bump --shift 1 --sigma relu -o '" + (scratch() / "z").string() + "'").code == 2);
  CHECK(run("check --input /nonexistent/file.csv").code == 3);

  const auto dup = scratch() / "dup.csv";
  write_file(dup, "x1,y1\n0.5,0.5\n0.5,0.6\n");
  const auto d = run("check --input '" + dup.string() + "'");
  CHECK(d.code == 3);
  CHECK(d.err.find("ConflictingDuplicate") != std::string::npos);
}

TEST_CASE("compare and export-plot") {
  const auto loss = scratch() / "loss.csv";
  const auto c = run("compare --builtin sine-bump --per-axis 21 --shift 1 --iterations 200 --format kv --loss-csv '" +
                     loss.string() + "'");
  CHECK(c.code == 0);
  CHECK(kv_value(c.out, "ufa_wins_loss") == "true");
  CHECK(slurp(loss).rfind("iteration,mse\n0,", 0) == 0);

  const auto wild = run("compare --builtin sine-bump --per-axis 21 --shift 1 --lr 1e6");
  CHECK(wild.code == 0);

  const auto net = (scratch() / "g.ufanet").string();
  REQUIRE(run("build --builtin gauss2d --per-axis 5 --shift 1 -o '" + net + "'").code == 0);
  const auto plot = scratch() / "plot.csv";
  const auto p = run("export-plot --network '" + net + "' --builtin gauss2d --per-axis 9 --shift 1 -o '" +
                     plot.string() + "'");
  CHECK(p.code == 0);
  CHECK(slurp(plot).rfind("x1,x2,f1,net1\n", 0) == 0);
}

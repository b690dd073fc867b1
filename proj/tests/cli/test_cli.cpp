#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <random>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Workspace
{
  fs::path dir;
  Workspace()
  {
    dir = fs::temp_directory_path() /
          ("flattop_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

//! Runs the CLI with stdout and stderr captured; returns the exit status.
int
run(const std::string& args, const Workspace& ws, std::string* out = nullptr)
{
  const fs::path log = ws / "stdout.txt";
  const std::string cmd = std::string("\"") + FLATTOP_CLI_PATH + "\" " + args + " > \"" +
                          log.string() + "\" 2> \"" + (ws / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  if (out != nullptr) {
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void
write_series(const fs::path& p, int n, bool constant)
{
  std::ofstream out(p);
  std::uint64_t s = 12345;
  for (int t = 0; t < n; ++t) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    const double u = static_cast<double>(s >> 11) / 9007199254740992.0;
    out << (constant ? 1.0 : u * u * 3.0) << "\n";
  }
}

} // namespace

TEST_CASE("estimate a bispectrum from a file")
{
  Workspace ws;
  write_series(ws / "x.txt", 400, false);
  std::string out;
  CHECK(run("estimate -i " + (ws / "x.txt").string() + " --order 3 -w rpf -M 3 --at 2,1 --at 0,0", ws,
            &out) == 0);
  CHECK(out.rfind("omega1,omega2,re,im,M,window,N\n", 0) == 0);
  CHECK(out.find("rpf:c=0.51") != std::string::npos);
  CHECK(std::count(out.begin(), out.end(), '\n') == 3);
}

TEST_CASE("order-2 estimates are real")
{
  Workspace ws;
  write_series(ws / "x.txt", 300, false);
  std::string out;
  REQUIRE(run("estimate -i " + (ws / "x.txt").string() +
                " --order 2 -w trapezoid -M 4 --at 1 --format json",
              ws, &out) == 0);
  CHECK(out.find("\"im\": 0.0") != std::string::npos);
}

TEST_CASE("estimate with automatic bandwidth and a simulated model")
{
  Workspace ws;
  std::string out;
  CHECK(run("estimate -m iid -n 500 --order 3 -w rpf -M auto --at 0,0 --bootstrap 100", ws, &out) == 0);
  CHECK(out.find("omega1") != std::string::npos);
  CHECK(run("estimate -m arma -n 500 --order 3 -w opt -M auto --pilot second-order --at 2,1", ws) == 0);
}

TEST_CASE("error exit codes")
{
  Workspace ws;
  CHECK(run("estimate -i " + (ws / "missing.txt").string() + " --at 1", ws) == 2);
  CHECK(run("estimate --bogus-flag", ws) == 2);
  CHECK(run("frobnicate", ws) == 2);
  write_series(ws / "c.txt", 100, true);
  CHECK(run("bandwidth -i " + (ws / "c.txt").string() + " --rule general --k 2", ws) == 3);
  write_series(ws / "x.txt", 100, false);
  CHECK(run("estimate -i " + (ws / "x.txt").string() + " -w hann -M 2 --at 1", ws) == 2);
  {
    std::ofstream bad(ws / "nan.txt");
    bad << "1\n2\nnan\n";
  }
  CHECK(run("estimate -i " + (ws / "nan.txt").string() + " --at 1", ws) == 2);
  CHECK(run("study -m bilinear -R 1 --lengths 100 --output-dir " + ws.dir.string(), ws) == 4);
}

TEST_CASE("study output is reproducible")
{
  Workspace ws;
  const std::string args = "study -m iid -R 2 --lengths 200 --procedures rpf,rcf --bootstrap 100 "
                           "--output-dir " + ws.dir.string();
  REQUIRE(run(args + " -o first", ws) == 0);
  REQUIRE(run(args + " -o second -j 2", ws) == 0);
  const auto a = slurp(ws / "first.csv");
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(ws / "second.csv"));
  CHECK(fs::exists(ws / "first.json"));
  CHECK(fs::exists(ws / "first.config.json"));
}

TEST_CASE("bandwidth and histogram subcommands")
{
  Workspace ws;
  write_series(ws / "x.txt", 1000, false);
  std::string out;
  CHECK(run("bandwidth -i " + (ws / "x.txt").string() + " --rule bispectrum --k1 2 --k2 2", ws, &out) == 0);
  CHECK_FALSE(out.empty());
  CHECK(run("bandwidth -i " + (ws / "x.txt").string() +
              " --rule plugin --pilot second-order --at 2,1",
            ws) == 0);
  CHECK(run("histogram -m iid --procedures ad -R 2 --lengths 200 --bootstrap 100 --output-dir " +
              ws.dir.string(),
            ws, &out) == 0);
  CHECK(out.find("relative") != std::string::npos);
}

TEST_CASE("oracle runs are deterministic")
{
  Workspace ws;
  const std::string args = "oracle -m bilinear -R 2 -n 2000 --bootstrap 100 --grid 3 --output-dir " +
                           ws.dir.string();
  REQUIRE(run(args + " -o a.csv", ws) == 0);
  REQUIRE(run(args + " -o b.csv", ws) == 0);
  const auto a = slurp(ws / "a.csv");
  CHECK(a.rfind("# flattop-oracle v1", 0) == 0);
  CHECK(a == slurp(ws / "b.csv"));
  CHECK(run("study -m bilinear -R 1 --lengths 200 --grid 3 --procedures rpf --bootstrap 100 --oracle " +
              (ws / "a.csv").string() + " --output-dir " + ws.dir.string(),
            ws) == 0);
}

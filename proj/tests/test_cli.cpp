#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "asdlab/config.hpp"
#include "asdlab/fieldfile.hpp"
#include "asdlab/gauge.hpp"
#include "asdlab/util.hpp"

using namespace asdlab;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(ASDLAB_BIN) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("field file: round trip is byte identical and attaches to the grid") {
  GridSpec s;
  s.n_eta = 4;
  s.n_xi1 = 4;
  s.n_xi2 = 4;
  s.n_t = 8;
  s.L = 1.5;
  Grid g(s);
  Field a = sample_synthetic(g, 3, 0.1);
  std::string p1 = "/tmp/asdlab_rt1.asdf", p2 = "/tmp/asdlab_rt2.asdf";
  write_field_file(p1, a);
  auto data = read_field_file(p1);
  Field b = attach(data, g);
  CHECK(b.v == a.v);
  write_field_file(p2, b);
  CHECK(slurp(p1) == slurp(p2));

  // grid mismatch rejected
  GridSpec s2 = s;
  s2.n_t = 16;
  Grid g2(s2);
  CHECK_THROWS_AS(attach(data, g2), invalid_argument_error);
}

TEST_CASE("field file: corruption is detected by the CRC") {
  GridSpec s;
  s.n_eta = 4;
  s.n_xi1 = 4;
  s.n_xi2 = 4;
  s.n_t = 4;
  Grid g(s);
  Field a = sample_synthetic(g, 4, 0.1);
  std::string p = "/tmp/asdlab_crc.asdf";
  write_field_file(p, a);
  // flip one payload byte
  std::string bytes = slurp(p);
  bytes[bytes.size() / 2] ^= 0x40;
  std::ofstream out(p, std::ios::binary);
  out << bytes;
  out.close();
  CHECK_THROWS_AS(read_field_file(p), corrupt_data_error);
}

TEST_CASE("config: parsing, validation, unknown keys, auto delta1") {
  RunConfig cfg = parse_config_text("grid.n_eta = 6\ngreen.a = 1.5\ncutoff.delta1 = auto\n# comment\n");
  CHECK(cfg.grid.n_eta == 6);
  CHECK(cfg.green_a == 1.5);
  CHECK(cfg.cutoff_delta1_auto);
  CHECK_THROWS_AS(parse_config_text("bogus.key = 1\n"), invalid_argument_error);
  CHECK_THROWS_AS(parse_config_text("green.a = -2\n"), invalid_argument_error);
  CHECK_THROWS_AS(parse_config_text("grid.mode = diagonal\n"), invalid_argument_error);
  RunConfig c2 = parse_config_text("cutoff.delta1 = 0.25\n");
  CHECK_FALSE(c2.cutoff_delta1_auto);
  CHECK(c2.cutoff_delta1 == 0.25);
  // resolved map is echoed and total
  auto m = cfg.resolved();
  CHECK(m.at("grid.n_eta") == "6");
  CHECK(m.at("cutoff.delta1") == "auto");
}

TEST_CASE("cli: exit codes for io, invalid argument, corrupt data, precondition") {
  // missing input file -> 1
  CHECK(run_cli("perturb --input /tmp/definitely_missing.asdf") == 1);
  // invalid argument -> 2
  CHECK(run_cli("sample --kind nonsense --out /tmp/x.asdf") == 2);
  CHECK(run_cli("green --set green.a=-1") == 2);
  // corrupt file -> 3
  {
    GridSpec s;
    s.n_eta = 4;
    s.n_xi1 = 4;
    s.n_xi2 = 4;
    s.n_t = 4;
    Grid g(s);
    write_field_file("/tmp/asdlab_ok.asdf", sample_flat(g));
    std::string bytes = slurp("/tmp/asdlab_ok.asdf");
    bytes[bytes.size() - 6] ^= 0x01;
    std::ofstream out("/tmp/asdlab_bad.asdf", std::ios::binary);
    out << bytes;
    out.close();
    CHECK(run_cli("green --kernel-check /tmp/asdlab_bad.asdf") == 3);
    CHECK(run_cli("green --kernel-check /tmp/asdlab_ok.asdf") == 0);
  }
  // inadmissible perturb input -> 4
  {
    GridSpec s;
    s.n_eta = 4;
    s.n_xi1 = 6;
    s.n_xi2 = 6;
    s.n_t = 24;
    s.L = 4.0;
    Grid g(s);
    write_field_file("/tmp/asdlab_hot.asdf", sample_collar_bump(g, 2, 0.5, 2.0));
    CHECK(run_cli("perturb --input /tmp/asdlab_hot.asdf --set green.kmax=12") == 4);
  }
}

TEST_CASE("cli: identical config and seed give byte-identical reports") {
  int rc1 = run_cli(
      "sample --kind synthetic --amplitude 0.01 --set grid.n_eta=4 --set grid.n_xi1=4 --set grid.n_xi2=4 "
      "--set grid.n_t=8 --set grid.L=1 --set seed=9 --out /tmp/asdlab_det1.asdf --report /tmp/asdlab_det1.json");
  int rc2 = run_cli(
      "sample --kind synthetic --amplitude 0.01 --set grid.n_eta=4 --set grid.n_xi1=4 --set grid.n_xi2=4 "
      "--set grid.n_t=8 --set grid.L=1 --set seed=9 --out /tmp/asdlab_det2.asdf --report /tmp/asdlab_det2.json");
  CHECK(rc1 == 0);
  CHECK(rc2 == 0);
  CHECK(slurp("/tmp/asdlab_det1.json") == slurp("/tmp/asdlab_det2.json"));
  CHECK(slurp("/tmp/asdlab_det1.asdf") == slurp("/tmp/asdlab_det2.asdf"));
}

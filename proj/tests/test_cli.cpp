#include <sys/wait.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "pbe/error.hpp"
#include "pbesolve/config.hpp"
#include "pbesolve/io.hpp"
#include "pbesolve/run.hpp"

using namespace pbesolve;
namespace fs = std::filesystem;

namespace {

const char *kMinimal = R"(# minimal solve configuration
[geometry]
r_m = 1
r_iel = 1.5
half_width = 3

[charges]
charge = 0.2 0.1 0 1 0.5

[problem]
ion = 0.5 1
ion = 0.5 -1
)";

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string &name) {
  const fs::path d = fs::path(::testing::TempDir()) / ("pbesolve_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string &args, const fs::path &log) {
  const std::string cmd = std::string(PBESOLVE_EXE) + " " + args + " > " + log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string config_path(const std::string &name) { return std::string(PBE_CONFIG_DIR) + "/" + name; }

int config_error_line(const std::string &text) {
  try {
    parse_config(text);
  } catch (const pbe::ConfigError &e) {
    return e.line();
  }
  return -1;
}

} // namespace

TEST(Config, MinimalDefaults) {
  const RunConfig c = parse_config(kMinimal);
  EXPECT_EQ(c.r_m, 1.0);
  EXPECT_EQ(c.n, 16);
  EXPECT_EQ(c.method, Method::GPBE);
  EXPECT_EQ(c.splitting, pbe::Splitting::TwoTerm);
  EXPECT_EQ(c.bc, pbe::BoundaryMode::RestrictedG);
  EXPECT_EQ(c.tol, 1e-10);
  EXPECT_EQ(c.seed, 42u);
  ASSERT_EQ(c.species.size(), 2u);
  EXPECT_EQ(c.species[1].valence, -1);
  ASSERT_EQ(c.charges.size(), 1u);
  EXPECT_EQ(c.charges[0].radius, 0.5);
  const std::string echo = echo_config(c);
  EXPECT_NE(echo.find("tol = 1e-10"), std::string::npos);
  EXPECT_NE(echo.find("ion = 0.5 -1"), std::string::npos);
  validate(c);
}

TEST(Config, MisspelledKeyNamesKeyAndLine) {
  std::string text = kMinimal;
  text += "[solver]\ntoll = 1e-8\n";
  try {
    parse_config(text);
    FAIL();
  } catch (const pbe::ConfigError &e) {
    EXPECT_EQ(e.line(), 14);
    EXPECT_NE(std::string(e.what()).find("toll"), std::string::npos);
  }
}

TEST(Config, TypeMismatchAndMissingKey) {
  std::string text = kMinimal;
  text += "[solver]\nmaxit = many\n";
  EXPECT_EQ(config_error_line(text), 14);
  std::string no_hw = kMinimal;
  no_hw.erase(no_hw.find("half_width = 3\n"), 15);
  try {
    parse_config(no_hw);
    FAIL();
  } catch (const pbe::ConfigError &e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("half_width"), std::string::npos);
  }
  EXPECT_EQ(config_error_line(std::string(kMinimal) + "[nonsense]\n"), 13);
  EXPECT_EQ(config_error_line(std::string(kMinimal) + "[solver]\nmethod = bem\n"), 14);
  EXPECT_EQ(config_error_line(std::string(kMinimal) + "[solver]\ntol = 1\ntol = 2\n"), 15);
  EXPECT_EQ(config_error_line(std::string(kMinimal) + "[charges]\ncharge = 1 2\n"), 14);
}

TEST(Config, EchoRoundTrip) {
  for (const char *name : {"disk.ini", "cell_model.ini", "physical.ini", "surface.ini"}) {
    const RunConfig c = load_config_file(config_path(name));
    const std::string echo = echo_config(c);
    RunConfig again = parse_config(echo, c.base_dir);
    EXPECT_EQ(again, c) << name;
    EXPECT_EQ(echo_config(again), echo) << name;
  }
}

TEST(Config, RandomizedRoundTrip) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig c = parse_config(kMinimal);
    c.eps_s = 1.0 + 100.0 * U(rng);
    c.tol = std::pow(10.0, -12.0 * U(rng));
    c.kappa = U(rng) / 3.0;
    c.armijo_c = U(rng) * 1e-3;
    c.species.push_back({U(rng) * 1e-5, -2});
    c.charges.push_back({U(rng) - 0.5, U(rng) - 0.5, 0.0, -0.1 * trial, U(rng)});
    EXPECT_EQ(parse_config(echo_config(c)), c);
  }
}

TEST(Config, ValidationAndProblemErrors) {
  RunConfig c = parse_config(kMinimal);
  c.r_iel = 0.5;
  EXPECT_THROW(validate(c), pbe::ConfigError);
  c = parse_config(kMinimal);
  c.pqr = "missing_file.pqr";
  EXPECT_THROW(validate(c), pbe::ConfigError);
  c = parse_config(kMinimal);
  c.eps_m = -1.0;
  EXPECT_THROW(c.problem(), pbe::ConfigError);
}

TEST(Config, MolarConversion) {
  RunConfig c = parse_config(kMinimal);
  c.concentration_unit = ConcentrationUnit::Molar;
  c.unit_mode = pbe::UnitMode::Physical;
  const auto p = c.problem();
  EXPECT_NEAR(p.species[0].concentration, 0.5 * 6.022140857e23 / 1000.0, 1e6);
}

TEST(Output, TwoTriangleVtkGolden) {
  pbe::Mesh m;
  m.nodes = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.triangles = {{0, 1, 2}, {0, 2, 3}};
  m.elem_region = {pbe::RegionTag::Molecule, pbe::RegionTag::Ions};
  const std::vector<double> f{0.5, -1.25, 3.0, 0.1};
  std::ostringstream os;
  write_vtk(os, m, {{"u", &f}}, true);
  const std::string golden = "# vtk DataFile Version 3.0\n"
                             "pbesolve\n"
                             "ASCII\n"
                             "DATASET UNSTRUCTURED_GRID\n"
                             "POINTS 4 double\n"
                             "0 0 0\n"
                             "1 0 0\n"
                             "1 1 0\n"
                             "0 1 0\n"
                             "CELLS 2 8\n"
                             "3 0 1 2\n"
                             "3 0 2 3\n"
                             "CELL_TYPES 2\n"
                             "5\n"
                             "5\n"
                             "CELL_DATA 2\n"
                             "SCALARS region int 1\n"
                             "LOOKUP_TABLE default\n"
                             "0\n"
                             "2\n"
                             "POINT_DATA 4\n"
                             "SCALARS u double 1\n"
                             "LOOKUP_TABLE default\n"
                             "0.5\n"
                             "-1.25\n"
                             "3\n"
                             "0.10000000000000001\n";
  EXPECT_EQ(os.str(), golden);
  const std::vector<double> short_field{1.0};
  EXPECT_THROW(write_vtk(os, m, {{"bad", &short_field}}), pbe::Error);
}

TEST(Output, EmptyTableIsHeaderOnly) {
  std::ostringstream os;
  write_csv(os, Table{{"a", "b"}, {}});
  EXPECT_EQ(os.str(), "a,b\n");
}

TEST(Output, CsvReloadIsBitExact) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(-1e3, 1e3);
  Table t{{"x", "y", "z"}, {}};
  for (int i = 0; i < 200; ++i)
    t.rows.push_back({U(rng), U(rng) * 1e-300, std::ldexp(U(rng), 900)});
  t.rows.push_back({0.0, -0.0, std::nan("")});
  std::stringstream ss;
  write_csv(ss, t);
  const Table back = read_csv(ss);
  ASSERT_EQ(back.header, t.header);
  ASSERT_EQ(back.rows.size(), t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (int j = 0; j < 3; ++j) {
      if (std::isnan(t.rows[i][j])) {
        EXPECT_TRUE(std::isnan(back.rows[i][j]));
        continue;
      }
      EXPECT_EQ(std::memcmp(&back.rows[i][j], &t.rows[i][j], sizeof(double)), 0) << i << "," << j;
    }
  std::istringstream bad("a,b\n1,x\n");
  try {
    read_csv(bad);
    FAIL();
  } catch (const pbe::ParseError &e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Output, ReportJsonLines) {
  pbe::SolveReport r;
  r.method = "gpbe";
  r.converged = true;
  r.history.resize(3);
  r.wall_seconds = 12.5;
  const std::string s = report_jsonl(r, pbe::PBEProblem{});
  int lines = 0;
  for (char ch : s)
    lines += ch == '\n';
  EXPECT_EQ(lines, 4);
  EXPECT_NE(s.find("\"unit_mode\""), std::string::npos);
  EXPECT_EQ(s.find("12.5"), std::string::npos);
}

TEST(ExitCodes, Classification) {
  EXPECT_EQ(exit_code_for(pbe::ConfigError("x")), kInputError);
  EXPECT_EQ(exit_code_for(pbe::ParseError("x", 1)), kInputError);
  EXPECT_EQ(exit_code_for(pbe::MeshError("x")), kInputError);
  EXPECT_EQ(exit_code_for(pbe::GeometryError("x")), kInputError);
  EXPECT_EQ(exit_code_for(pbe::SolverError("x")), kSolverFailure);
  EXPECT_EQ(exit_code_for(pbe::DomainError("x")), kSolverFailure);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), kSolverFailure);
}

TEST(Smoke, SolveEmitsThreeFieldFiles) {
  const fs::path out = scratch("solve");
  ASSERT_EQ(run_cli("solve --config " + config_path("disk.ini") + " --out " + out.string(), out / "log"), 0)
      << slurp(out / "log");
  for (const char *f : {"phi.vtk", "u.vtk", "uH.vtk", "report.jsonl", "history.csv", "config_echo.ini"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(slurp(out / "phi.vtk").rfind("# vtk DataFile", 0), 0u);
}

TEST(Smoke, TwoTermSolveWritesCoulombField) {
  const fs::path out = scratch("solve2");
  ASSERT_EQ(run_cli("solve --config " + config_path("cell_model.ini") + " --out " + out.string(), out / "log"),
            0)
      << slurp(out / "log");
  for (const char *f : {"phi.vtk", "u.vtk", "G.vtk"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
}

TEST(Smoke, ConvergenceTableShape) {
  const fs::path out = scratch("conv");
  ASSERT_EQ(run_cli("convergence --config " + config_path("disk.ini") + " --out " + out.string(), out / "log"),
            0)
      << slurp(out / "log");
  std::ifstream in(out / "convergence.csv");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);)
    lines.push_back(l);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "level,h,nodes,triangles,L2,H1,newton_iterations");
  EXPECT_EQ(lines[5].rfind("slope,", 0), 0u);
}

TEST(Smoke, VerifyAllPass) {
  for (const char *name : {"disk.ini", "cell_model.ini"}) {
    const fs::path out = scratch(std::string("verify_") + name);
    EXPECT_EQ(run_cli(std::string("verify --config ") + config_path(name) + " --out " + out.string(), out / "log"),
              0)
        << slurp(out / "log");
    std::ifstream in(out / "verify.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "check,value,threshold,pass");
    int rows = 0;
    while (std::getline(in, line)) {
      ++rows;
      EXPECT_EQ(line.substr(line.rfind(',') + 1), "pass") << line;
    }
    EXPECT_GT(rows, 10);
  }
}

TEST(Smoke, EnergyAndMeshCommands) {
  const fs::path out = scratch("energy");
  ASSERT_EQ(run_cli("energy --config " + config_path("disk.ini") + " --out " + out.string(), out / "log"), 0)
      << slurp(out / "log");
  EXPECT_TRUE(fs::exists(out / "energy.json"));
  ASSERT_EQ(run_cli("mesh --config " + config_path("disk.ini") + " --out " + out.string(), out / "log"), 0);
  const pbe::Mesh m = pbe::load_mesh_file((out / "mesh.txt").string());
  EXPECT_GT(m.num_triangles(), 100u);
}

TEST(Smoke, SurfaceFromPqr) {
  const fs::path out = scratch("surface");
  ASSERT_EQ(run_cli("surface --config " + config_path("surface.ini") + " --out " + out.string(), out / "log"), 0)
      << slurp(out / "log");
  EXPECT_EQ(slurp(out / "regions.vtk").find("DATASET STRUCTURED_POINTS") != std::string::npos, true);
}

TEST(Smoke, ExitCodes) {
  const fs::path out = scratch("codes");
  EXPECT_EQ(run_cli("solve --config " + (out / "nope.ini").string(), out / "log"), 1);
  std::ofstream(out / "bad.ini") << kMinimal << "[solver]\ntoll = 1\n";
  EXPECT_EQ(run_cli("solve --config " + (out / "bad.ini").string() + " --out " + out.string(), out / "log"), 1);
  EXPECT_NE(slurp(out / "log").find("line 14"), std::string::npos) << slurp(out / "log");
  std::ofstream(out / "short.ini") << kMinimal << "[solver]\nmaxit = 1\ntol = 1e-14\n";
  EXPECT_EQ(run_cli("solve --config " + (out / "short.ini").string() + " --out " + out.string(), out / "log"), 2);
  EXPECT_EQ(run_cli("fly --config " + config_path("disk.ini"), out / "log"), 1);
  EXPECT_EQ(run_cli("solve", out / "log"), 1);
}

TEST(Smoke, RepeatedRunsAreByteIdentical) {
  const fs::path out = scratch("det");
  auto snapshot = [&] {
    std::map<std::string, std::string> files;
    for (const auto &entry : fs::directory_iterator(out))
      if (entry.path().filename() != "log")
        files[entry.path().filename().string()] = slurp(entry.path());
    return files;
  };
  const std::string args = "solve --config " + config_path("disk.ini") + " --out " + out.string();
  ASSERT_EQ(run_cli(args, out / "log"), 0);
  const auto first = snapshot();
  ASSERT_EQ(run_cli(args, out / "log"), 0);
  EXPECT_EQ(snapshot(), first);
  EXPECT_GE(first.size(), 6u);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "pdflow/io.hpp"

namespace fs = std::filesystem;
using namespace pdflow;

TEST_CASE("format_double: 17 significant digits round-trip") {
  for (double v : {1.0 / 3.0, 2.718281828459045, -1.2345678901234567e-9, 0.0, 1e8}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("trajectory_csv: header and nan without a reference") {
  Trajectory t;
  t.times = {0.0, 0.5};
  t.xs = {{1.0, 2.0}, {1.5, 2.5}};
  t.lambdas = {{0.0}, {-0.25}};
  const std::string csv = trajectory_csv(t);
  CHECK(csv.rfind("t,x_1,x_2,lambda_1,err_norm\n", 0) == 0);
  CHECK(csv.find(",nan\n") != std::string::npos);

  t.reference = KktPoint{{1.0, 2.0}, {0.0}};
  t.error_norms = {0.0, 0.75};
  const std::string with_ref = trajectory_csv(t);
  CHECK(with_ref.find("nan") == std::string::npos);
  CHECK(with_ref.find(",0.75\n") != std::string::npos);
}

TEST_CASE("consensus_csv: header") {
  CHECK(consensus_csv({0.0}, {1.0}).rfind("t,consensus_error\n", 0) == 0);
}

TEST_CASE("atomic_write_file: replaces content and leaves no temp file") {
  const fs::path dir = fs::temp_directory_path() / "pdflow_io_test";
  fs::remove_all(dir);
  const fs::path target = dir / "sub" / "file.txt";
  atomic_write_file(target.string(), "first");
  atomic_write_file(target.string(), "second");
  std::ifstream in(target);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == "second");
  CHECK_FALSE(fs::exists(target.string() + ".tmp"));
}

TEST_CASE("certificate JSON carries the grid description") {
  RateCertificate cert;
  cert.rho_certified = 0.25;
  cert.abscissa = 0.5;
  cert.tolerance = 1e-9;
  cert.worst_margin = -1e-3;
  cert.worst_omega = 2.0;
  cert.frame = Frame::Transformed;
  const Json j = certificate_to_json(cert);
  CHECK(j.at("grid").at("scale") == "log");
  CHECK(j.at("frame") == "transformed");
  CHECK(j.at("rho_certified").get<double>() == 0.25);
}

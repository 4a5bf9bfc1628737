#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "minsimplex/experiment.hpp"
#include "minsimplex/pointset.hpp"
#include "util.hpp"

using namespace minsimplex;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("minsimplex-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<ExperimentRecord> without_wall_times(std::vector<ExperimentRecord> records) {
  for (ExperimentRecord& r : records) r.wall_time_ms = 0.0;
  return records;
}

}  // namespace

TEST_CASE("point-set text format") {
  SECTION("golden text for a tiny set") {
    PointSet ps = make_point_set({testutil::vec2(0, 0), testutil::vec2(1, 0.5)},
                                 SpaceTag::UnitCube);
    REQUIRE(point_set_to_string(ps) == "2 2 unit-cube\n0 0\n1 0.5\n");
  }

  SECTION("round trip is bit exact") {
    PointSet ps = testutil::random_cube(42, 7, 3);
    std::istringstream in(point_set_to_string(ps));
    PointSet back = read_point_set(in);
    REQUIRE(back.dim == ps.dim);
    REQUIRE(back.space_tag == ps.space_tag);
    REQUIRE(back.size() == ps.size());
    for (int i = 0; i < ps.size(); ++i) REQUIRE(back.points[i] == ps.points[i]);

    PointSet sph = testutil::random_sphere(43, 6, 4);
    std::istringstream in2(point_set_to_string(sph));
    PointSet back2 = read_point_set(in2);
    for (int i = 0; i < sph.size(); ++i) REQUIRE(back2.points[i] == sph.points[i]);
  }

  SECTION("file round trip") {
    fs::path dir = fresh_dir("ptsio");
    PointSet ps = testutil::random_cube(7, 5, 2);
    save_point_set((dir / "a.pts").string(), ps);
    PointSet back = load_point_set((dir / "a.pts").string());
    for (int i = 0; i < ps.size(); ++i) REQUIRE(back.points[i] == ps.points[i]);
  }

  SECTION("malformed input") {
    auto parse = [](const std::string& text) {
      std::istringstream in(text);
      return read_point_set(in);
    };
    REQUIRE_THROWS_AS(parse("x 2 unit-cube\n0 0\n0 1\n"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse("2 1 nowhere\n0 0\n"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse("2 2 unit-cube\n0 0\n1\n"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse("2 1 unit-cube\n0 1.5\n"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse("2 1 unit-sphere\n1 1\n"), std::invalid_argument);
  }
}

TEST_CASE("point-set generators") {
  SECTION("grid fills the smallest sufficient lattice") {
    PointSet g4 = generate(Generator::Grid, 2, 4, 0);
    REQUIRE(g4.space_tag == SpaceTag::UnitCube);
    REQUIRE(g4.points[0] == testutil::vec2(0, 0));
    REQUIRE(g4.points[1] == testutil::vec2(0, 1));
    REQUIRE(g4.points[2] == testutil::vec2(1, 0));
    REQUIRE(g4.points[3] == testutil::vec2(1, 1));

    PointSet g5 = generate(Generator::Grid, 2, 5, 9);  // seed is ignored
    REQUIRE(g5.size() == 5);
    REQUIRE(g5.points[0] == testutil::vec2(0, 0));
    REQUIRE(g5.points[1] == testutil::vec2(0, 0.5));
    REQUIRE(g5.points[2] == testutil::vec2(0, 1));
    REQUIRE(g5.points[3] == testutil::vec2(0.5, 0));
    REQUIRE(g5.points[4] == testutil::vec2(0.5, 0.5));
  }

  SECTION("uniform cube stays in range and is seed deterministic") {
    PointSet a = generate(Generator::UniformCube, 3, 50, 11);
    REQUIRE_NOTHROW(validate_point_set(a));
    PointSet b = generate(Generator::UniformCube, 3, 50, 11);
    for (int i = 0; i < 50; ++i) REQUIRE(a.points[i] == b.points[i]);
    PointSet c = generate(Generator::UniformCube, 3, 50, 12);
    REQUIRE(a.points[0] != c.points[0]);
  }

  SECTION("uniform sphere emits unit vectors") {
    PointSet s = generate(Generator::UniformSphere, 4, 40, 5);
    REQUIRE(s.space_tag == SpaceTag::UnitSphere);
    for (const Vector& p : s.points) REQUIRE(std::abs(p.norm() - 1.0) <= kSphereNormTol);
  }

  SECTION("name round trip") {
    for (Generator g : {Generator::UniformCube, Generator::UniformSphere, Generator::Grid})
      REQUIRE(generator_from_string(to_string(g)) == g);
    REQUIRE_THROWS_AS(generator_from_string("hexagonal"), std::invalid_argument);
  }
}

TEST_CASE("experiment CSV") {
  SECTION("round trip preserves every field") {
    std::vector<ExperimentRecord> records(3);
    records[0] = {5, 2, 2, "brute", 7, 0.03125, std::nullopt, 1.5, ""};
    records[1] = {5, 2, 2, "recursive", 7, 0.04, 0.0625, 2.25, ""};
    records[2] = {6, 2, 2, "brute", 8, std::nullopt, std::nullopt, 0.5,
                  "bad \"input\", degenerate"};
    std::vector<ExperimentRecord> back = parse_csv(to_csv(records));
    REQUIRE(back == records);
  }

  SECTION("values survive with full precision") {
    std::vector<ExperimentRecord> records(1);
    records[0] = {5, 2, 2, "brute", 7, 0.1 + 1e-17, std::nullopt, 1.0 / 3.0, ""};
    std::vector<ExperimentRecord> back = parse_csv(to_csv(records));
    REQUIRE(back[0].min_volume == records[0].min_volume);
    REQUIRE(back[0].wall_time_ms == records[0].wall_time_ms);
  }

  SECTION("header and row validation") {
    REQUIRE_THROWS_AS(parse_csv("a,b\n1,2\n"), std::invalid_argument);
    std::string bad = std::string(kCsvHeader) + "\n1,2,3\n";
    REQUIRE_THROWS_AS(parse_csv(bad), std::invalid_argument);
    REQUIRE(parse_csv(std::string(kCsvHeader) + "\n").empty());
  }

  SECTION("loading a missing file yields no records") {
    REQUIRE(load_csv("/nonexistent/minsimplex.csv").empty());
  }
}

TEST_CASE("experiment sweeps") {
  ExperimentConfig cfg;
  cfg.d = 2;
  cfg.k = 2;
  cfg.n_values = {5};
  cfg.seeds = {1, 2, 3};
  cfg.generator = Generator::UniformCube;
  cfg.method = Method::Both;

  SECTION("one sweep runs every cell once") {
    fs::path dir = fresh_dir("sweep");
    cfg.output_path = (dir / "out.csv").string();
    std::vector<ExperimentRecord> records = run_experiment(cfg);
    REQUIRE(records.size() == 6);
    for (size_t i = 0; i + 1 < records.size(); i += 2) {
      const ExperimentRecord& brute = records[i];
      const ExperimentRecord& rec = records[i + 1];
      REQUIRE(brute.method == "brute");
      REQUIRE(rec.method == "recursive");
      REQUIRE(brute.seed == rec.seed);
      REQUIRE(brute.error.empty());
      REQUIRE(rec.error.empty());
      REQUIRE(brute.min_volume.has_value());
      REQUIRE(rec.min_volume.has_value());
      // brute force is optimal; the recursion can only do worse
      REQUIRE(*brute.min_volume <= *rec.min_volume * (1.0 + 1e-12));
      REQUIRE(rec.certificate_product.has_value());
      REQUIRE(*rec.min_volume <= *rec.certificate_product * (1.0 + 1e-9));
    }

    // a second sweep finds everything done and changes nothing
    std::vector<ExperimentRecord> again = run_experiment(cfg);
    REQUIRE(again == records);
  }

  SECTION("a resumed sweep matches a fresh one") {
    fs::path dir = fresh_dir("resume");
    cfg.output_path = (dir / "resumed.csv").string();
    run_experiment(cfg);
    cfg.n_values = {5, 6};
    std::vector<ExperimentRecord> resumed = run_experiment(cfg);

    ExperimentConfig fresh = cfg;
    fresh.output_path = (dir / "fresh.csv").string();
    std::vector<ExperimentRecord> direct = run_experiment(fresh);

    // wall time is the one field a resume legitimately changes
    REQUIRE(without_wall_times(resumed) == without_wall_times(direct));
  }

  SECTION("budget failures become error rows, the sweep completes") {
    fs::path dir = fresh_dir("budget");
    cfg.output_path = (dir / "tiny.csv").string();
    cfg.budget = 2;
    std::vector<ExperimentRecord> records = run_experiment(cfg);
    REQUIRE(records.size() == 6);
    for (const ExperimentRecord& r : records) {
      if (r.method == "brute") {
        REQUIRE_FALSE(r.error.empty());
        REQUIRE_FALSE(r.min_volume.has_value());
      } else {
        REQUIRE(r.error.empty());
        REQUIRE(r.min_volume.has_value());
      }
    }
  }

  SECTION("config validation") {
    cfg.output_path = "x.csv";
    ExperimentConfig bad = cfg;
    bad.k = 3;
    REQUIRE_THROWS_AS(run_experiment(bad), std::invalid_argument);
    bad = cfg;
    bad.n_values = {6, 5};
    REQUIRE_THROWS_AS(run_experiment(bad), std::invalid_argument);
    bad = cfg;
    bad.seeds = {};
    REQUIRE_THROWS_AS(run_experiment(bad), std::invalid_argument);
    bad = cfg;
    bad.output_path = "";
    REQUIRE_THROWS_AS(run_experiment(bad), std::invalid_argument);
  }
}

TEST_CASE("exponent fitting") {
  auto synthetic = [](double expo, double scale) {
    std::vector<ExperimentRecord> records;
    for (int n : {10, 20, 40, 80})
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        ExperimentRecord r{n, 2, 2, "brute", seed, std::nullopt, std::nullopt, 1.0, ""};
        r.min_volume = scale * std::pow(static_cast<double>(n), expo);
        records.push_back(r);
      }
    return records;
  };

  SECTION("recovers an exact power law") {
    FitResult fit = fit_exponent(synthetic(-2.0, 7.0));
    REQUIRE(fit.slope == Catch::Approx(-2.0).margin(1e-9));
    REQUIRE(fit.intercept == Catch::Approx(std::log(7.0)).margin(1e-9));
    REQUIRE(fit.residual_rms < 1e-9);
    REQUIRE(fit.distinct_n == 4);
    REQUIRE(fit.rows_used == 12);
    REQUIRE(fit.rows_excluded == 0);
  }

  SECTION("constant data fits slope zero") {
    FitResult fit = fit_exponent(synthetic(0.0, 0.25));
    REQUIRE(fit.slope == Catch::Approx(0.0).margin(1e-12));
  }

  SECTION("failed, absent, and zero rows are excluded but counted") {
    std::vector<ExperimentRecord> records = synthetic(-2.0, 7.0);
    records.push_back({90, 2, 2, "brute", 0, std::nullopt, std::nullopt, 1.0, "boom"});
    records.push_back({90, 2, 2, "brute", 1, std::nullopt, std::nullopt, 1.0, ""});
    records.push_back({90, 2, 2, "brute", 2, 0.0, std::nullopt, 1.0, ""});
    FitResult fit = fit_exponent(records);
    REQUIRE(fit.rows_excluded == 3);
    REQUIRE(fit.rows_used == 12);
    REQUIRE(fit.distinct_n == 4);
    REQUIRE(fit.slope == Catch::Approx(-2.0).margin(1e-9));
  }

  SECTION("demands three distinct n") {
    std::vector<ExperimentRecord> two;
    for (int n : {10, 20})
      two.push_back({n, 2, 2, "brute", 0, 0.5, std::nullopt, 1.0, ""});
    REQUIRE_THROWS_AS(fit_exponent(two), std::invalid_argument);
  }

  SECTION("measured minima shrink with n") {
    fs::path dir = fresh_dir("fitdir");
    ExperimentConfig cfg;
    cfg.d = 2;
    cfg.k = 2;
    cfg.n_values = {4, 8, 16, 32};
    cfg.seeds = {1, 2, 3, 4, 5, 6};
    cfg.generator = Generator::UniformCube;
    cfg.method = Method::Brute;
    cfg.output_path = (dir / "fit.csv").string();
    FitResult fit = fit_exponent(run_experiment(cfg));
    REQUIRE(fit.slope < 0.0);
  }
}

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <limits>

#include "radonms/io.hpp"
#include "radonms/radon.hpp"
#include "support/fixtures.hpp"

using namespace radonms;
using namespace radonms::testing;
namespace fs = std::filesystem;

TEST_SUITE("io") {
  TEST_CASE("doubles round trip exactly") {
    for (double v : {0.1, -1e-300, 1.0 / 3.0, 6.02214076e23, 0.0})
      CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }

  TEST_CASE("image CSV round trip in 2D and 3D") {
    for (int nd : {2, 3}) {
      const Image f = random_image(centered_grid(nd, 5, 1.3), 7);
      const Image g = image_from_csv(image_to_csv(f));
      CHECK(g.grid() == f.grid());
      CHECK(l2_norm(g - f) == 0.0);
    }
  }

  TEST_CASE("sinogram CSV round trip, inline and via geometry file") {
    const ProjectionGeometry geo = ProjectionGeometry::hemisphere_3d(7, 9, 1.2);
    const Sinogram g = random_sinogram(geo, 3);
    const Sinogram back = sinogram_from_csv(sinogram_to_csv(g));
    CHECK(back.geometry() == geo);
    CHECK(l2_norm(back - g) == 0.0);

    const fs::path dir = fs::temp_directory_path() / "radonms_io_test";
    fs::create_directories(dir);
    atomic_write(dir / "geo.json", geometry_to_json(geo));
    std::string text = sinogram_to_csv(g);
    const auto p = text.find("directions=");
    text = text.substr(0, p) + "directions=@geo.json" + text.substr(text.find('\n'));
    const Sinogram viaf = sinogram_from_csv(text, dir);
    CHECK(viaf.geometry() == geo);
    CHECK(l2_norm(viaf - g) == 0.0);
    fs::remove_all(dir);
  }

  TEST_CASE("geometry JSON shorthands") {
    const ProjectionGeometry a = geometry_from_json(R"({"ndim": 2, "n_angles": 6, "n_offsets": 11, "x_max": 1.5})");
    CHECK(a == ProjectionGeometry::parallel_2d(6, 11, 1.5));
    CHECK(geometry_from_json(geometry_to_json(a)) == a);
    CHECK_THROWS_AS(geometry_from_json(R"({"ndim": 2})"), ParseError);
  }

  TEST_CASE("phantom JSON") {
    const PhantomSpec s = phantom_from_json(R"({"components": [
        {"center": [0.1, 0.2], "semi_axes": [0.5, 0.3], "angle_deg": 90, "value": 2},
        {"center": [0, 0], "radius": 0.2, "value": -1}]})");
    REQUIRE(s.components.size() == 2);
    CHECK(s.components[0].angle == doctest::Approx(1.5707963267948966));
    CHECK(s.components[1].semi_axes[1] == 0.2);
    const PhantomSpec t = phantom_from_json(phantom_to_json(s));
    const ImageGrid grid = centered_grid(2, 32, 1.0);
    CHECK(l2_norm(rasterize_phantom(s, grid) - rasterize_phantom(t, grid)) == 0.0);
    CHECK_THROWS_AS(phantom_from_json("[{\"value\": 1}]"), ParseError);
  }

  TEST_CASE("partition CSV round trip") {
    const PCFunction pc = two_disk_truth(centered_grid(2, 16, 1.0), 0.0);
    CHECK(partition_from_csv(partition_to_csv(pc.partition), 2, 0.0) == pc.partition);
    CHECK_THROWS_AS(partition_from_csv(partition_to_csv(pc.partition), 1, 0.0), InvalidArgument);
  }

  TEST_CASE("PGM headers") {
    const Image f = random_image(centered_grid(2, 6, 1.0), 1);
    const std::string pgm = image_to_pgm(f);
    CHECK(pgm.rfind("P5\n", 0) == 0);
    CHECK(pgm.find("6 6\n255\n") != std::string::npos);
    CHECK(pgm.size() == pgm.find("255\n") + 4 + 36);
  }

  TEST_CASE("malformed files are parse errors") {
    CHECK_THROWS_AS(image_from_csv("dims=2,2;spacing=1,1;origin=0,0\n1,2\n3\n"), ParseError);
    CHECK_THROWS_AS(image_from_csv("dims=2,2;spacing=1,1;origin=0,0\n1,2\n3,x\n"), ParseError);
    CHECK_THROWS_AS(image_from_csv(""), ParseError);
    CHECK_THROWS_AS(sinogram_from_csv("n_offsets=3;offset_spacing=1;xmax=1;directions=1:0@1\n1,2\n"), ParseError);
    CHECK_THROWS_AS(read_file("/nonexistent/radonms"), ParseError);
  }
}

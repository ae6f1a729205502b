#include <cstring>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "mdcs/config.hpp"
#include "mdcs/csv.hpp"
#include "mdcs/dataset.hpp"
#include "mdcs/errors.hpp"
#include "mdcs/reproduce.hpp"

using namespace mdcs;

namespace {

const char* kMinimal = R"([experiment]
seed = 5
emitters = 10
detection = pl

[laser]
wavelength = 737 nm
bandwidth = 7.5 nm

[grid]
tau_points = 64
t_points = 64
tau_step = 1 ps
t_step = 1 ps

[component.a]
weight = 0.6
strain_fwhm = 0.028 strain
t2 = 122 ps

[component.b]
weight = 0.4
level = two_level
strain_fwhm = 1.84 strain
t2_rule = classes
t2_classes = 120 ps 0.7, 990 ps 0.3
yield = fixed
fixed_yield = 0.5
)";

template <class E>
std::string error_text(const std::string& text) {
  try {
    parse_config(text);
  } catch (const E& e) {
    return e.what();
  }
  return "no error";
}

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

DatasetFile random_dataset(std::size_t rows, std::size_t cols, unsigned seed) {
  DatasetFile d;
  d.metadata = {{"kind", "signal"}, {"note", "a=b"}};
  d.rows = {rows, 0.0, 1.171875, "tau [ps]"};
  d.cols = {cols, 0.0, 1.171875, "t [ps]"};
  std::mt19937 g(seed);
  std::normal_distribution<float> n;
  d.values.resize(rows * cols);
  for (auto& v : d.values) v = {n(g), n(g)};
  return d;
}

}  // namespace

TEST_CASE("config parse and canonical round trip") {
  const auto c = parse_config(kMinimal);
  CHECK(c.seed == 5);
  CHECK(c.emitters == 10);
  REQUIRE(c.detection.size() == 1);
  CHECK(c.detection[0] == Detection::Photoluminescence);
  CHECK(c.laser.center_thz == doctest::Approx(406.774027).epsilon(1e-8));
  REQUIRE(c.ensemble.components.size() == 2);
  CHECK(c.ensemble.components[1].two_level);
  CHECK(c.ensemble.components[1].dephasing.classes.size() == 2);
  CHECK(c.ensemble.components[1].yield_rule == YieldRule::Fixed);

  const auto text = serialize_config(c);
  const auto back = parse_config(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
  CHECK(config_hash(back) == config_hash(c));

  for (const auto& t : reproduction_targets())
    for (const auto& s : reproduction_stages(t)) {
      const auto cfg = parse_config(default_config_text(t, s));
      CHECK(parse_config(serialize_config(cfg)) == cfg);
    }
}

TEST_CASE("unit conversion") {
  auto c = parse_config(kMinimal);
  apply_override(c, "grid.tau_step = 1500 fs");
  CHECK(c.grid.tau_step_ps == doctest::Approx(1.5));
  apply_override(c, "level_scheme.ground_splitting = 0.06 THz");
  CHECK(c.level_scheme.ground_splitting_ghz == doctest::Approx(60.0));
  apply_override(c, "component.a.t1 = 1700 ps");
  CHECK(c.ensemble.components[0].t1_ns == doctest::Approx(1.7));
  CHECK_THROWS_AS(apply_override(c, "grid.tau_step = 1 THz"), UnitError);
  CHECK_THROWS_AS(apply_override(c, "grid.tau_step = 1"), UnitError);
  CHECK_THROWS_AS(apply_override(c, "experiment.emitters = 10 ps"), UnitError);
  CHECK_THROWS_AS(apply_override(c, "grid_tau_step = 1 ps"), SyntaxError);
  CHECK_THROWS_AS(apply_override(c, "grid.bogus = 1 ps"), SchemaError);
}

TEST_CASE("component weights must sum to one") {
  const auto msg = error_text<SchemaError>(replace(kMinimal, "weight = 0.6", "weight = 0.5"));
  CHECK(msg.find("component.a.weight") != std::string::npos);
  CHECK(msg.find("line 17") != std::string::npos);
  CHECK(msg.find("0.9") != std::string::npos);
}

TEST_CASE("config errors carry line and field") {
  CHECK(error_text<SyntaxError>(replace(kMinimal, "seed = 5", "seed 5")).find("line 2") !=
        std::string::npos);
  const auto unknown = error_text<SchemaError>(replace(kMinimal, "seed = 5", "sed = 5"));
  CHECK(unknown.find("experiment.sed") != std::string::npos);
  const auto unit = error_text<UnitError>(replace(kMinimal, "t2 = 122 ps", "t2 = 122"));
  CHECK(unit.find("component.a.t2") != std::string::npos);
  CHECK(unit.find("line 19") != std::string::npos);
  CHECK(error_text<SyntaxError>(replace(kMinimal, "emitters = 10", "emitters = ten")) != "no error");
  CHECK(error_text<SchemaError>(replace(kMinimal, "[laser]", "[lazer]")) != "no error");
  CHECK(error_text<SchemaError>(replace(kMinimal, "tau_points = 64", "tau_points = 0")) != "no error");
  CHECK_THROWS_AS(load_config("/nonexistent/config.txt"), IoFailure);
}

TEST_CASE("dataset encode/decode round trip") {
  const auto d = random_dataset(13, 7, 1);
  const auto bytes = encode_dataset(d);
  CHECK(bytes.compare(0, 7, std::string("MDCS2D\0", 7)) == 0);
  CHECK(decode_dataset(bytes) == d);
  CHECK(encode_dataset(decode_dataset(bytes)) == bytes);

  const auto empty = random_dataset(0, 0, 2);
  CHECK(decode_dataset(encode_dataset(empty)) == empty);
}

TEST_CASE("large dataset file round trip is byte exact") {
  const auto d = random_dataset(2048, 2048, 3);
  const auto dir = std::filesystem::temp_directory_path() / "mdcs_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "big.mdcs").string();
  write_dataset(path, d);
  const auto back = read_dataset(path);
  CHECK(back == d);
  CHECK(read_text_file(path) == encode_dataset(d));
  std::filesystem::remove_all(dir);
}

TEST_CASE("dataset corruption is detected") {
  const auto bytes = encode_dataset(random_dataset(8, 8, 4));
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  CHECK_THROWS_AS(decode_dataset(flipped), ChecksumMismatch);

  auto version = bytes;
  version[7] = 9;
  CHECK_THROWS_AS(decode_dataset(version), VersionUnsupported);

  auto magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(decode_dataset(magic), IoFailure);
  CHECK_THROWS_AS(decode_dataset(bytes.substr(0, bytes.size() - 9)), IoFailure);
  CHECK_THROWS_AS(read_dataset("/nonexistent/x.mdcs"), IoFailure);
}

TEST_CASE("CRC-32 check value") {
  CHECK(crc32_of("123456789") == 0xCBF43926u);
}

TEST_CASE("signals and spectra survive the container") {
  TimeDomainSignal s;
  s.grid = TimeGrid::square(4, 0.5);
  s.frame_thz = 406.77;
  s.waiting_time_ps = 0.5;
  s.mode = Detection::Photoluminescence;
  s.data = ComplexMatrix::Constant(4, 4, Complex(0.25, -1.5));
  const auto back = signal_from_dataset(decode_dataset(encode_dataset(to_dataset(s))));
  CHECK(back.grid == s.grid);
  CHECK(back.frame_thz == s.frame_thz);
  CHECK(back.mode == s.mode);
  CHECK(back.waiting_time_ps == s.waiting_time_ps);
  CHECK(back.data == s.data);

  const auto f = to_spectrum(s);
  const auto fb = spectrum_from_dataset(decode_dataset(encode_dataset(to_dataset(f))));
  REQUIRE(fb.nu_tau_thz.size() == f.nu_tau_thz.size());
  for (std::size_t k = 0; k < f.nu_t_thz.size(); ++k) {
    CHECK(fb.nu_t_thz[k] == doctest::Approx(f.nu_t_thz[k]).epsilon(1e-12));
    CHECK(fb.nu_tau_thz[k] == doctest::Approx(f.nu_tau_thz[k]).epsilon(1e-12));
  }
  CHECK(fb.frame_thz == f.frame_thz);
}

TEST_CASE("CSV round trips") {
  CsvTable t{{"a [ps]", "b,c", "q\"uote"}, {{"1", "x,y", "say \"hi\""}, {"", "2", "line\nbreak"}}};
  const auto back = parse_csv(format_csv(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);

  Trace1D tr;
  tr.nu_thz = {406.1, 406.2, 406.3};
  tr.amplitude = {1.0 / 3.0, 2.5e-17, 7.0};
  tr.valid = {1, 0, 1};
  const auto tb = trace_from_csv(trace_to_csv(tr));
  CHECK(tb.nu_thz == tr.nu_thz);
  CHECK(tb.amplitude == tr.amplitude);
  CHECK(tb.valid == tr.valid);

  DecayTrace d{{0.0, 2.34375}, {1.0, 0.1 + 0.2}};
  const auto db = decay_from_csv(decay_to_csv(d));
  CHECK(db.delay_ps == d.delay_ps);
  CHECK(db.amplitude == d.amplitude);
}

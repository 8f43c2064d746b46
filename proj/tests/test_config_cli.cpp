#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dkg/commands.hpp"
#include "dkg/config.hpp"
#include "support.hpp"

using namespace dkg;
using dkg::test::category_of;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunConfig tiny(const fs::path& out) {
    RunConfig c;
    c.n = 64;
    c.L = 64.0;
    c.width = 4.0;
    c.dt = 0.02;
    c.T_max = 12.0;
    c.snapshot_stride = 10;
    c.transient = 2.0;
    c.tail_ratio = 0.9;
    c.output_dir = out.string();
    return c;
}

}  // namespace

TEST_CASE("config text round-trips through format and parse") {
    RunConfig c;
    c.eps = 0.0123456789012345;
    c.sweep_m = {1.5, 2.25};
    c.normal_form_diagnostics = false;
    c.output_dir = "somewhere";
    const RunConfig back = parse_config(format_config(c));
    CHECK(format_config(back) == format_config(c));
    CHECK(back.eps == c.eps);
    CHECK(back.sweep_m == c.sweep_m);
    CHECK_FALSE(back.normal_form_diagnostics);
    for (const auto& k : config_keys()) CHECK(get_config_value(back, k.name) == get_config_value(c, k.name));
}

TEST_CASE("config parsing") {
    const RunConfig c = parse_config("# comment\n  n = 64\nm=1.5 # trailing\n\nnf_masses = 1, 2\n");
    CHECK(c.n == 64);
    CHECK(c.m == 1.5);
    CHECK(c.nf_masses == std::vector<double>{1.0, 2.0});
    CHECK(category_of([] { parse_config("bogus = 1"); }) == ErrorCategory::ConfigError);
    CHECK(category_of([] { parse_config("n = sixty"); }) == ErrorCategory::ConfigError);
    CHECK(category_of([] { parse_config("just a line"); }) == ErrorCategory::ConfigError);
    CHECK(category_of([] { load_config("/nonexistent/dkg.cfg"); }) == ErrorCategory::IoError);
}

TEST_CASE("validation collects every error and warns about the light cone") {
    RunConfig c;
    CHECK(validate_config(c).ok());
    // The default box is smaller than the light cone over the horizon.
    CHECK_FALSE(validate_config(c).warnings.empty());

    c.n = 100;
    c.dt = 0.5;
    c.width = 30.0;
    const ValidationReport r = validate_config(c);
    CHECK_FALSE(r.ok());
    REQUIRE(r.errors.size() >= 2);
    CHECK(r.errors[0].key == "n");
    CHECK(r.errors[1].key == "dt");
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["status"] == "rejected");
    CHECK(j["errors"].size() == r.errors.size());
    CHECK(j["errors"][0].contains("key"));
}

TEST_CASE("exit codes and error lines") {
    CHECK(exit_code(ErrorCategory::ConfigError) == 2);
    CHECK(exit_code(ErrorCategory::ResonantMass) == 3);
    CHECK(exit_code(ErrorCategory::TailNotConverged) == 4);
    CHECK(exit_code(ErrorCategory::BlowupDetected) == 5);
    CHECK(exit_code(ErrorCategory::IoError) == 6);
    std::ostringstream err;
    CHECK(guarded([]() -> int { fail(ErrorCategory::IoError, "nope"); }, err) == 6);
    CHECK(err.str().rfind("IoError: nope", 0) == 0);
    std::ostringstream err2;
    CHECK(guarded([]() -> int { throw std::runtime_error("x"); }, err2) == 1);
    CHECK(guarded([] { return 0; }, err2) == 0);
}

TEST_CASE("resonant run exits with code 3") {
    RunConfig c;
    c.m = 2.0;
    c.T_max = 10.0;
    c.output_dir = (fs::temp_directory_path() / "dkg_test_resonant").string();
    std::ostringstream out, err;
    CHECK(guarded([&] { return cmd_run(c, out); }, err) == 3);
    CHECK(err.str().rfind("ResonantMass:", 0) == 0);
    fs::remove_all(c.output_dir);
}

TEST_CASE("selftest passes") {
    std::ostringstream out;
    CHECK(cmd_selftest(1234, out) == 0);
    CHECK(out.str().find("FAIL") == std::string::npos);
}

TEST_CASE("normalform-check writes one row per triple") {
    RunConfig c;
    c.nf_masses = {1.0, 3.0};
    c.output_dir = (fs::temp_directory_path() / "dkg_test_nfcheck").string();
    std::ostringstream out;
    CHECK(cmd_normalform_check(c, out) == 0);
    std::istringstream lines(slurp(fs::path(c.output_dir) / "normalform_check.csv"));
    int count = 0;
    for (std::string line; std::getline(lines, line);) ++count;
    CHECK(count == 1 + 2 + 8);
    fs::remove_all(c.output_dir);
}

TEST_CASE("run then scatter on a small box, deterministically") {
    const fs::path base = fs::temp_directory_path() / "dkg_test_pipeline";
    fs::remove_all(base);
    const RunConfig a = tiny(base / "a"), b = tiny(base / "b");
    std::ostringstream out;
    REQUIRE(cmd_run(a, out) == 0);
    REQUIRE(cmd_run(b, out) == 0);
    CHECK(slurp(base / "a" / "diagnostics.csv") == slurp(base / "b" / "diagnostics.csv"));
    CHECK(slurp(snapshot_path(base / "a", 600, "psi")) == slurp(snapshot_path(base / "b", 600, "psi")));
    CHECK(fs::exists(base / "a" / "validation.json"));
    CHECK(fs::exists(base / "a" / "boundary.csv"));

    RunConfig loaded;
    const Trajectory traj = load_trajectory(base / "a", &loaded);
    CHECK(traj.size() == 61);
    CHECK(format_config(loaded) == format_config(a));

    REQUIRE(cmd_scatter(loaded, base / "a", out) == 0);
    const fs::path sc = base / "a" / "scatter";
    CHECK(fs::exists(sc / "psi0_plus.dkg"));
    const auto meta = nlohmann::json::parse(slurp(sc / "metadata.json"));
    CHECK(meta.contains("fitted_slopes"));
    std::istringstream curve(slurp(sc / "curve.csv"));
    int rows = 0;
    for (std::string line; std::getline(curve, line);) ++rows;
    CHECK(rows == 62);

    CHECK(category_of([&] { load_trajectory(base / "missing"); }) == ErrorCategory::IoError);
    fs::remove_all(base);
}

// Exercises the shared library through the C interface only.
#include <ifslearn.h>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / name;
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("version string is present") {
    const char* v = ifsl_version();
    REQUIRE(v != nullptr);
    CHECK(std::strlen(v) > 0);
}

TEST_CASE("config lifecycle and error reporting") {
    SUBCASE("valid json loads") {
        ifsl_config* cfg = ifsl_config_load_json("{\"seed\": 42}");
        REQUIRE(cfg != nullptr);
        CHECK(ifsl_config_set_seed(cfg, 7) == IFSL_OK);
        CHECK(ifsl_config_set_replicates(cfg, 3) == IFSL_OK);
        CHECK(ifsl_config_set_out_dir(cfg, "/tmp/ifsl_capi_unused") == IFSL_OK);
        ifsl_config_free(cfg);
    }
    SUBCASE("invalid json reports an error") {
        ifsl_config* cfg = ifsl_config_load_json("{\"seed\": ");
        CHECK(cfg == nullptr);
        REQUIRE(ifsl_last_error() != nullptr);
        CHECK(std::strlen(ifsl_last_error()) > 0);
    }
    SUBCASE("missing seed is rejected") {
        CHECK(ifsl_config_load_json("{}") == nullptr);
    }
    SUBCASE("missing file is an error") {
        CHECK(ifsl_config_load_file("/nonexistent/ifsl.json") == nullptr);
    }
    SUBCASE("null config is handled") {
        CHECK(ifsl_config_set_seed(nullptr, 1) == IFSL_ERROR);
        CHECK(ifsl_run_copula(nullptr) == IFSL_ERROR);
        ifsl_config_free(nullptr); // no-op
    }
}

TEST_CASE("running a command through the C API") {
    TempDir out("ifsl_capi_mixing");
    const std::string json = "{\"seed\": 42, \"mixing_reps\": 3000, \"mixing_horizon\": 5, "
                             "\"out_dir\": \"" + out.path.string() + "\"}";
    ifsl_config* cfg = ifsl_config_load_json(json.c_str());
    REQUIRE(cfg != nullptr);
    CHECK(ifsl_run_mixing(cfg) == IFSL_OK);
    CHECK(fs::exists(out.path / "mixing_report.json"));
    CHECK(fs::exists(out.path / "mixing_curve.csv"));
    ifsl_config_free(cfg);
}

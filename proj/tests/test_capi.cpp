#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "arbo.h"

namespace fs = std::filesystem;

namespace {

struct Request {
    arbo_request* ptr = nullptr;
    explicit Request(const char* command) { REQUIRE(arbo_request_create(command, &ptr) == ARBO_OK); }
    ~Request() { arbo_request_destroy(ptr); }
};

struct Result {
    arbo_result* ptr = nullptr;
    ~Result() { arbo_result_destroy(ptr); }
};

fs::path scratch(const char* name) {
    const fs::path dir = fs::temp_directory_path() / ("arbo_capi_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("version string") { CHECK(std::strlen(arbo_version()) > 0); }

TEST_CASE("thresholds run end to end") {
    Request req("thresholds");
    Result res;
    REQUIRE(arbo_run(req.ptr, &res.ptr) == ARBO_OK);
    REQUIRE(arbo_result_file_count(res.ptr) == 1);
    CHECK(std::string(arbo_result_file_name(res.ptr, 0)) == "thresholds.csv");
    CHECK(std::string(arbo_result_file_content(res.ptr, 0)).rfind("name,value,applicable\n", 0) == 0);
    CHECK(arbo_result_file_name(res.ptr, 5) == nullptr);
    CHECK(arbo_result_failures(res.ptr) == 0);
}

TEST_CASE("error codes") {
    arbo_request* bad = nullptr;
    CHECK(arbo_request_create("frobnicate", &bad) == ARBO_ERR_VALIDATION);
    CHECK(bad == nullptr);
    CHECK(std::string(arbo_last_error()).find("frobnicate") != std::string::npos);
    CHECK(arbo_request_create(nullptr, &bad) == ARBO_ERR_ARGUMENT);

    Request req("sensitivity-local");
    CHECK(arbo_request_set_param(req.ptr, "alpha_1", 1.5) == ARBO_ERR_VALIDATION);
    CHECK(std::string(arbo_last_error()).find("alpha_1") != std::string::npos);
    double v = 0.0;
    REQUIRE(arbo_request_get_param(req.ptr, "alpha_1", &v) == ARBO_OK);
    CHECK(v == 0.2);
    CHECK(arbo_request_set_param(req.ptr, "nope", 1.0) == ARBO_ERR_VALIDATION);
    CHECK(arbo_request_set_variant(req.ptr, "sideways") == ARBO_ERR_VALIDATION);
    CHECK(arbo_request_load_config(req.ptr, "/nonexistent/file.cfg") == ARBO_ERR_IO);
    CHECK(arbo_request_preset(req.ptr, "nope") == ARBO_ERR_VALIDATION);

    // no vector population: the indices are undefined
    REQUIRE(arbo_request_set_param(req.ptr, "theta", 1e-4) == ARBO_OK);
    Result res;
    CHECK(arbo_run(req.ptr, &res.ptr) == ARBO_ERR_NUMERICAL);
    CHECK(res.ptr == nullptr);

    Request sim("simulate");
    REQUIRE(arbo_request_set_flag(sim.ptr, "dt", "zero") == ARBO_OK);
    CHECK(arbo_run(sim.ptr, &res.ptr) == ARBO_ERR_VALIDATION);
    CHECK(arbo_request_add_pulse(sim.ptr, "c_q", 0.1, 7, 1, 0, 10) == ARBO_ERR_VALIDATION);
    CHECK(arbo_request_set_flag(nullptr, "dt", "1") == ARBO_ERR_ARGUMENT);
    CHECK(arbo_result_write(nullptr, "x") == ARBO_ERR_ARGUMENT);
}

TEST_CASE("written outputs replay identically") {
    const fs::path dir = scratch("replay");
    Request req("simulate");
    REQUIRE(arbo_request_preset(req.ptr, "forward-figure") == ARBO_OK);
    REQUIRE(arbo_request_set_param(req.ptr, "beta_hv", 0.2) == ARBO_OK);
    REQUIRE(arbo_request_add_pulse(req.ptr, "c_m", 0.3, 7, 1, 0, 50) == ARBO_OK);
    REQUIRE(arbo_request_set_flag(req.ptr, "t-end", "80") == ARBO_OK);
    Result res;
    REQUIRE(arbo_run(req.ptr, &res.ptr) == ARBO_OK);
    REQUIRE(arbo_result_write(res.ptr, dir.string().c_str()) == ARBO_OK);
    const std::string manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("command=simulate\n") != std::string::npos);
    CHECK(manifest.find("param.beta_hv=0.20000000000000001\n") != std::string::npos);
    CHECK(manifest.find("pulse.0=c_m ") != std::string::npos);
    CHECK(manifest.find("flag.t-end=80\n") != std::string::npos);
    CHECK(manifest.find("flag.rtol=1e-08\n") != std::string::npos);
    CHECK(manifest.find("output.trajectory.csv=") != std::string::npos);

    Result again;
    int identical = 0;
    REQUIRE(arbo_replay((dir / "manifest.txt").string().c_str(), &again.ptr, &identical) == ARBO_OK);
    CHECK(identical == 1);
    CHECK(std::string(arbo_result_file_content(again.ptr, 0)) == arbo_result_file_content(res.ptr, 0));

    // a tampered digest is reported
    std::string edited = manifest;
    const auto at = edited.find("output.trajectory.csv=") + std::strlen("output.trajectory.csv=");
    edited[at] = edited[at] == '0' ? '1' : '0';
    std::ofstream(dir / "manifest.txt", std::ios::binary) << edited;
    Result third;
    REQUIRE(arbo_replay((dir / "manifest.txt").string().c_str(), &third.ptr, &identical) == ARBO_OK);
    CHECK(identical == 0);
    CHECK(arbo_result_failures(third.ptr) == 1);
    fs::remove_all(dir.parent_path());
}

TEST_CASE("manifest lists defaulted parameters") {
    const fs::path dir = scratch("defaults");
    const fs::path cfg = dir.parent_path() / "one.cfg";
    fs::create_directories(dir.parent_path());
    std::ofstream(cfg) << "beta_hv = 0.3\n";
    Request req("thresholds");
    REQUIRE(arbo_request_load_config(req.ptr, cfg.string().c_str()) == ARBO_OK);
    Result res;
    REQUIRE(arbo_run(req.ptr, &res.ptr) == ARBO_OK);
    REQUIRE(arbo_result_write(res.ptr, dir.string().c_str()) == ARBO_OK);
    const std::string manifest = slurp(dir / "manifest.txt");
    const auto line = manifest.substr(manifest.find("defaulted="));
    const auto value = line.substr(10, line.find('\n') - 10);
    CHECK(value.find("beta_hv") == std::string::npos);
    CHECK(value.find("Lambda_h") != std::string::npos);
    CHECK(value.find("theta") != std::string::npos);
    fs::remove_all(dir.parent_path());
}

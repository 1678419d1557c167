// Acceptance harness: one PASS/FAIL line per criterion, diagnostics indented.
//   acceptance [--criterion N]

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "arbo/selfcheck.hpp"

namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> read_dir(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream f(e.path(), std::ios::binary);
        out[e.path().filename().string()] = {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
    }
    return out;
}

int run_cli(const fs::path& out) {
    const std::string cmd = std::string("\"") + ARBO_CLI_PATH + "\" selfcheck -o \"" + out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Two selfcheck runs through the command-line tool must agree byte for byte.
arbo::CheckResult determinism() {
    arbo::CheckResult r;
    r.criterion = 10;
    r.name = "selfcheck outputs are byte-identical across runs";
    const fs::path root = fs::temp_directory_path() / ("arbo_accept_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const int a = run_cli(root / "first"), b = run_cli(root / "second");
    // exit 1 only reports failed criteria
    if ((a != 0 && a != 1) || (b != 0 && b != 1)) {
        r.detail = "selfcheck exited with " + std::to_string(a) + " and " + std::to_string(b);
        fs::remove_all(root);
        return r;
    }
    const auto first = read_dir(root / "first"), second = read_dir(root / "second");
    fs::remove_all(root);
    std::vector<std::string> differ;
    for (const auto& [name, content] : first) {
        const auto it = second.find(name);
        if (it == second.end() || it->second != content) differ.push_back(name);
    }
    for (const auto& [name, content] : second)
        if (!first.count(name)) differ.push_back(name);
    r.pass = differ.empty() && first.count("manifest.txt") && first.count("selfcheck.csv");
    r.detail = std::to_string(first.size()) + " files compared";
    for (const auto& n : differ) r.diagnostics.push_back("differs: " + n);
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
            which.push_back(std::atoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
            return 2;
        }
    }
    if (which.empty())
        for (int n = 1; n <= arbo::kCriterionCount; ++n) which.push_back(n);

    int failed = 0;
    for (int n : which) {
        if (n < 1 || n > arbo::kCriterionCount) {
            std::fprintf(stderr, "no criterion %d\n", n);
            return 2;
        }
        const arbo::CheckResult r = n == 10 ? determinism() : arbo::run_criterion(n);
        std::printf("%s criterion %d: %s: %s\n", r.pass ? "PASS" : "FAIL", n, r.name.c_str(), r.detail.c_str());
        for (const auto& d : r.diagnostics) std::printf("    %s\n", d.c_str());
        failed += !r.pass;
    }
    std::fflush(stdout);
    return failed ? 1 : 0;
}

#include <catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out, err;
};

fs::path binary() { return fs::read_symlink("/proc/self/exe").parent_path() / "ietlab"; }

std::string data(const std::string& name) { return std::string(IETLAB_DATA_DIR) + "/" + name; }

RunResult run(const std::string& args, const std::string& env = "") {
    const fs::path err = fs::temp_directory_path() / ("ietlab_cli_err_" + std::to_string(::getpid()));
    const std::string cmd = env + " " + binary().string() + " " + args + " 2>" + err.string();
    RunResult r;
    FILE* p = ::popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(err);
    r.err.assign(std::istreambuf_iterator<char>(in), {});
    fs::remove(err);
    return r;
}

double leading(const json& s) { return std::stod(s.get<std::string>()); }

} // namespace

TEST_CASE("cli binary is built", "[cli]") { REQUIRE(fs::exists(binary())); }

TEST_CASE("repro of the seven-letter example passes", "[cli]") {
    RunResult r = run("repro --case example-7-2");
    CHECK(r.code == 0);
    CHECK(r.out.find("summary: 1/1 reports pass") != std::string::npos);
    CHECK(r.out.rfind("# run_config ", 0) == 0);

    RunResult j = run("repro --case appendix-d --format json");
    REQUIRE(j.code == 0);
    json doc = json::parse(j.out);
    CHECK(doc["pass"] == true);
    CHECK(doc["reports"].size() == 1);
}

TEST_CASE("spectrum emits the five-letter spectrum as JSON", "[cli]") {
    RunResult r = run("spectrum --matrix " + data("five_letter_fixed_vector.json"));
    REQUIRE(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["run_config"]["precision_bits"] == 128);
    REQUIRE(doc["exponents"].size() == 5);
    const double theta1 = std::log(55 + 12 * std::sqrt(21.0));
    CHECK(std::abs(leading(doc["exponents"][0]["theta"]) - theta1) < 1e-12);
    CHECK(std::abs(leading(doc["exponents"][0]["theta"]) + leading(doc["exponents"][4]["theta"])) < 1e-12);
    CHECK(doc["exponents"][2]["theta"] == "0");
    CHECK(doc["kappa"] == 2);
    CHECK(doc["genus"] == 2);
    CHECK(doc["splitting"]["dims"]["stable"] == 2);
    CHECK(doc["splitting"]["dims"]["central"] == 1);
    CHECK(doc["splitting"]["dims"]["unstable"] == 2);
    CHECK(doc["splitting"]["non_degenerate"] == true);
    for (const auto& v : doc["splitting"]["unstable"])
        for (const auto& x : v) CHECK(x.is_string());
}

TEST_CASE("usage errors exit with 2", "[cli]") {
    CHECK(run("frobnicate").code == 2);
    CHECK(run("").code == 2);
    CHECK(run("spectrum").code == 2);
    CHECK(run("spectrum --matrix " + data("four_letter.json") + " --format csv").code == 2);
    CHECK(run("repro --case everything").code == 2);
    CHECK(run("--help").code == 0);
}

TEST_CASE("domain errors exit with 1 and explain on stderr", "[cli]") {
    RunResult missing = run("spectrum --matrix /nonexistent/matrix.json");
    CHECK(missing.code == 1);
    CHECK(missing.err.find("cannot open") != std::string::npos);
    CHECK(missing.out.empty());

    const fs::path tmp = fs::temp_directory_path() / "ietlab_cli_identity.json";
    std::ofstream(tmp) << R"([["1","0"],["0","1"]])";
    RunResult np = run("spectrum --matrix " + tmp.string());
    CHECK(np.code == 1);
    CHECK(np.err.find("NotPrimitive") != std::string::npos);
    fs::remove(tmp);

    CHECK(run("build --iet " + data("four_letter.json"), "IET_LAB_PRECISION_BITS=abc").code == 1);
}

TEST_CASE("identical run configurations give byte-identical output", "[cli]") {
    const std::string dev = "deviation --iet " + data("seven_letter.json") + " --cocycle " + data("pl_cocycle_7.json") +
                            " --center --nmax 20000 --samples 4 --format json --seed 5";
    RunResult a = run(dev), b = run(dev);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    RunResult c = run("spectrum --matrix " + data("seven_letter.json"));
    CHECK(c.out == run("spectrum --matrix " + data("seven_letter.json")).out);
    CHECK(run("repro --format json --threads 3").out == run("repro --format json --threads 3").out);

    RunResult other = run("deviation --iet " + data("seven_letter.json") + " --cocycle " + data("pl_cocycle_7.json") +
                          " --center --nmax 20000 --samples 4 --format json --seed 6");
    CHECK(json::parse(other.out)["run_config"]["seed"] == 6);
}

TEST_CASE("precision override is recorded in the header", "[cli]") {
    RunResult r = run("build --iet " + data("four_letter.json"), "IET_LAB_PRECISION_BITS=256");
    REQUIRE(r.code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["run_config"]["precision_bits"] == 256);
    CHECK(doc["base_period"] == 18);
    CHECK(doc["loop_verified"] == true);
    CHECK(json::parse(run("--bits 192 build --iet " + data("four_letter.json"), "IET_LAB_PRECISION_BITS=256").out)
              ["run_config"]["precision_bits"] == 192);
}

TEST_CASE("birkhoff and deviation emit (n, sup_norm) CSV", "[cli]") {
    RunResult r = run("birkhoff --iet " + data("seven_letter.json") + " --cocycle " + data("pl_cocycle_7.json") +
                      " --center --n 4000 --stride 1000 --samples 4");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::string> rows;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0) continue;
        if (line == "n,sup_norm") {
            header = true;
            continue;
        }
        rows.push_back(line);
    }
    CHECK(header);
    REQUIRE(rows.size() == 4);
    CHECK(rows.back().rfind("4000,", 0) == 0);

    RunResult d = run("deviation --iet " + data("seven_letter.json") + " --cocycle " + data("pl_cocycle_7.json") +
                      " --center --nmax 1000 --samples 2");
    REQUIRE(d.code == 0);
    CHECK(d.out.find("# exponent=") != std::string::npos);
    CHECK(d.out.find("\nn,sup_norm\n") != std::string::npos);
}

TEST_CASE("correct, classify and essential-values", "[cli]") {
    RunResult c = run("correct --iet " + data("seven_letter.json") + " --cocycle " + data("pl_cocycle_7.json") +
                      " --center --kmax 8");
    REQUIRE(c.code == 0);
    json doc = json::parse(c.out);
    CHECK(doc["h"].size() == 7);
    CHECK(doc["growth"].size() == 9);
    CHECK(doc["bounded"] == true);
    CHECK(leading(doc["tail_bound"]) < 1e-15);

    // (−2, √5 − 1, 2, 1 − √5, 0) and (−2, −√5 − 1, 2, √5 + 1, 0) as decimals
    RunResult cob = run("classify --iet " + data("five_letter_fixed_vector.json") +
                        " --vector=-2,1.2360679774997896964091736687312762354406183596115,2,-1.2360679774997896964091736687312762354406183596115,0");
    REQUIRE(cob.code == 0);
    CHECK(json::parse(cob.out)["classification"]["class"] == "Coboundary");
    RunResult nc = run("classify --iet " + data("five_letter_fixed_vector.json") +
                       " --vector=-2,-3.2360679774997896964091736687312762354406183596115,2,3.2360679774997896964091736687312762354406183596115,0");
    REQUIRE(nc.code == 0);
    CHECK(json::parse(nc.out)["classification"]["class"] == "NotCoboundary");
    CHECK(run("classify --iet " + data("five_letter_fixed_vector.json") + " --vector=1,1,1,1,1").code == 1);

    RunResult ev = run("essential-values --iet " + data("five_letter_fixed_vector.json") + " --cocycle " +
                       data("step_cocycle_5.json") + " --levels 1");
    REQUIRE(ev.code == 0);
    json e = json::parse(ev.out);
    CHECK(e["fixed_space"]["k"] == 1);
    for (const auto& cand : e["candidates"]) CHECK(cand["constant"] == true);
}

TEST_CASE("simulate and rotations", "[cli]") {
    RunResult s = run("simulate --iet " + data("seven_letter.json") + " --cocycle " + data("pl_cocycle_7.json") +
                      " --center --n 5000 --samples 3 --eps 0.5,2");
    REQUIRE(s.code == 0);
    json doc = json::parse(s.out);
    CHECK(doc["samples"] == 3);
    CHECK(doc["hits"].size() == 2);
    CHECK(run("simulate --iet " + data("seven_letter.json") + " --cocycle " + data("pl_cocycle_7.json") + " --eps x").code == 2);

    RunResult r = run("rotations --qmax 10000 --samples 100");
    REQUIRE(r.code == 0);
    json rot = json::parse(r.out);
    CHECK(rot["denjoy_koksma"]["violations"] == 0);
    CHECK(rot["denjoy_koksma"]["q"].back() == 6765);
    CHECK(rot["bpq"] == true);
    for (const auto& a : rot["partial_quotients"]) CHECK(a == 1);
}

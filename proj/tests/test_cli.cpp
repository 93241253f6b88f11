#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pdcphase/cli.hpp"

namespace fs = std::filesystem;
using pdcphase::cli::dispatch;

namespace {

struct Csv {
    std::vector<std::string> comments;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    Csv csv;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            csv.comments.push_back(line);
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            csv.columns = cells;
            have_header = true;
        } else {
            std::vector<double> row;
            for (const auto& c : cells) row.push_back(std::stod(c));
            csv.rows.push_back(row);
        }
    }
    return csv;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("pdcphase_test_" + name);
}

}  // namespace

TEST_CASE("qfi single point") {
    fs::path out = temp_file("qfi.csv");
    REQUIRE(dispatch({"qfi", "--flux", "4", "--eta", "1", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    REQUIRE(csv.columns == std::vector<std::string>{"tau", "eta", "flux", "i_qu"});
    REQUIRE(csv.rows.size() == 1);
    CHECK(csv.rows[0][3] == doctest::Approx(4.0).epsilon(1e-12));
    REQUIRE(!csv.comments.empty());
    CHECK(csv.comments[0].find("\"subcommand\":\"qfi\"") != std::string::npos);
}

TEST_CASE("cfi single point hits the closed form") {
    fs::path out = temp_file("cfi.csv");
    REQUIRE(dispatch({"cfi", "--j", "2", "--phi", "0.3", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    REQUIRE(csv.rows.size() == 1);
    CHECK(csv.rows[0][1] == doctest::Approx(8.0).epsilon(1e-10));
}

TEST_CASE("half-integer spin accepted both ways") {
    fs::path a = temp_file("cfi_half.csv");
    fs::path b = temp_file("cfi_twice.csv");
    REQUIRE(dispatch({"cfi", "--j", "1/2", "--phi", "1.0", "--out", a.string()}) == 0);
    REQUIRE(dispatch({"cfi", "--2j", "1", "--phi", "1.0", "--out", b.string()}) == 0);
    CHECK(read_csv(a).rows[0][1] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(read_csv(a).rows[0][1] == read_csv(b).rows[0][1]);
}

TEST_CASE("dmatrix output matches orthogonality") {
    fs::path out = temp_file("dmatrix.csv");
    REQUIRE(dispatch({"dmatrix", "--j", "3/2", "--phi", "0.7", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    REQUIRE(csv.rows.size() == 16);
    double row_norm = 0.0;  // squared entries of the m' = 3/2 row
    for (const auto& row : csv.rows) {
        if (row[0] == 3.0) row_norm += row[2] * row[2];
    }
    CHECK(row_norm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pdc-weights normalize with reported tail") {
    fs::path out = temp_file("weights.csv");
    REQUIRE(dispatch({"pdc-weights", "--tau", "1.0", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    double sum = 0.0;
    for (const auto& row : csv.rows) sum += row[1];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(csv.comments[0].find("weight_tail") != std::string::npos);
}

TEST_CASE("scaling sweep peaks inside the optimal flux window") {
    fs::path out = temp_file("scaling.csv");
    REQUIRE(dispatch({"scaling", "--eta", "0.8", "--flux-min", "0.1", "--flux-max", "100",
                      "--points", "200", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    REQUIRE(csv.rows.size() == 200);
    double best_flux = 0.0, best_gamma = 0.0;
    for (const auto& row : csv.rows) {
        REQUIRE(row[3] >= 1.0);
        REQUIRE(row[3] <= 2.0);
        if (row[3] > best_gamma) {
            best_gamma = row[3];
            best_flux = row[1];
        }
    }
    CHECK(best_flux >= 1.0);
    CHECK(best_flux <= 10.0);
}

TEST_CASE("flux table matches the closed forms") {
    fs::path out = temp_file("flux.csv");
    REQUIRE(dispatch({"flux", "--tau", "0.88137359", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    CHECK(csv.rows[0][1] == doctest::Approx(4.0).epsilon(1e-6));

    fs::path sweep = temp_file("flux_sweep.csv");
    REQUIRE(dispatch({"flux", "--tau-min", "0", "--tau-max", "1", "--points", "11", "--out",
                      sweep.string()}) == 0);
    Csv s = read_csv(sweep);
    REQUIRE(s.rows.size() == 11);
    CHECK(s.rows[0][1] == 0.0);
}

TEST_CASE("qfi accepts the interaction-time parameterization") {
    fs::path out = temp_file("qfi_tau.csv");
    REQUIRE(dispatch({"qfi", "--tau", "0.88137359", "--eta", "1", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    CHECK(csv.rows[0][2] == doctest::Approx(4.0).epsilon(1e-6));  // flux
    CHECK(csv.rows[0][3] == doctest::Approx(4.0).epsilon(1e-6));  // i_qu

    fs::path sweep = temp_file("qfi_sweep.csv");
    REQUIRE(dispatch({"qfi", "--eta", "0.5", "--flux-min", "0.5", "--flux-max", "50", "--points",
                      "20", "--out", sweep.string()}) == 0);
    Csv s = read_csv(sweep);
    REQUIRE(s.rows.size() == 20);
    double prev = 0.0;
    for (const auto& row : s.rows) {
        REQUIRE(row[3] >= prev);  // monotone in flux
        prev = row[3];
    }
}

TEST_CASE("joint distribution is a sub-normalized probability table") {
    fs::path out = temp_file("joint.csv");
    REQUIRE(dispatch({"joint-dist", "--tau", "0.6", "--eta", "0.7", "--cutoff", "10", "--max-n",
                      "8", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    REQUIRE(csv.rows.size() == 81);
    double mass = 0.0;
    for (const auto& row : csv.rows) {
        REQUIRE(row[2] >= 0.0);
        mass += row[2];
    }
    CHECK(mass <= 1.0 + 1e-12);
    CHECK(mass > 0.999);
}

TEST_CASE("subspace survey carries the documented schema") {
    fs::path out = temp_file("subspace.csv");
    REQUIRE(dispatch({"subspace", "--tau", "1.0", "--theta-min", "0", "--theta-max", "0.1",
                      "--theta-points", "2", "--phi-min", "0.4", "--phi-max", "0.8",
                      "--phi-points", "3", "--cutoff", "12", "--out", out.string()}) == 0);
    Csv csv = read_csv(out);
    REQUIRE(csv.columns ==
            std::vector<std::string>{"phi", "theta", "cfi_44", "weighted_cfi", "qfi_44",
                                     "max_cfi_over_phi"});
    REQUIRE(csv.rows.size() == 6);
    for (const auto& row : csv.rows) {
        if (row[1] == 0.0) REQUIRE(row[2] == doctest::Approx(8.0).epsilon(1e-9));
    }

    fs::path single = temp_file("subspace_single.csv");
    REQUIRE(dispatch({"subspace", "--tau", "1.0", "--theta", "0.1", "--phi-min", "0.6",
                      "--phi-max", "0.6", "--phi-points", "1", "--cutoff", "12", "--out",
                      single.string()}) == 0);
    Csv one = read_csv(single);
    REQUIRE(one.rows.size() == 1);
    CHECK(one.rows[0][2] > 4.0);  // supra-classical well inside the boundary
    CHECK(one.rows[0][4] > one.rows[0][2]);
}

TEST_CASE("bayes run is reproducible and summarized") {
    fs::path out1 = temp_file("bayes1.csv");
    fs::path out2 = temp_file("bayes2.csv");
    std::vector<std::string> args{"bayes", "--j",     "2",  "--k",    "5",
                                  "--trials", "20",   "--phi-true", "1.2",
                                  "--seed", "7",      "--grid", "256"};
    std::vector<std::string> a1 = args, a2 = args;
    a1.insert(a1.end(), {"--out", out1.string()});
    a2.insert(a2.end(), {"--out", out2.string()});
    REQUIRE(dispatch(a1) == 0);
    REQUIRE(dispatch(a2) == 0);
    Csv c1 = read_csv(out1), c2 = read_csv(out2);
    REQUIRE(c1.rows.size() == 20);
    REQUIRE(c1.rows == c2.rows);
    bool has_summary = false;
    for (const auto& c : c1.comments) has_summary |= c.find("summary") != std::string::npos;
    CHECK(has_summary);
}

TEST_CASE("json format embeds the manifest") {
    fs::path out = temp_file("qfi.json");
    REQUIRE(dispatch({"qfi", "--flux", "4", "--eta", "1", "--format", "json", "--out",
                      out.string()}) == 0);
    std::ifstream in(out);
    nlohmann::json doc = nlohmann::json::parse(in);
    CHECK(doc["manifest"]["subcommand"] == "qfi");
    CHECK(doc["manifest"]["version"].is_string());
    CHECK(doc["rows"][0][3].get<double>() == doctest::Approx(4.0));
}

TEST_CASE("output directory env var resolves relative paths") {
    fs::path dir = fs::temp_directory_path() / "pdcphase_outdir";
    fs::create_directories(dir);
    setenv("PDCPHASE_OUT_DIR", dir.c_str(), 1);
    REQUIRE(dispatch({"qfi", "--flux", "1", "--eta", "0.5", "--out", "envtest.csv"}) == 0);
    unsetenv("PDCPHASE_OUT_DIR");
    CHECK(fs::exists(dir / "envtest.csv"));
}

TEST_CASE("usage errors exit 2, computation errors exit 1") {
    CHECK(dispatch({"qfi", "--no-such-flag", "1"}) == 2);
    CHECK(dispatch({"no-such-subcommand"}) == 2);
    CHECK(dispatch({"cfi", "--phi", "0.3"}) == 2);            // missing spin
    CHECK(dispatch({"joint-dist", "--tau", "1.83", "--cutoff", "16", "--max-n", "8"}) == 1);
    CHECK(dispatch({"subspace", "--tau", "0.1", "--theta", "0.5"}) == 1);  // eta out of range
    CHECK(dispatch({"qfi", "--flux", "-3", "--eta", "0.5"}) == 1);
}

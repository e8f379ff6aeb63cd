// Drives the installed command-line binary end to end. The binary's path
// arrives in FCTM_CLI (set by the test harness); without it these cases
// report themselves as skipped and pass.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "fctm/version.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return std::getenv("FCTM_CLI"); }

#define REQUIRE_CLI()                                       \
    if (cli_path() == nullptr) {                            \
        MESSAGE("FCTM_CLI is not set; skipping this case"); \
        return;                                             \
    }

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() /
                     ("fctm_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args) {
    static int serial = 0;
    const fs::path out = scratch_dir() / ("stdout_" + std::to_string(serial) + ".txt");
    const fs::path err = scratch_dir() / ("stderr_" + std::to_string(serial) + ".txt");
    ++serial;
    const std::string cmd = std::string(cli_path()) + " " + args + " > " + out.string() +
                            " 2> " + err.string();
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string path_of(const std::string& name) { return (scratch_dir() / name).string(); }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

// Parses the "doc_id,theta_0,..." layout into rows of doubles.
std::vector<std::vector<double>> parse_theta_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    REQUIRE(line.rfind("doc_id", 0) == 0);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::istringstream fields(line);
        std::string f;
        bool first = true;
        while (std::getline(fields, f, ',')) {
            if (first) {
                first = false;
                continue;
            }
            row.push_back(std::stod(f));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

// One shared synthetic corpus + trained model for the pipeline cases.
struct Pipeline {
    std::string docword, vocab, model;
};

const Pipeline& pipeline() {
    static const Pipeline p = [] {
        Pipeline out;
        const std::string prefix = path_of("pipe");
        RunResult synth = run("synth --topics 3 --vocab-size 12 --docs 25 --words 40"
                              " --seed 5 --out " + prefix);
        REQUIRE(synth.code == 0);
        out.docword = prefix + ".docword.txt";
        out.vocab = prefix + ".vocab.txt";
        out.model = path_of("pipe.model.json");
        RunResult train = run("train --corpus " + out.docword + " --vocab " + out.vocab +
                              " --topics 3 --em-iters 5 --seed 3 --ofw-iters 60 --out " +
                              out.model);
        REQUIRE(train.code == 0);
        return out;
    }();
    return p;
}

}  // namespace

TEST_CASE("cli reports its version") {
    REQUIRE_CLI();
    const RunResult r = run("--version");
    CHECK(r.code == 0);
    CHECK(r.out == std::string(fctm::kVersion) + "\n");
}

TEST_CASE("cli usage errors exit with code 2") {
    REQUIRE_CLI();
    CHECK(run("").code == 2);                       // subcommand required
    CHECK(run("frobnicate").code == 2);             // unknown subcommand
    CHECK(run("train --topics 3").code == 2);       // --corpus missing
    CHECK(run("synth --topics 1 --out x").code == 2);  // below the range check
    CHECK(run("infer --model does_not_exist.json --corpus a --vocab b --out c").code == 2);
    CHECK(run("mc").code == 2);  // needs a model, a sigma file, or --tail-bound
    CHECK(run("graph --model whatever.json --threshold 0").code == 2);
}

TEST_CASE("cli numeric and model errors exit with code 3") {
    REQUIRE_CLI();
    const std::string bad_sigma = path_of("bad_sigma.json");
    write_file(bad_sigma, R"({"sigma": [[1.0, 2.0], [2.0, 1.0]]})");  // indefinite
    CHECK(run("certify --sigma-file " + bad_sigma).code == 3);

    const std::string not_a_model = path_of("not_a_model.json");
    write_file(not_a_model, "{}");
    CHECK(run("graph --model " + not_a_model).code == 3);
}

TEST_CASE("cli synth emits a loadable corpus with its mixtures") {
    REQUIRE_CLI();
    const Pipeline& p = pipeline();
    CHECK(fs::exists(p.docword));
    CHECK(fs::exists(p.vocab));
    CHECK(fs::exists(path_of("pipe") + ".theta.csv"));
    CHECK(fs::exists(path_of("pipe") + ".manifest.json"));

    const auto planted = parse_theta_csv(slurp(path_of("pipe") + ".theta.csv"));
    REQUIRE(planted.size() == 25);
    for (const auto& row : planted) {
        REQUIRE(row.size() == 3);
        double s = 0.0;
        for (double v : row) {
            CHECK(v > 0.0);
            s += v;
        }
        CHECK(std::abs(s - 1.0) <= 1e-9);
    }

    // The docword header is the standard three integers.
    std::istringstream in(slurp(p.docword));
    std::size_t d = 0, w = 0, nnz = 0;
    in >> d >> w >> nnz;
    CHECK(d == 25);
    CHECK(w == 12);
    CHECK(nnz > 0);
}

TEST_CASE("cli train writes a model, a history, and a manifest") {
    REQUIRE_CLI();
    const Pipeline& p = pipeline();
    CHECK(fs::exists(p.model));
    CHECK(fs::exists(p.model + ".history.csv"));
    CHECK(fs::exists(p.model + ".manifest.json"));

    const nlohmann::json model = nlohmann::json::parse(slurp(p.model));
    CHECK(model.at("format") == "ctm-model");
    CHECK(model.at("k") == 3);
    CHECK(model.at("v") == 12);

    const nlohmann::json man = nlohmann::json::parse(slurp(p.model + ".manifest.json"));
    CHECK(man.at("format") == "run-manifest");
    CHECK(man.at("command") == "train");
    CHECK(man.at("flags").at("topics") == 3);
    CHECK(man.contains("wall_ms"));

    const std::string hist = slurp(p.model + ".history.csv");
    CHECK(hist.rfind("iter,objective\n", 0) == 0);
}

TEST_CASE("cli infer emits simplex rows for every document") {
    REQUIRE_CLI();
    const Pipeline& p = pipeline();
    const std::string out = path_of("infer.theta.csv");
    const RunResult r = run("infer --model " + p.model + " --corpus " + p.docword +
                            " --vocab " + p.vocab + " --seed 9 --out " + out);
    REQUIRE(r.code == 0);
    const auto rows = parse_theta_csv(slurp(out));
    REQUIRE(rows.size() == 25);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 3);
        double s = 0.0;
        for (double v : row) {
            CHECK(v > 0.0);
            s += v;
        }
        CHECK(std::abs(s - 1.0) <= 1e-9);
    }
}

TEST_CASE("cli infer rejects a mismatched vocabulary") {
    REQUIRE_CLI();
    const Pipeline& p = pipeline();
    const std::string other = path_of("other");
    REQUIRE(run("synth --topics 3 --vocab-size 13 --docs 4 --words 10 --seed 1 --out " +
                other).code == 0);
    const RunResult r = run("infer --model " + p.model + " --corpus " + other +
                            ".docword.txt --vocab " + other + ".vocab.txt --out " +
                            path_of("mismatch.csv"));
    CHECK(r.code == 3);
    CHECK(r.err.find("vocabulary") != std::string::npos);
}

TEST_CASE("cli eval prints coherence per topic and writes a report") {
    REQUIRE_CLI();
    const Pipeline& p = pipeline();
    const std::string out = path_of("eval.json");
    const RunResult r = run("eval --model " + p.model + " --corpus " + p.docword +
                            " --vocab " + p.vocab + " --top-terms 3 --seed 2 --out " + out);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("mean per-word MAP objective:") != std::string::npos);
    CHECK(r.out.find("mean coherence:") != std::string::npos);

    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("format") == "eval-report");
    CHECK(j.at("per_doc_values").size() == 25);
    CHECK(j.at("coherence_per_topic").size() == 3);
    CHECK(j.at("top_terms").size() == 3);
    for (const auto& list : j.at("top_terms")) CHECK(list.size() == 3);
}

TEST_CASE("cli certify reports the identity-prior boundary exactly") {
    REQUIRE_CLI();
    const std::string sigma = path_of("identity_sigma.json");
    write_file(sigma, R"({"sigma": [[1.0, 0.0], [0.0, 1.0]]})");
    const RunResult r = run("certify --sigma-file " + sigma);
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j.at("lambda_min_inv") == 1.0);
    CHECK(j.at("k") == 3);
    CHECK(j.at("applicable") == true);
    // at the boundary the exponential is exactly (K-1)^2, so p is 1 - 4
    CHECK(j.at("p_bound") == -3.0);
    CHECK(j.at("vacuous") == true);
}

TEST_CASE("cli mc covers both modes") {
    REQUIRE_CLI();
    const std::string sigma = path_of("mc_sigma.json");
    write_file(sigma, R"({"sigma": [[0.25, 0.0], [0.0, 0.25]]})");  // inverse is 4I
    const RunResult rate = run("mc --sigma-file " + sigma + " --samples 500 --seed 4");
    REQUIRE(rate.code == 0);
    const nlohmann::json jr = nlohmann::json::parse(rate.out);
    CHECK(jr.at("mode") == "concavity-rate");
    CHECK(jr.at("k") == 3);
    const double nsd = jr.at("hessian_nsd_rate").get<double>();
    const double lem = jr.at("lemma_rate").get<double>();
    CHECK(lem <= nsd);
    CHECK(nsd <= 1.0);

    const RunResult tail =
        run("mc --tail-bound --dim 3 --s-scale 5 --samples 20000 --seed 4");
    REQUIRE(tail.code == 0);
    const nlohmann::json jt = nlohmann::json::parse(tail.out);
    CHECK(jt.at("mode") == "tail-bound");
    const double bound = jt.at("bound").get<double>();
    CHECK(bound == doctest::Approx(9.0 * std::exp(-8.0)).epsilon(1e-12));
    CHECK(jt.at("empirical_conditional_rate").get<double>() <= bound);
}

TEST_CASE("cli graph renders parseable dot text") {
    REQUIRE_CLI();
    const Pipeline& p = pipeline();
    const RunResult to_stdout = run("graph --model " + p.model + " --threshold 0.2");
    REQUIRE(to_stdout.code == 0);
    CHECK(testutil::dot_parses(to_stdout.out));
    CHECK(to_stdout.out.find("graph ctm {") == 0);

    const std::string out = path_of("graph.dot");
    const RunResult to_file = run("graph --model " + p.model + " --threshold 0.2 --vocab " +
                                  p.vocab + " --out " + out);
    REQUIRE(to_file.code == 0);
    CHECK(to_file.out.find("graph written:") != std::string::npos);
    const std::string dot = slurp(out);
    CHECK(testutil::dot_parses(dot));
    CHECK(dot.find("w00") != std::string::npos);  // vocabulary labels resolved

    const RunResult mc = run("graph --model " + p.model +
                             " --mc --samples 300 --seed 6 --threshold 0.2");
    REQUIRE(mc.code == 0);
    CHECK(testutil::dot_parses(mc.out));
}

TEST_CASE("cli race prints a per-document comparison") {
    REQUIRE_CLI();
    const Pipeline& p = pipeline();
    const std::string out = path_of("race.json");
    const RunResult r = run("race --model " + p.model + " --corpus " + p.docword +
                            " --vocab " + p.vocab + " --seed 8 --ofw-iters 40 --out " + out);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("summary:") != std::string::npos);
    const nlohmann::json j = nlohmann::json::parse(slurp(out));
    CHECK(j.at("format") == "race-report");
    CHECK(j.at("rows").size() == 25);
    const std::size_t wins = j.at("wins").get<std::size_t>();
    const std::size_t ties = j.at("ties").get<std::size_t>();
    const std::size_t losses = j.at("losses").get<std::size_t>();
    CHECK(wins + ties + losses == 25);
    for (const auto& row : j.at("rows")) {
        CHECK(row.at("ofw_feasible") == true);
        CHECK(row.at("pga_feasible") == true);
    }
}

TEST_CASE("cli primary outputs are byte stable under fixed seeds") {
    REQUIRE_CLI();
    const Pipeline& p = pipeline();

    const std::string a = path_of("rerun_a");
    const std::string b = path_of("rerun_b");
    REQUIRE(run("synth --topics 2 --vocab-size 8 --docs 10 --words 15 --seed 21 --out " +
                a).code == 0);
    REQUIRE(run("synth --topics 2 --vocab-size 8 --docs 10 --words 15 --seed 21 --out " +
                b).code == 0);
    CHECK(slurp(a + ".docword.txt") == slurp(b + ".docword.txt"));
    CHECK(slurp(a + ".vocab.txt") == slurp(b + ".vocab.txt"));
    CHECK(slurp(a + ".theta.csv") == slurp(b + ".theta.csv"));

    const std::string ta = path_of("model_a.json");
    const std::string tb = path_of("model_b.json");
    const std::string train_flags = " --topics 3 --em-iters 3 --seed 3 --ofw-iters 40";
    REQUIRE(run("train --corpus " + p.docword + " --vocab " + p.vocab + train_flags +
                " --out " + ta).code == 0);
    REQUIRE(run("train --corpus " + p.docword + " --vocab " + p.vocab + train_flags +
                " --out " + tb).code == 0);
    CHECK(slurp(ta) == slurp(tb));
    CHECK(slurp(ta + ".history.csv") == slurp(tb + ".history.csv"));

    const std::string ia = path_of("infer_a.csv");
    const std::string ib = path_of("infer_b.csv");
    const std::string infer_flags = "infer --model " + ta + " --corpus " + p.docword +
                                    " --vocab " + p.vocab + " --seed 17 --out ";
    REQUIRE(run(infer_flags + ia).code == 0);
    REQUIRE(run(infer_flags + ib).code == 0);
    CHECK(slurp(ia) == slurp(ib));
}

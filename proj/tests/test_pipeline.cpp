// Copyright 2026 The workrecon authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "workrecon/io.hpp"

using namespace workrecon;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct RunResult {
    int code = -1;
    std::string out;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string &args) {
    const std::string cmd = std::string(WORKRECON_CLI_PATH) + " " + args + " 2>&1";
    FILE *pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fresh_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / "workrecon-cli-tests" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

bool file_exists(const std::string &dir, const std::string &name) {
    return std::filesystem::exists(std::filesystem::path(dir) / name);
}

std::size_t line_count(const std::string &path) {
    const std::string text = read_text_file(path);
    std::size_t n = 0;
    for (char c : text) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("help is free, missing subcommands are not", "[pipeline]") {
    CHECK(run_cli("--help").code == 0);
    CHECK_THAT(run_cli("--help").out, ContainsSubstring("simulate"));
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("simulate --no-such-flag").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
}

TEST_CASE("simulate is deterministic in the seed", "[pipeline]") {
    const std::string a = fresh_dir("sim-a");
    const std::string b = fresh_dir("sim-b");
    const std::string args = "simulate --temps 20 12 9 --sigma 0.05 --seed 20260815 --outdir ";
    CHECK(run_cli(args + a).code == 0);
    CHECK(run_cli(args + b).code == 0);
    const std::string da = read_text_file(a + "/dataset.jsonl");
    CHECK(da == read_text_file(b + "/dataset.jsonl"));
    CHECK_FALSE(da.empty());

    const std::string c = fresh_dir("sim-c");
    CHECK(run_cli("simulate --temps 20 12 9 --sigma 0.05 --seed 7 --outdir " + c).code == 0);
    CHECK(da != read_text_file(c + "/dataset.jsonl"));
}

TEST_CASE("config file overrides conflicting flags", "[pipeline]") {
    const std::string a = fresh_dir("cfg-a");
    const std::string b = fresh_dir("cfg-b");
    write_text_file(a + "/run.json", R"({"temperatures_pev":[20,12,9],"sigma":0})");
    CHECK(run_cli("simulate --temps 1 2 3 --sigma 0.5 --config " + a + "/run.json --outdir " + a).code ==
          0);
    CHECK(run_cli("simulate --temps 20 12 9 --sigma 0 --outdir " + b).code == 0);
    CHECK(read_text_file(a + "/dataset.jsonl") == read_text_file(b + "/dataset.jsonl"));

    write_text_file(a + "/bad.json", R"({"colour":"red"})");
    const RunResult bad = run_cli("simulate --config " + a + "/bad.json --outdir " + a);
    CHECK(bad.code == 4);
    CHECK_THAT(bad.out, ContainsSubstring("colour"));
}

TEST_CASE("noiseless chain recovers the preparation temperature", "[pipeline]") {
    const std::string d = fresh_dir("noiseless");
    CHECK(run_cli("simulate --temps 20 12 9 --sigma 0 --outdir " + d).code == 0);
    CHECK(run_cli("invert " + d + "/dataset.jsonl --temps 20 12 9 --outdir " + d).code == 0);
    CHECK(run_cli("workdist " + d + "/inversion.json " + d + "/dataset.jsonl --outdir " + d).code == 0);
    for (const char *kt : {"20.0", "12.0", "9.0"}) {
        CHECK(file_exists(d, std::string("workdist_forward_kT") + kt + ".tsv"));
        CHECK(file_exists(d, std::string("workdist_backward_kT") + kt + ".tsv"));
    }

    const RunResult cr = run_cli("crooks " + d + "/workdist_forward_kT12.0.tsv " + d +
                                 "/workdist_backward_kT12.0.tsv --outdir " + d);
    CHECK(cr.code == 0);
    REQUIRE(file_exists(d, "crooks_kT12.0.json"));
    REQUIRE(file_exists(d, "plot_kT12.0.tsv"));
    const FitSummary fit = read_fit(d + "/crooks_kT12.0.json");
    CHECK_THAT(fit.kt_pev, WithinRel(12.0, 1e-6));
    CHECK_THAT(fit.intercept, WithinAbs(0.0, 1e-7));
    CHECK_FALSE(fit.mismatched_preparation);
    CHECK(fit.n_points + fit.n_excluded == 13);

    const RunResult rep = run_cli("report --temps 20 12 9 --outdir " + d);
    CHECK(rep.code == 0);
    CHECK_THAT(rep.out, ContainsSubstring("[spectrum]"));
    CHECK_THAT(rep.out, ContainsSubstring("[transition forward]"));
    CHECK_THAT(rep.out, ContainsSubstring("[micro-reversibility]"));
    CHECK_THAT(rep.out, ContainsSubstring("[temperatures]"));
    CHECK_THAT(rep.out, ContainsSubstring("3053.775"));
    REQUIRE(file_exists(d, "summary.txt"));
    CHECK_THAT(read_text_file(d + "/summary.txt"), ContainsSubstring("# workrecon.summary v1"));
}

TEST_CASE("noisy chain runs end to end", "[pipeline]") {
    const std::string d = fresh_dir("noisy");
    const std::string common = " --temps 20 12 9 --sigma 0.05 --seed 20260815 --outdir " + d;
    CHECK(run_cli("simulate" + common).code == 0);
    const RunResult inv = run_cli("invert " + d + "/dataset.jsonl" + common);
    CHECK(inv.code == 0);
    CHECK_THAT(inv.out, ContainsSubstring("converged"));
    CHECK(run_cli("workdist " + d + "/inversion.json " + d + "/dataset.jsonl" + common).code == 0);
    const RunResult cr = run_cli("crooks " + d + "/workdist_forward_kT12.0.tsv " + d +
                                 "/workdist_backward_kT12.0.tsv --trials 12" + common);
    CHECK(cr.code == 0);
    REQUIRE(file_exists(d, "crooks_kT12.0.json"));
    const FitSummary fit = read_fit(d + "/crooks_kT12.0.json");
    CHECK(fit.kt_prep_pev == 12.0);
    CHECK(fit.n_points >= 3);
    CHECK(run_cli("report" + common).code == 0);
    CHECK_THAT(run_cli("report" + common).out, ContainsSubstring("12"));
}

TEST_CASE("malformed or missing inputs name the problem", "[pipeline]") {
    const std::string d = fresh_dir("broken");
    write_text_file(d + "/dataset.jsonl",
                    R"({"format":"workrecon.dataset","version":1})" "\n"
                    R"({"type":"record","observable":"sigma_z_H","direction":"forward","kT_peV":12,"stderr":0})" "\n");
    const RunResult inv = run_cli("invert " + d + "/dataset.jsonl --outdir " + d);
    CHECK(inv.code == 4);
    CHECK_THAT(inv.out, ContainsSubstring("line 2") && ContainsSubstring("mean"));

    const RunResult gone = run_cli("invert " + d + "/nowhere.jsonl --outdir " + d);
    CHECK(gone.code == 4);
    CHECK_THAT(gone.out, ContainsSubstring("nowhere.jsonl"));

    const RunResult rep = run_cli("report --outdir " + fresh_dir("empty-report"));
    CHECK(rep.code == 4);
    CHECK_THAT(rep.out, ContainsSubstring("dataset.jsonl"));
}

TEST_CASE("two temperatures cannot pin nine unknowns", "[pipeline]") {
    const std::string d = fresh_dir("two-temps");
    CHECK(run_cli("simulate --temps 20 12 --sigma 0 --outdir " + d).code == 0);
    const RunResult inv = run_cli("invert " + d + "/dataset.jsonl --temps 20 12 --outdir " + d);
    CHECK(inv.code == 2);
    CHECK_THAT(inv.out, ContainsSubstring("under-determined"));
}

TEST_CASE("error propagation refuses a two-temperature configuration", "[pipeline]") {
    const std::string d = fresh_dir("crooks-two-temps");
    CHECK(run_cli("simulate --temps 20 12 9 --sigma 0 --outdir " + d).code == 0);
    CHECK(run_cli("invert " + d + "/dataset.jsonl --temps 20 12 9 --outdir " + d).code == 0);
    CHECK(run_cli("workdist " + d + "/inversion.json " + d + "/dataset.jsonl --outdir " + d).code == 0);
    const RunResult cr = run_cli("crooks " + d + "/workdist_forward_kT12.0.tsv " + d +
                                 "/workdist_backward_kT12.0.tsv --temps 20 12 --sigma 0.05 --trials 5 "
                                 "--outdir " + d);
    CHECK(cr.code == 2);
    CHECK_THAT(cr.out, ContainsSubstring("3 distinct"));
}

TEST_CASE("a forward-only run reports the missing direction", "[pipeline]") {
    const std::string d = fresh_dir("fwd-only");
    const std::string common = " --temps 20 12 9 --sigma 0 --forward-only --outdir " + d;
    CHECK(run_cli("simulate" + common).code == 0);
    CHECK(run_cli("invert " + d + "/dataset.jsonl" + common).code == 0);
    const RunResult rep = run_cli("report" + common);
    CHECK(rep.code == 0);
    CHECK_THAT(rep.out, ContainsSubstring("absent"));

    const RunResult inv_b =
        run_cli("invert " + d + "/dataset.jsonl --temps 20 12 9 --backward-only --outdir " + d);
    CHECK(inv_b.code == 2);
    CHECK_THAT(inv_b.out, ContainsSubstring("no records"));
}

TEST_CASE("switching off the coupling shrinks the work support", "[pipeline]") {
    const std::string a = fresh_dir("coupled");
    const std::string b = fresh_dir("uncoupled");
    const std::string base = "--temps 20 12 9 --sigma 0 --outdir ";
    CHECK(run_cli("simulate " + base + a).code == 0);
    CHECK(run_cli("invert " + a + "/dataset.jsonl " + base + a).code == 0);
    CHECK(run_cli("workdist " + a + "/inversion.json " + a + "/dataset.jsonl " + base + a).code == 0);
    CHECK(run_cli("simulate --j-zero " + base + b).code == 0);
    CHECK(run_cli("invert " + b + "/dataset.jsonl --j-zero " + base + b).code == 0);
    CHECK(run_cli("workdist " + b + "/inversion.json " + b + "/dataset.jsonl --j-zero " + base + b)
              .code == 0);
    // Header plus column line plus one row per work value.
    CHECK(line_count(a + "/workdist_forward_kT20.0.tsv") == 2 + 13);
    CHECK(line_count(b + "/workdist_forward_kT20.0.tsv") == 2 + 7);
}

TEST_CASE("a mismatched distribution pair is flagged, not rejected", "[pipeline]") {
    const std::string d = fresh_dir("mismatch");
    CHECK(run_cli("simulate --temps 20 12 9 --sigma 0 --outdir " + d).code == 0);
    CHECK(run_cli("invert " + d + "/dataset.jsonl --temps 20 12 9 --outdir " + d).code == 0);
    CHECK(run_cli("workdist " + d + "/inversion.json " + d + "/dataset.jsonl --outdir " + d).code == 0);
    const RunResult cr = run_cli("crooks " + d + "/workdist_forward_kT20.0.tsv " + d +
                                 "/workdist_backward_kT12.0.tsv --outdir " + d);
    CHECK(cr.code == 0);
    CHECK_THAT(cr.out, ContainsSubstring("mismatch"));
    const FitSummary fit = read_fit(d + "/crooks_kT20.0.json");
    CHECK(fit.mismatched_preparation);
}

TEST_CASE("crooks rejects swapped directions", "[pipeline]") {
    const std::string d = fresh_dir("swapped");
    CHECK(run_cli("simulate --temps 20 12 9 --sigma 0 --outdir " + d).code == 0);
    CHECK(run_cli("invert " + d + "/dataset.jsonl --temps 20 12 9 --outdir " + d).code == 0);
    CHECK(run_cli("workdist " + d + "/inversion.json " + d + "/dataset.jsonl --outdir " + d).code == 0);
    const RunResult cr = run_cli("crooks " + d + "/workdist_backward_kT12.0.tsv " + d +
                                 "/workdist_forward_kT12.0.tsv --outdir " + d);
    CHECK(cr.code == 2);
}

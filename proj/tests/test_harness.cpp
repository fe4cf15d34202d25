#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <tsf/tsf.hpp>

using namespace tsf;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// Runs the CLI and captures stdout; stderr is discarded unless `redirect` says otherwise.
Run cli(const std::string& args, const std::string& redirect = "2>/dev/null") {
    const std::string cmd = std::string(TSF_CLI_PATH) + " " + args + " " + redirect;
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

Run cli_stderr(const std::string& args) { return cli(args, "2>&1 1>/dev/null"); }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("tsf_harness_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Catalog, EveryEntryLoads) {
    for (const auto& e : catalog_entries()) {
        const CatalogItem item = catalog_load(e.name);
        if (e.kind == "surface") {
            EXPECT_TRUE(std::holds_alternative<TranslationSurface>(item)) << e.name;
        }
        if (e.kind == "origami") {
            EXPECT_TRUE(std::holds_alternative<Origami>(item)) << e.name;
        }
        if (e.kind == "polygon") {
            EXPECT_TRUE(std::holds_alternative<RationalPolygon>(item)) << e.name;
        }
        if (e.kind == "sheet") {
            EXPECT_TRUE(std::holds_alternative<AffineSubspaceSpec>(item)) << e.name;
        }
        if (e.kind != "sheet") {
            EXPECT_TRUE(validate_surface(catalog_surface(e.name)).valid()) << e.name;
        }
    }
}

TEST(Catalog, TorusAndOctagon) {
    const auto t = catalog_surface("torus");
    EXPECT_EQ(area(t), 1.0);
    EXPECT_EQ(stratum_of(t).genus, 1);
    // octagon: all 8 corners meet in one point of angle 8 * (3 pi / 4) = 6 pi, a zero of order 2
    const auto o = catalog_surface("octagon");
    double total = 0.0;
    for (int i = 0; i < 8; ++i) total += interior_angle(o.polygons[0], i);
    EXPECT_NEAR(total, 6 * pi, 1e-12);
    EXPECT_EQ(stratum_of(o).alpha, std::vector<int>{2});
}

TEST(Catalog, UnknownNameRejected) {
    EXPECT_THROW(catalog_load("nope"), validation_error);
    EXPECT_THROW(catalog_text("nope"), validation_error);
}

TEST(ExportSeries, EmptySeriesIsHeaderOnly) {
    const auto path = scratch("empty.csv");
    CsvTable({"t", "cesaro_value"}).write(path.string());
    EXPECT_EQ(slurp(path), "t,cesaro_value\n");
}

TEST(ExportSeries, ThreePointsGiveFourLines) {
    const auto w = cylinder_waists(catalog_surface("torus"), std::exp(1.0));
    const CountSeries s = cesaro_from_waists(w, 1.0, 10);
    CsvTable tab({"t", "cesaro_value"});
    for (std::size_t i = 0; i < 3; ++i) tab.add_row({s.points[i].t, s.points[i].value});
    const auto path = scratch("three.csv");
    tab.write(path.string());
    const std::string text = slurp(path);
    EXPECT_EQ(count_lines(text), 4u);
    EXPECT_EQ(text.find('\r'), std::string::npos);
    EXPECT_EQ(text.back(), '\n');
}

TEST(ExportSeries, SeventeenSignificantDigits) {
    CsvTable tab({"x"});
    tab.add_row({0.1});
    tab.add_row({1.0 / 3.0});
    EXPECT_EQ(tab.str(), "x\n0.10000000000000001\n0.33333333333333331\n");
    // the printed value reads back to the same double
    EXPECT_EQ(std::stod("0.33333333333333331"), 1.0 / 3.0);
}

TEST(ExportSeries, TextCellsWithSeparatorsAreQuoted) {
    CsvTable tab({"key", "value"});
    tab.add_row({"stratum", "H(1,1)"});
    tab.add_row({"note", "say \"hi\""});
    EXPECT_EQ(tab.str(), "key,value\nstratum,\"H(1,1)\"\nnote,\"say \"\"hi\"\"\"\n");
}

TEST(ExportSeries, RowWidthChecked) { EXPECT_THROW(CsvTable({"a", "b"}).add_row({1.0}), validation_error); }

TEST(ExportSeries, UnwritablePath) {
    EXPECT_THROW(CsvTable({"a"}).write("/nonexistent-dir/x.csv"), io_error);
    EXPECT_THROW(read_text_file("/nonexistent-dir/x.csv"), io_error);
}

TEST(ExportSeries, RepeatedRunIsByteIdentical) {
    const auto a = scratch("sv_a.csv"), b = scratch("sv_b.csv");
    ASSERT_EQ(cli("--out " + a.string() + " billiard sv catalog:square-billiard --t-max 4 --steps 40").code, 0);
    ASSERT_EQ(cli("--out " + b.string() + " billiard sv catalog:square-billiard --t-max 4 --steps 40").code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(count_lines(slurp(a)), 41u);
}

TEST(Manifest, WrittenNextToOutput) {
    const auto a = scratch("m_a.csv"), b = scratch("m_b.csv");
    ASSERT_EQ(cli("--seed 11 --threads 1 --out " + a.string() + " catalog").code, 0);
    ASSERT_EQ(cli("--seed 11 --threads 2 --out " + b.string() + " catalog").code, 0);
    const auto ja = nlohmann::json::parse(slurp(a.string() + ".manifest.json"));
    const auto jb = nlohmann::json::parse(slurp(b.string() + ".manifest.json"));
    EXPECT_EQ(ja["seed"], 11);
    EXPECT_EQ(ja["version"], artifact_version);
    EXPECT_EQ(ja["outputs"][0], a.string());
    // thread count and output path do not enter the configuration
    EXPECT_EQ(ja["config"], jb["config"]);
    EXPECT_EQ(ja["config_hash"], jb["config_hash"]);
    EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, Commands) {
    auto r = cli("info catalog:h11-origami");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("stratum,\"H(1,1)\""), std::string::npos) << r.out;
    r = cli("systole catalog:torus");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "systole\n1\n");
    r = cli("cylinders catalog:torus --max-length 1.5 --format csv");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "dx,dy,waist,height");
    EXPECT_EQ(count_lines(r.out), 5u);
    r = cli("billiard count catalog:square-billiard --T 10");
    EXPECT_EQ(r.out, "T,count\n10,24\n");
    r = cli("orbit catalog:l-origami");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(count_lines(r.out), 3u);
    r = cli("act --matrix 2,0,0,0.5 catalog:torus");
    EXPECT_EQ(r.code, 0);
    EXPECT_NEAR(area(parse_surface(r.out)), 1.0, 1e-15);
}

TEST(Cli, SurfaceFileRoundTrip) {
    const auto p = scratch("oct.tsf");
    CsvTable::write_text_file(p.string(), write_surface(catalog_surface("octagon")));
    const auto r = cli("act --matrix 1,0,0,1 " + p.string());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, write_surface(catalog_surface("octagon")));
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(cli("catalog").code, 0);
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("info catalog:nope").code, 2);
    EXPECT_EQ(cli("act --matrix 1,1,1,1 catalog:torus").code, 2);
    EXPECT_EQ(cli("act --matrix 1,1 catalog:torus").code, 2);
    EXPECT_EQ(cli("billiard sv catalog:square-billiard --steps 5").code, 2);
    EXPECT_EQ(cli("average --scheme sector --obs bump:1 --t 2").code, 2);
    EXPECT_EQ(cli("drift --surface catalog:torus --t 1 --delta 0.5").code, 2);
    const auto one = scratch("one.org");
    CsvTable::write_text_file(one.string(), "format origami 1\nsquares 1\nh (1)\nv (1)\n");
    EXPECT_EQ(cli("orbit " + one.string()).code, 0);
    EXPECT_EQ(cli("orbit catalog:torus").code, 2);  // a surface, not an origami
    EXPECT_EQ(cli("systole catalog:octagon --cap 10").code, 3);
    EXPECT_EQ(cli("billiard sv catalog:torus --t-max 10 --steps 100 --cap 1000").code, 3);
    EXPECT_EQ(cli("info /nonexistent-dir/x.tsf").code, 4);
    EXPECT_EQ(cli("--out /nonexistent-dir/x.csv catalog").code, 4);
}

TEST(Cli, CappedOrbitPrintsPartialResult) {
    const auto r = cli("orbit catalog:h11-origami --cap 2");
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(count_lines(r.out), 2u);
}

TEST(Cli, ParseErrorsNameTheLine) {
    const auto p = scratch("bad.tsf");
    CsvTable::write_text_file(p.string(), "format tsf 1\npolygon a 0 0 1 0 1 1 0 1\nglue a.e0 b.e2\n");
    const auto r = cli_stderr("info " + p.string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("line 3"), std::string::npos) << r.out;
    CsvTable::write_text_file(p.string(), "format nothing 1\n");
    EXPECT_EQ(cli("info " + p.string()).code, 2);
}

TEST(Cli, DeterministicAcrossThreadCounts) {
    const char* commands[] = {
        "--seed 7 average --scheme rw --obs sys_bump:0.3:0.5 --n 12 --paths 300 --haar 2000",
        "--seed 7 average --scheme rw --obs sys_bump:0.3:0.5 --surface catalog:l-origami --n 6 --paths 64",
        "average --scheme sector --obs sys_bump:0.3:0.5 --t 3",
        "average --scheme folner --obs sys_indicator:0.4 --t 3 --surface catalog:octagon",
        "drift --surface catalog:h11-origami --fn fM --t 1 --nodes 64 --catalog catalog:zero-rel-h11",
        "recurrence --surface catalog:octagon --t 2 --epsK 0.3 --nodes 32",
        "billiard sv catalog:triangle-pi5 --t-max 3 --steps 30",
        "cylinders catalog:octagon --max-length 6",
    };
    for (const char* c : commands) {
        const auto one = cli(std::string("--threads 1 ") + c);
        const auto four = cli(std::string("--threads 4 ") + c);
        EXPECT_EQ(one.code, 0) << c;
        EXPECT_FALSE(one.out.empty()) << c;
        EXPECT_EQ(one.out, four.out) << c;
    }
}

TEST(Cli, SeedChangesRandomOutputs) {
    const std::string c = " average --scheme rw --obs sys_bump:0.3:0.5 --n 12 --paths 300";
    EXPECT_NE(cli("--seed 1" + c).out, cli("--seed 2" + c).out);
}

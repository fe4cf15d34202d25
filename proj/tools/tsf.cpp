// tsf: command-line front end. Every command writes CSV (or a surface/origami text) to
// stdout, or to --out together with <out>.manifest.json.
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <tsf/tsf.hpp>

using namespace tsf;

namespace {

// Input spec: a file path or catalog:<name>. The format header decides the kind.
CatalogItem load_item(const std::string& spec) {
    if (spec.rfind("catalog:", 0) == 0) return catalog_load(spec.substr(8));
    const std::string text = read_text_file(spec);
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto tok = detail::split_ws(detail::strip_comment(line));
        if (tok.empty()) continue;
        if (tok.size() == 3 && tok[0] == "format") {
            if (tok[1] == "tsf") return parse_surface(text);
            if (tok[1] == "origami") return parse_origami(text);
            if (tok[1] == "poly") return parse_polygon(text);
            if (tok[1] == "sheet") return parse_sheets(text).front();
        }
        break;
    }
    throw parse_error(1, "unrecognised format header in '" + spec + "'");
}

TranslationSurface as_surface(const CatalogItem& item) {
    if (auto* s = std::get_if<TranslationSurface>(&item)) return *s;
    if (auto* o = std::get_if<Origami>(&item)) return origami_surface(*o);
    if (auto* q = std::get_if<RationalPolygon>(&item)) return unfold(*q);
    throw validation_error("input is a sheet, not a surface");
}

TranslationSurface load_surface(const std::string& spec) { return as_surface(load_item(spec)); }

std::vector<AffineSubspaceSpec> load_sheets(const std::string& spec) {
    if (spec.empty()) return {};
    if (spec.rfind("catalog:", 0) == 0) return parse_sheets(catalog_text(spec.substr(8)));
    return parse_sheets(read_text_file(spec));
}

std::vector<double> parse_csv_reals(const std::string& s, std::size_t want, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(detail::parse_real(tok, 0));
    if (out.size() != want) throw validation_error(std::string(what) + " needs " + std::to_string(want) + " comma-separated numbers");
    return out;
}

CsvTable key_values() { return CsvTable({"key", "value"}); }

std::string info(const CatalogItem& item) {
    CsvTable t = key_values();
    if (auto* sh = std::get_if<AffineSubspaceSpec>(&item)) {
        t.add_row({"kind", "sheet"});
        t.add_row({"name", sh->name});
        t.add_row({"basis_tag", sh->basis_tag});
        t.add_row({"k", static_cast<long long>(sh->k())});
        t.add_row({"equations", static_cast<long long>(sh->equations.size())});
        return t.str();
    }
    std::string kind = "surface";
    if (auto* o = std::get_if<Origami>(&item)) {
        kind = "origami";
        t.add_row({"kind", kind});
        t.add_row({"squares", static_cast<long long>(o->n)});
    } else if (auto* q = std::get_if<RationalPolygon>(&item)) {
        kind = "polygon";
        t.add_row({"kind", kind});
        t.add_row({"vertices", static_cast<long long>(q->vertices.size())});
        t.add_row({"unfolding_copies", static_cast<long long>(unfolding_copies(*q))});
    } else {
        t.add_row({"kind", kind});
    }
    const TranslationSurface s = as_surface(item);
    const Stratum st = stratum_of(s);
    const PeriodMatrix pm = periods(s);
    t.add_row({"genus", static_cast<long long>(st.genus)});
    t.add_row({"stratum", st.name()});
    t.add_row({"polygons", static_cast<long long>(s.polygons.size())});
    t.add_row({"area", area(s)});
    t.add_row({"k", static_cast<long long>(pm.k())});
    t.add_row({"basis_tag", pm.basis_tag});
    return t.str();
}

struct Output {
    std::string path;
    std::vector<std::string> argv;
    std::uint64_t seed = 0;
    std::string started = utc_timestamp();

    // config string for the manifest hash: the command line minus --threads and --out
    std::string config() const {
        std::string c;
        for (std::size_t i = 1; i < argv.size(); ++i) {
            if (argv[i] == "--threads" || argv[i] == "--out") {
                ++i;
                continue;
            }
            if (argv[i].rfind("--threads=", 0) == 0 || argv[i].rfind("--out=", 0) == 0) continue;
            c += argv[i] + ";";
        }
        return c;
    }

    void emit(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            std::cout.flush();
            if (!std::cout) throw io_error("write to stdout failed");
            return;
        }
        CsvTable::write_text_file(path, text);
        RunManifest m;
        m.command_line = argv;
        m.seed = seed;
        m.config = config();
        m.outputs = {path};
        m.started = started;
        m.finished = utc_timestamp();
        m.write(path + ".manifest.json");
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"translation surfaces: geometry, SL(2,R) averages, drift and billiard counts"};
    app.require_subcommand(1);

    Output out;
    out.argv.assign(argv, argv + argc);
    unsigned nthreads = 0;
    app.add_option("--seed", out.seed, "root seed");
    app.add_option("--threads", nthreads, "worker threads (default: hardware)");
    app.add_option("--out", out.path, "output file (a manifest is written next to it)");

    std::string input;
    auto* info_cmd = app.add_subcommand("info", "kind, genus, stratum, area");
    info_cmd->add_option("input", input, "file or catalog:<name>")->required();

    std::string matrix;
    auto* act_cmd = app.add_subcommand("act", "apply a matrix in SL(2,R)");
    act_cmd->add_option("--matrix", matrix, "a11,a12,a21,a22")->required();
    act_cmd->add_option("input", input)->required();

    long long dev_cap = default_development_cap;
    auto* sys_cmd = app.add_subcommand("systole", "shortest saddle connection");
    sys_cmd->add_option("input", input)->required();
    sys_cmd->add_option("--cap", dev_cap, "development cap");

    double max_length = 0.0;
    std::string format = "csv";
    auto* cyl_cmd = app.add_subcommand("cylinders", "cylinders of circumference at most T");
    cyl_cmd->add_option("input", input)->required();
    cyl_cmd->add_option("--max-length", max_length)->required();
    cyl_cmd->add_option("--format", format)->check(CLI::IsMember({"csv"}));
    cyl_cmd->add_option("--cap", dev_cap, "development cap");

    std::size_t orbit_cap = default_orbit_cap;
    auto* orbit_cmd = app.add_subcommand("orbit", "SL(2,Z) orbit of an origami");
    orbit_cmd->add_option("input", input)->required();
    orbit_cmd->add_option("--cap", orbit_cap);

    auto* bil_cmd = app.add_subcommand("billiard", "rational billiards");
    bil_cmd->require_subcommand(1);
    auto* unfold_cmd = bil_cmd->add_subcommand("unfold", "Katok-Zemlyakov unfolding");
    unfold_cmd->add_option("input", input)->required();
    double count_T = 0.0;
    auto* count_cmd = bil_cmd->add_subcommand("count", "cylinders of circumference at most T");
    count_cmd->add_option("input", input)->required();
    count_cmd->add_option("--T", count_T)->required();
    count_cmd->add_option("--cap", dev_cap, "development cap");
    double t_max = 7.0;
    int steps = 70;
    auto* sv_cmd = bil_cmd->add_subcommand("sv", "Cesaro series of N(e^s) e^{-2s}");
    sv_cmd->add_option("input", input)->required();
    sv_cmd->add_option("--t-max", t_max);
    sv_cmd->add_option("--steps", steps);
    sv_cmd->add_option("--cap", dev_cap, "development cap");

    DriftConfig dcfg;
    std::string surface_spec = "catalog:torus";
    std::string fn = "u";
    std::string sheets_spec;
    double t = 1.0;
    int nodes = 1024;
    double target_c = 0.5, target_b = 0.0;
    auto* drift_cmd = app.add_subcommand("drift", "A_t f <= c f + b at one point");
    drift_cmd->add_option("--surface", surface_spec)->required();
    drift_cmd->add_option("--fn", fn)->check(CLI::IsMember({"u", "fM"}));
    drift_cmd->add_option("--t", t)->required();
    drift_cmd->add_option("--nodes", nodes);
    drift_cmd->add_option("--catalog", sheets_spec, "sheet file or catalog:<name>");
    drift_cmd->add_option("--c", target_c, "target contraction");
    drift_cmd->add_option("--b", target_b, "target additive constant");
    drift_cmd->add_option("--delta", dcfg.delta);
    drift_cmd->add_option("--eps", dcfg.eps);
    drift_cmd->add_option("--lambda", dcfg.lambda);
    drift_cmd->add_option("--k", dcfg.k);

    std::string scheme, obs_spec;
    double radius = 1.0;
    std::string interval = "0,6.283185307179586";
    int walk_n = 40;
    SchemeSettings scfg;
    std::size_t haar_samples = 0;
    auto* avg_cmd = app.add_subcommand("average", "ergodic average of an observable");
    avg_cmd->add_option("--scheme", scheme)->required()->check(CLI::IsMember({"sector", "folner", "rw"}));
    avg_cmd->add_option("--obs", obs_spec)->required();
    avg_cmd->add_option("--t", t, "time horizon (sector, folner)");
    avg_cmd->add_option("--surface", surface_spec);
    avg_cmd->add_option("--r", radius, "Folner radius");
    avg_cmd->add_option("--interval", interval, "sector I0,I1");
    avg_cmd->add_option("--n", walk_n, "random walk steps");
    avg_cmd->add_option("--paths", scfg.paths, "random walk paths");
    avg_cmd->add_option("--haar", haar_samples, "also report a Haar Monte Carlo mean (genus 1)");

    double eps_K = 0.3;
    int rec_nodes = 256;
    auto* rec_cmd = app.add_subcommand("recurrence", "share of directions spending most of [0,t] below eps_K");
    rec_cmd->add_option("--surface", surface_spec)->required();
    rec_cmd->add_option("--t", t)->required();
    rec_cmd->add_option("--epsK", eps_K);
    rec_cmd->add_option("--nodes", rec_nodes);

    auto* cat_cmd = app.add_subcommand("catalog", "list shipped objects");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (nthreads > 0) set_threads(nthreads);

    int exit_code = 0;
    try {
        std::string text;
        if (*info_cmd) {
            text = info(load_item(input));
        } else if (*act_cmd) {
            const auto m = parse_csv_reals(matrix, 4, "--matrix");
            const GroupElement g{m[0], m[1], m[2], m[3]};
            require_sl2(g);
            text = write_surface(act(g, load_surface(input)));
        } else if (*sys_cmd) {
            CsvTable tab({"systole"});
            tab.add_row({systole(load_surface(input), dev_cap)});
            text = tab.str();
        } else if (*cyl_cmd) {
            CsvTable tab({"dx", "dy", "waist", "height"});
            for (const auto& c : cylinders(load_surface(input), max_length, true, dev_cap))
                tab.add_row({c.direction.x, c.direction.y, c.waist, c.height});
            text = tab.str();
        } else if (*orbit_cmd) {
            const CatalogItem item = load_item(input);
            const auto* o = std::get_if<Origami>(&item);
            if (!o) throw validation_error("orbit needs an origami");
            const OrbitResult r = origami_orbit(*o, orbit_cap);
            for (const auto& m : r.members) text += origami_line(m) + "\n";
            if (r.capped) {
                std::cerr << "tsf: orbit cap " << orbit_cap << " reached; result is partial\n";
                exit_code = 3;
            }
        } else if (*bil_cmd) {
            if (*unfold_cmd) {
                const CatalogItem item = load_item(input);
                const auto* q = std::get_if<RationalPolygon>(&item);
                if (!q) throw validation_error("unfold needs a polygon");
                text = write_surface(unfold(*q));
            } else if (*count_cmd) {
                const auto w = cylinder_waists(load_surface(input), count_T, dev_cap);
                CsvTable tab({"T", "count"});
                tab.add_row({count_T, count_at_most(w, count_T)});
                text = tab.str();
            } else {
                if (steps < 10) throw validation_error("at least 10 steps are required");
                if (!(t_max > 0.0)) throw validation_error("t-max must be positive");
                const auto w = cylinder_waists(load_surface(input), std::exp(t_max), dev_cap);
                const CountSeries series = cesaro_from_waists(w, t_max, steps);
                CsvTable tab({"t", "cesaro_value"});
                for (const auto& p : series.points) tab.add_row({p.t, p.value});
                text = tab.str();
            }
        } else if (*drift_cmd) {
            dcfg.nodes = nodes;
            dcfg.validate();
            const OrbitPoint x(normalize_area(load_surface(surface_spec)));
            const OrbitFunction f = fn == "u" ? fn_u(dcfg) : fn_margulis(load_sheets(sheets_spec), dcfg);
            const DriftReport r = drift_check(f, x, t, nodes, target_c, target_b);
            CsvTable tab({"fn", "t", "nodes", "input_value", "empirical_average", "fitted_c", "fitted_b", "sigma_bound",
                          "target_c", "target_b", "pass"});
            tab.add_row({fn, r.t, static_cast<long long>(r.samples), r.input_value, r.empirical_average, r.fitted_c,
                         r.fitted_b, r.sigma_bound, r.target_c, r.target_b, static_cast<long long>(r.pass)});
            text = tab.str();
        } else if (*avg_cmd) {
            const Observable obs = parse_observable(obs_spec);
            const OrbitFunction f = fn_observable(obs);
            const OrbitPoint x(normalize_area(load_surface(surface_spec)));
            double value = 0.0;
            if (scheme == "sector") {
                const auto I = parse_csv_reals(interval, 2, "--interval");
                value = sector_average(f, x, t, I[0], I[1], scfg);
            } else if (scheme == "folner") {
                value = folner_average(f, x, t, radius, scfg);
            } else {
                value = random_walk_average(f, x, walk_n, out.seed, scfg);
            }
            CsvTable tab({"scheme", "obs", "t", "n", "value"});
            const bool walk = scheme == "rw";
            tab.add_row({scheme, obs_spec, walk ? 0.0 : t, static_cast<long long>(walk ? walk_n : 0), value});
            if (haar_samples > 0) {
                if (x.genus() != 1) throw validation_error("the Haar reference is only available in genus 1");
                const auto est = haar_mean([&](const ModularPoint& p) { return obs(p.systole()); }, haar_samples, out.seed);
                tab.add_row({"haar", obs_spec, 0.0, static_cast<long long>(haar_samples), est.mean});
            }
            text = tab.str();
        } else if (*rec_cmd) {
            const OrbitPoint x(normalize_area(load_surface(surface_spec)));
            CsvTable tab({"t", "eps_K", "nodes", "fraction"});
            tab.add_row({t, eps_K, static_cast<long long>(rec_nodes), recurrence_fraction(x, t, eps_K, rec_nodes)});
            text = tab.str();
        } else if (*cat_cmd) {
            CsvTable tab({"name", "kind", "description"});
            for (const auto& e : catalog_entries()) tab.add_row({e.name, e.kind, e.description});
            text = tab.str();
        }
        out.emit(text);
    } catch (const parse_error& e) {
        std::cerr << "tsf: " << e.what() << "\n";
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "tsf: " << e.what() << "\n";
        return 2;
    } catch (const cap_exceeded& e) {
        std::cerr << "tsf: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        std::cerr << "tsf: " << e.what() << "\n";
        return 4;
    } catch (const std::bad_alloc&) {
        std::cerr << "tsf: out of memory; lower the size parameters or --cap\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "tsf: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}

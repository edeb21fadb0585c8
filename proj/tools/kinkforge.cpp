// Command-line front end: wells / connect / verify / spectrum /
// coercivity / certify over preset or user polynomials, with
// machine-readable JSON reports and plot-ready orbit CSV.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include <kinkforge/kinkforge.hpp>

namespace kf = kinkforge;
using kf::cplx;
using kf::json;

namespace {

constexpr const char* kVersion = "kinkforge 1.0.0";

struct CommonArgs {
    std::string preset_name;
    std::string poly_json;
    std::string poly_file;
    std::vector<int> pair{0, 1};
    double X = 12.0;
    int N = 4096;
    std::string out_path;
    std::string format = "json";
    double tol_root = 1e-10;
    double tol_simple = 1e-8;
    double eps_seed = 1e-8;
    double tol_stop = 1e-9;
    double x_budget = 200.0;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_pair = true) {
    cmd->add_option("--preset", a.preset_name, "preset polynomial: phi4 | iphi4 | triple");
    cmd->add_option("--poly", a.poly_json, "polynomial as JSON {\"coeffs\":[[re,im],...]}");
    cmd->add_option("--poly-file", a.poly_file, "path to a polynomial JSON file");
    if (with_pair)
        cmd->add_option("--pair", a.pair, "well indices (a- a+), into the (Re,Im)-sorted list")
            ->expected(2);
    cmd->add_option("--X", a.X, "half-width of the truncated domain");
    cmd->add_option("--N", a.N, "grid interval count (power of two in [256, 65536])");
    cmd->add_option("--out", a.out_path, "output path (default: stdout)");
    cmd->add_option("--format", a.format, "json | csv (connect only)");
    cmd->add_option("--tol-root", a.tol_root, "root residual tolerance");
    cmd->add_option("--tol-simple", a.tol_simple, "simple-root |f'| threshold");
    cmd->add_option("--eps-seed", a.eps_seed, "shooting seed offset from a-");
    cmd->add_option("--tol-stop", a.tol_stop, "stopping distance from a+");
    cmd->add_option("--x-budget", a.x_budget, "maximum integration length");
}

kf::ComplexPoly resolve_poly(const CommonArgs& a) {
    int sources = !a.preset_name.empty() + !a.poly_json.empty() + !a.poly_file.empty();
    if (sources != 1)
        throw kf::ConfigError("give exactly one of --preset, --poly, --poly-file");
    if (!a.preset_name.empty()) return kf::preset(a.preset_name);
    if (!a.poly_json.empty()) return kf::poly_from_json_string(a.poly_json);
    std::ifstream in(a.poly_file);
    if (!in) throw kf::ConfigError("cannot open " + a.poly_file);
    json j;
    in >> j;
    return kf::poly_from_json(j);
}

void validate_grid(const CommonArgs& a) {
    if (a.X <= 0) throw kf::ConfigError("X must be positive");
    if (a.N < 256 || a.N > 65536 || (a.N & (a.N - 1)) != 0)
        throw kf::ConfigError("N must be a power of two in [256, 65536]");
}

std::pair<kf::Well, kf::Well> resolve_pair(const kf::WellSet& ws, const CommonArgs& a) {
    int i = a.pair[0], j = a.pair[1];
    int n = static_cast<int>(ws.wells.size());
    if (i < 0 || j < 0 || i >= n || j >= n || i == j)
        throw kf::ConfigError("pair indices must be distinct and in range [0, " +
                              std::to_string(n - 1) + "]");
    return {ws.wells[i], ws.wells[j]};
}

kf::OrbitOptions orbit_options(const CommonArgs& a) {
    kf::OrbitOptions o;
    o.X = a.X;
    o.N = a.N;
    o.eps_seed = a.eps_seed;
    o.tol_stop = a.tol_stop;
    o.x_budget = a.x_budget;
    return o;
}

std::uint64_t seed_from_env() {
    if (const char* s = std::getenv("KINKFORGE_SEED")) return std::strtoull(s, nullptr, 0);
    return 0x5EED;
}

void emit(const CommonArgs& a, const std::string& text) {
    if (a.out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(a.out_path, std::ios::binary);
        if (!out) throw kf::ConfigError("cannot write " + a.out_path);
        out << text;
    }
}

json wells_json(const kf::WellSet& ws) {
    json jw = json::array();
    for (const auto& w : ws.wells)
        jw.push_back({{"location", kf::complex_to_json(w.location)},
                      {"fprime", kf::complex_to_json(w.fprime)},
                      {"decay_rate", w.decay_rate},
                      {"hessian_scale", w.hessian_scale}});
    json jd = json::array();
    for (cplx z : ws.degenerate_zeros) jd.push_back(kf::complex_to_json(z));
    return json{{"wells", jw}, {"degenerate_zeros", jd}};
}

json config_echo(const CommonArgs& a, const kf::ComplexPoly& p) {
    return json{{"poly", kf::poly_to_json(p)}, {"pair", a.pair},          {"X", a.X},
                {"N", a.N},                    {"tol_root", a.tol_root},  {"tol_simple", a.tol_simple},
                {"eps_seed", a.eps_seed},      {"tol_stop", a.tol_stop},  {"x_budget", a.x_budget},
                {"seed", seed_from_env()}};
}

int run_certify(const CommonArgs& a) {
    kf::ComplexPoly f = resolve_poly(a);
    validate_grid(a);
    kf::WellSet ws = kf::find_wells(f, a.tol_root, a.tol_simple);
    if (ws.wells.size() < 2) {
        std::cerr << "certify: need at least two nondegenerate wells; found "
                  << ws.wells.size() << " well(s) and " << ws.degenerate_zeros.size()
                  << " degenerate zero(s) -- a double root has no exponentially "
                     "approached limit state\n";
        return 2;
    }
    auto [wm, wp] = resolve_pair(ws, a);
    const std::uint64_t seed = seed_from_env();

    kf::OrbitProfile prof = kf::connect(f, wm.location, wp.location, orbit_options(a));
    kf::Diagnostics diag = kf::verify_orbit(f, prof);
    kf::SpectralReport spec = kf::spectral_report(f, prof, 3, 1e-8, seed);
    auto fac = kf::factorization_gap(f, prof, kf::random_bumps(prof, 50, seed));
    int kdim = kf::kernel_dimension(f, prof);
    kf::GridField grow = kf::kernel_ode(f, prof, cplx(0, 1) * prof.eprime[prof.N / 2], prof.N / 2);
    auto wr = kf::wronskian(prof, grow);
    double wr_dev = wr.max_deviation / std::abs(wr.mid_value);

    json report{{"tool", kVersion},
                {"config", config_echo(a, f)},
                {"wells", wells_json(ws)},
                {"orbit", kf::orbit_metadata_json(prof, diag)},
                {"linearization", kf::linearization_json(fac, kdim, wr_dev)},
                {"spectral", kf::spectral_json(spec)}};

    bool all_pass = spec.verdict && fac.pass && kdim == 1 && wr_dev <= 1e-6;
    if (spec.verdict) {
        kf::CoercivityReport coer = kf::coercivity_report(f, prof, spec, 100, 50, 0.1, seed);
        report["coercivity"] = kf::coercivity_json(coer);
        all_pass = all_pass && coer.form2_pass && coer.form1_pass;
    }
    report["pass"] = all_pass;
    report["narrative"] =
        spec.verdict
            ? "kernel is one-dimensional and spanned by e'; spectrum nonnegative with gap"
            : "nondegeneracy checks failed; see spectral section";
    emit(a, report.dump(2));
    return all_pass ? 0 : 4;
}

int dispatch(CLI::App& app, const CommonArgs& a) {
    if (app.got_subcommand("wells")) {
        kf::ComplexPoly f = resolve_poly(a);
        emit(a, wells_json(kf::find_wells(f, a.tol_root, a.tol_simple)).dump(2));
        return 0;
    }
    if (app.got_subcommand("connect")) {
        kf::ComplexPoly f = resolve_poly(a);
        validate_grid(a);
        auto [wm, wp] = resolve_pair(kf::find_wells(f, a.tol_root, a.tol_simple), a);
        kf::OrbitProfile prof = kf::connect(f, wm.location, wp.location, orbit_options(a));
        if (a.format == "csv") {
            std::ostringstream os;
            kf::write_orbit_csv(os, prof);
            emit(a, os.str());
        } else {
            emit(a, kf::orbit_metadata_json(prof, kf::verify_orbit(f, prof)).dump(2));
        }
        return 0;
    }
    if (app.got_subcommand("verify")) {
        kf::ComplexPoly f = resolve_poly(a);
        validate_grid(a);
        auto [wm, wp] = resolve_pair(kf::find_wells(f, a.tol_root, a.tol_simple), a);
        kf::OrbitProfile prof = kf::connect(f, wm.location, wp.location, orbit_options(a));
        emit(a, kf::diagnostics_json(kf::verify_orbit(f, prof)).dump(2));
        return 0;
    }
    if (app.got_subcommand("spectrum")) {
        kf::ComplexPoly f = resolve_poly(a);
        validate_grid(a);
        auto [wm, wp] = resolve_pair(kf::find_wells(f, a.tol_root, a.tol_simple), a);
        kf::OrbitProfile prof = kf::connect(f, wm.location, wp.location, orbit_options(a));
        emit(a, kf::spectral_json(kf::spectral_report(f, prof, 3, 1e-8, seed_from_env())).dump(2));
        return 0;
    }
    if (app.got_subcommand("coercivity")) {
        kf::ComplexPoly f = resolve_poly(a);
        validate_grid(a);
        auto [wm, wp] = resolve_pair(kf::find_wells(f, a.tol_root, a.tol_simple), a);
        const std::uint64_t seed = seed_from_env();
        kf::OrbitProfile prof = kf::connect(f, wm.location, wp.location, orbit_options(a));
        kf::SpectralReport spec = kf::spectral_report(f, prof, 3, 1e-8, seed);
        emit(a, kf::coercivity_json(kf::coercivity_report(f, prof, spec, 100, 50, 0.1, seed)).dump(2));
        return 0;
    }
    if (app.got_subcommand("certify")) return run_certify(a);
    std::cerr << "no subcommand given; try --help\n";
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"heteroclinic-orbit computation and nondegeneracy certification "
                 "for planar potentials W = |f|^2"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(0, 1);

    CommonArgs a;
    add_common(app.add_subcommand("wells", "list wells and degenerate zeros"), a, false);
    add_common(app.add_subcommand("connect", "compute the heteroclinic orbit"), a);
    add_common(app.add_subcommand("verify", "orbit residual diagnostics"), a);
    add_common(app.add_subcommand("spectrum", "lowest eigenpairs and verdict"), a);
    add_common(app.add_subcommand("coercivity", "Corollary-style constants and checks"), a);
    add_common(app.add_subcommand("certify", "full pipeline, single report"), a);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return dispatch(app, a);
    } catch (const kf::DegenerateSegment& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const kf::BlockedByWell& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const kf::LeftSegment& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const kf::BudgetExceeded& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const kf::NonConvergence& e) {
        std::cerr << e.what() << "\n";
        return 4;
    } catch (const kf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

#include "regroup/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "regroup/conjugacy.hpp"
#include "regroup/errors.hpp"
#include "regroup/funcspec.hpp"
#include "regroup/group_rebuild.hpp"
#include "regroup/orbit3.hpp"
#include "regroup/qexact.hpp"
#include "regroup/tricolor.hpp"

namespace regroup::cli {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string expression;
    std::string expression_file;
    bool assume = false;
    std::vector<double> grid_range;  // empty: per-command default
    std::size_t grid_points = 10000;
    double tol = kDefaultLawTol;
    std::size_t samples = 1000;
    std::size_t triples = 100;
    std::size_t color_samples = 10000;
    std::uint64_t seed = kDefaultSeed;
    std::vector<double> range;
    std::vector<double> sample_range{-20.0, 20.0};
    std::string out_path;
    std::string format = "json";
    int depth = 4;
    int max_period = 8;
    int n = 1000;
    std::vector<double> eps{0.01};
    std::vector<double> start{1.0, 0.0, 0.0};
};

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const SyntaxError*>(&e)) return "SyntaxError";
    if (dynamic_cast<const UnknownIdentifier*>(&e)) return "UnknownIdentifier";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const Overflow*>(&e)) return "Overflow";
    if (dynamic_cast<const NotMonotone*>(&e)) return "NotMonotone";
    if (dynamic_cast<const FixedPointDetected*>(&e)) return "FixedPointDetected";
    if (dynamic_cast<const NotFixedPointFree*>(&e)) return "NotFixedPointFree";
    if (dynamic_cast<const BracketFailure*>(&e)) return "BracketFailure";
    if (dynamic_cast<const LadderCapExceeded*>(&e)) return "LadderCapExceeded";
    if (dynamic_cast<const DepthCapExceeded*>(&e)) return "DepthCapExceeded";
    if (dynamic_cast<const ConstructionFailure*>(&e)) return "ConstructionFailure";
    return "Error";
}

json error_json(const std::exception& e) {
    json j{{"kind", error_kind(e)}, {"message", e.what()}};
    if (auto* fp = dynamic_cast<const FixedPointDetected*>(&e)) j["at"] = fp->at();
    if (auto* nm = dynamic_cast<const NotMonotone*>(&e)) j["at"] = nm->at();
    if (auto* nf = dynamic_cast<const NotFixedPointFree*>(&e)) j["at"] = nf->at();
    if (auto* se = dynamic_cast<const SyntaxError*>(&e)) j["offset"] = se->offset();
    return j;
}

// Writes `text` to --out if given, otherwise to `out`.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(cfg.out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file " + cfg.out_path);
    file << text;
}

std::vector<std::string> expressions(const RunConfig& cfg) {
    std::vector<std::string> exprs;
    if (!cfg.expression.empty()) exprs.push_back(cfg.expression);
    if (!cfg.expression_file.empty()) {
        std::ifstream in(cfg.expression_file);
        if (!in) throw std::runtime_error("cannot read " + cfg.expression_file);
        std::string line;
        while (std::getline(in, line)) {
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') continue;
            line.erase(line.find_last_not_of(" \t\r") + 1);
            exprs.push_back(line.substr(first));
        }
    }
    if (exprs.empty()) throw std::runtime_error("no expression given (use --f or --f-file)");
    return exprs;
}

// `fallback` is the grid used without --grid. rebuild and tricolor certify on
// their own sampling range: in double precision x + exp(x) equals x below
// about -37, so the wider default grid would report a fixed point there.
MonotoneMap1D certify(const RunConfig& cfg, const ExprAst& ast,
                      std::vector<double> fallback = {-100.0, 100.0}) {
    if (cfg.assume) return assume_certified(ast);
    const auto& range = cfg.grid_range.empty() ? fallback : cfg.grid_range;
    GridSpec grid;
    grid.lo = range.at(0);
    grid.hi = range.at(1);
    grid.points = cfg.grid_points;
    return certify_map(ast, grid);
}

SampleRange sample_range(const std::vector<double>& r) { return {r.at(0), r.at(1)}; }

json rng_json(const RunConfig& cfg) { return json{{"generator", "mt19937_64"}, {"seed", cfg.seed}}; }

// --- certify ------------------------------------------------------------

int cmd_certify(const RunConfig& cfg, std::ostream& out) {
    json reports = json::array();
    int code = kExitPass;
    for (const auto& text : expressions(cfg)) {
        json r{{"expression", text}};
        try {
            auto f = certify(cfg, parse_expr(text));
            r["certification"] = f.report();
            r["pass"] = true;
        } catch (const Error& e) {
            r["error"] = error_json(e);
            r["pass"] = false;
            code = std::max(code, kExitInputError);
        }
        reports.push_back(std::move(r));
    }
    emit(cfg, out, (reports.size() == 1 ? reports[0] : reports).dump(2) + "\n");
    return code;
}

// --- rebuild ------------------------------------------------------------

std::pair<json, int> rebuild_one(const RunConfig& cfg, const std::string& text) {
    json r{{"expression", text}};
    const auto sampling = cfg.range.empty() ? std::vector<double>{-20.0, 20.0} : cfg.range;
    std::optional<MonotoneMap1D> f;
    try {
        f = certify(cfg, parse_expr(text), sampling);
    } catch (const Error& e) {
        r["error"] = error_json(e);
        r["pass"] = false;
        return {r, kExitInputError};
    }
    r["certification"] = f->report();
    try {
        auto g = std::make_shared<const ConjugacyMap>(*f);
        RebuiltGroup G(g);
        const auto range = sample_range(sampling);
        auto shift = verify_shift(G, cfg.samples, cfg.tol, cfg.seed, range);
        auto axioms = verify_axioms(G, cfg.triples, cfg.tol, cfg.seed, range);
        bool pass = shift.pass &&
                    std::all_of(axioms.begin(), axioms.end(), [](const auto& a) { return a.pass; });
        r["conjugacy"] = {{"order_reversing", g->order_reversing()}, {"unit", g->unit()}};
        r["shift_element"] = G.shift_element();
        r["rng"] = rng_json(cfg);
        r["sample_range"] = {range.lo, range.hi};
        r["shift"] = shift;
        r["axioms"] = axioms;
        r["pass"] = pass;
        return {r, pass ? kExitPass : kExitVerifyFailed};
    } catch (const Error& e) {
        r["error"] = error_json(e);
        r["pass"] = false;
        return {r, kExitVerifyFailed};
    }
}

int cmd_rebuild(const RunConfig& cfg, std::ostream& out) {
    json reports = json::array();
    int code = kExitPass;
    for (const auto& text : expressions(cfg)) {
        auto [r, c] = rebuild_one(cfg, text);
        reports.push_back(std::move(r));
        code = std::max(code, c);
    }
    emit(cfg, out, (reports.size() == 1 ? reports[0] : reports).dump(2) + "\n");
    return code;
}

// --- tricolor -----------------------------------------------------------

int cmd_tricolor(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto exprs = expressions(cfg);
    if (exprs.size() != 1) throw std::runtime_error("tricolor takes exactly one expression");
    const auto& text = exprs.front();
    json r{{"expression", text}};
    std::optional<MonotoneMap1D> f;
    try {
        f = certify(cfg, parse_expr(text), cfg.sample_range);
    } catch (const Error& e) {
        r["error"] = error_json(e);
        r["pass"] = false;
        emit(cfg, out, r.dump(2) + "\n");
        return kExitInputError;
    }
    r["certification"] = f->report();

    int code = kExitPass;
    std::vector<ColoredBlock> blocks;
    try {
        ColoringScheme scheme(std::make_shared<const ConjugacyMap>(*f));
        const auto block_range = cfg.range.empty() ? std::vector<double>{-12.0, 12.0} : cfg.range;
        blocks = scheme.emit_blocks(block_range.at(0), block_range.at(1));
        auto report = verify_coloring(scheme, cfg.color_samples, cfg.seed, sample_range(cfg.sample_range));
        r["block_range"] = block_range;
        r["rng"] = rng_json(cfg);
        r["sample_range"] = cfg.sample_range;
        r["coloring"] = report;
        r["pass"] = report.pass;
        if (!report.pass) code = kExitVerifyFailed;
    } catch (const Error& e) {
        r["error"] = error_json(e);
        r["pass"] = false;
        code = kExitVerifyFailed;
    }

    if (cfg.format == "csv") {
        std::ostringstream csv;
        write_blocks_csv(csv, blocks);
        emit(cfg, out, csv.str());
        (cfg.out_path.empty() ? err : out) << r.dump(2) << "\n";
    } else {
        r["blocks"] = blocks;
        emit(cfg, out, r.dump(2) + "\n");
    }
    return code;
}

// --- qexample -----------------------------------------------------------

int cmd_qexample(const RunConfig& cfg, std::ostream& out) {
    json r{{"depth", cfg.depth}};
    std::optional<ExampleMap> built;
    try {
        built = build_example(cfg.depth);
    } catch (const Error& e) {
        r["error"] = error_json(e);
        r["pass"] = false;
        emit(cfg, out, r.dump(2) + "\n");
        return kExitInputError;
    }
    const ExampleMap& m = *built;
    bool pass = true;
    const bool disjoint = check_domains_disjoint(m);
    pass = pass && disjoint;
    json levels = json::array();
    json witnesses = json::array();
    for (int n = 1; n < m.depth; ++n) {
        auto p = check_P123(m, n);
        auto w = star_witness(m, n);
        pass = pass && p.pass() && w.certified();
        levels.push_back(p);
        witnesses.push_back(w);
    }
    auto scan = no_periodic_scan(m, cfg.max_period);
    pass = pass && scan.pass();
    r["domains_disjoint"] = disjoint;
    r["P123"] = levels;
    r["star_witnesses"] = witnesses;
    r["periodic_scan"] = scan;
    r["map"] = m;
    r["pass"] = pass;
    emit(cfg, out, r.dump(2) + "\n");
    return pass ? kExitPass : kExitVerifyFailed;
}

// --- orbit3 -------------------------------------------------------------

int cmd_orbit3(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.n < 2) throw std::runtime_error("--n must be at least 2");
    const Vec3 start{cfg.start.at(0), cfg.start.at(1), cfg.start.at(2)};
    const auto pts = orbit(start, cfg.n);
    auto report = obstruction_report(cfg.n, cfg.eps, start);
    json r = report;
    if (cfg.format == "csv") {
        std::ostringstream csv;
        write_orbit_csv(csv, pts);
        emit(cfg, out, csv.str());
        (cfg.out_path.empty() ? err : out) << r.dump(2) << "\n";
    } else {
        json orbit_json = json::array();
        for (const auto& p : pts) orbit_json.push_back({p.x, p.y, p.z});
        r["orbit"] = orbit_json;
        emit(cfg, out, r.dump(2) + "\n");
    }
    return kExitPass;
}

void add_map_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--f", cfg.expression, "Map f(x), e.g. \"x + exp(x)\"");
    sub->add_option("--f-file", cfg.expression_file, "File with one expression per line");
    sub->add_flag("--assume-certified", cfg.assume,
                  "Skip the grid scan; take the displacement sign from f(0)");
    sub->add_option("--grid", cfg.grid_range, "Certification grid lo hi")->expected(2);
    sub->add_option("--grid-points", cfg.grid_points, "Certification grid size");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Rebuild group structures that turn fixed-point free maps into shifts"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto* certify_cmd = app.add_subcommand("certify", "Sample-based certification of f");
    add_map_options(certify_cmd, cfg);
    certify_cmd->add_option("--out", cfg.out_path);

    auto* rebuild = app.add_subcommand("rebuild", "Build g and the transported group; verify laws");
    add_map_options(rebuild, cfg);
    rebuild->add_option("--samples", cfg.samples, "Shift-law samples");
    rebuild->add_option("--triples", cfg.triples, "Axiom triples");
    rebuild->add_option("--tol", cfg.tol, "Deviation tolerance");
    rebuild->add_option("--seed", cfg.seed);
    rebuild->add_option("--range", cfg.range, "Sampling range lo hi")->expected(2);
    rebuild->add_option("--out", cfg.out_path);

    auto* tricolor = app.add_subcommand("tricolor", "Three-coloring with color(f(x)) != color(x)");
    add_map_options(tricolor, cfg);
    tricolor->add_option("--range", cfg.range, "Block range lo hi")->expected(2);
    tricolor->add_option("--sample-range", cfg.sample_range, "Verification range lo hi")
        ->expected(2);
    tricolor->add_option("--samples", cfg.color_samples);
    tricolor->add_option("--seed", cfg.seed);
    tricolor->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
    tricolor->add_option("--out", cfg.out_path);

    auto* qexample = app.add_subcommand("qexample", "Exact non-shift example on Q");
    qexample->add_option("--depth", cfg.depth);
    qexample->add_option("--max-period", cfg.max_period);
    qexample->add_option("--out", cfg.out_path);

    auto* orbit3 = app.add_subcommand("orbit3", "Orbit of the rotation/slide map of R^3");
    orbit3->add_option("--n", cfg.n, "Orbit length");
    orbit3->add_option("--eps", cfg.eps, "Cluster thresholds");
    orbit3->add_option("--start", cfg.start, "Start point x y z")->expected(3);
    orbit3->add_option("--format", cfg.format)->check(CLI::IsMember({"json", "csv"}));
    orbit3->add_option("--out", cfg.out_path);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitInputError;
    }

    try {
        if (certify_cmd->parsed()) return cmd_certify(cfg, out);
        if (rebuild->parsed()) return cmd_rebuild(cfg, out);
        if (tricolor->parsed()) return cmd_tricolor(cfg, out, err);
        if (qexample->parsed()) return cmd_qexample(cfg, out);
        if (orbit3->parsed()) return cmd_orbit3(cfg, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace regroup::cli

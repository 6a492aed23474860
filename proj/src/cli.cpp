#include "vmcoal/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "vmcoal/compositions.hpp"
#include "vmcoal/inversion.hpp"
#include "vmcoal/kinetics.hpp"
#include "vmcoal/linalg.hpp"
#include "vmcoal/mst.hpp"
#include "vmcoal/simulator.hpp"
#include "vmcoal/threads.hpp"
#include "vmcoal/trees.hpp"
#include "vmcoal/validate.hpp"

namespace vmcoal {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt7(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.7g", x);
    return buf;
}

// Human-friendly: integral values keep one decimal ("1.0"), others ten digits.
// Near-integers within 1e-12 relative display as the integer; the relative
// test keeps genuinely tiny values out of the zero bucket.
std::string fmt_value(double x) {
    char buf[64];
    const double nearest = std::round(x);
    const bool integral = std::isfinite(x) && std::abs(x) < 1e15 &&
                          (x == nearest || std::abs(x - nearest) <= 1e-12 * std::abs(x));
    if (integral)
        std::snprintf(buf, sizeof buf, "%.1f", nearest);
    else
        std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw validation_error(std::string(what) + ": bad number '" + item + "'");
        }
    }
    if (out.empty()) throw validation_error(std::string(what) + ": empty list");
    return out;
}

Matrix parse_matrix_text(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_number_list(row, "V"));
    const int k = static_cast<int>(rows.size());
    Matrix m(k, k);
    for (int i = 0; i < k; ++i) {
        if (static_cast<int>(rows[i].size()) != k)
            throw validation_error("V: expected a square matrix (rows split by ';')");
        for (int j = 0; j < k; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Vector to_vector(const std::vector<double>& vals) {
    Vector v(static_cast<int>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    return v;
}

// Config file plus inline overrides; inline flags always win.
struct Inputs {
    json cfg = json::object();
    std::string v_text, alpha_text, z_text, x_text;
    std::string t_grid_text;
    double t = std::numeric_limits<double>::quiet_NaN();

    void load_config(const std::string& path) {
        if (path.empty()) return;
        std::ifstream is(path);
        if (!is) throw validation_error("cannot open config file: " + path);
        try {
            is >> cfg;
        } catch (const json::exception& e) {
            throw validation_error(std::string("config parse: ") + e.what());
        }
        if (!cfg.is_object()) throw validation_error("config: top level must be an object");
    }

    Matrix matrix() const {
        if (!v_text.empty()) return parse_matrix_text(v_text);
        if (!cfg.contains("V")) throw validation_error("missing weight matrix (--V or config V)");
        const json& jv = cfg["V"];
        if (!jv.is_array() || jv.empty())
            throw validation_error("config V: expected array of arrays");
        const int k = static_cast<int>(jv.size());
        Matrix m(k, k);
        for (int i = 0; i < k; ++i) {
            if (!jv[i].is_array() || static_cast<int>(jv[i].size()) != k)
                throw validation_error("config V: row " + std::to_string(i) + " is not length " +
                                       std::to_string(k));
            for (int j = 0; j < k; ++j) {
                if (!jv[i][j].is_number())
                    throw validation_error("config V: non-numeric entry");
                m(i, j) = jv[i][j].get<double>();
            }
        }
        return m;
    }

    Vector vector_field(const std::string& inline_text, const char* key, int k) const {
        std::vector<double> vals;
        if (!inline_text.empty()) {
            vals = parse_number_list(inline_text, key);
        } else if (cfg.contains(key)) {
            const json& ja = cfg[key];
            if (!ja.is_array()) throw validation_error(std::string("config ") + key + ": expected array");
            for (const json& x : ja) {
                if (!x.is_number())
                    throw validation_error(std::string("config ") + key + ": non-numeric entry");
                vals.push_back(x.get<double>());
            }
        } else {
            throw validation_error(std::string("missing ") + key + " (--" + key + " or config " +
                                   key + ")");
        }
        if (static_cast<int>(vals.size()) != k)
            throw validation_error(std::string(key) + ": expected " + std::to_string(k) +
                                   " entries, got " + std::to_string(vals.size()));
        return to_vector(vals);
    }

    Composition composition(int k) const {
        std::string key = x_text;
        if (key.empty() && cfg.contains("x")) {
            if (cfg["x"].is_string()) {
                key = cfg["x"].get<std::string>();
            } else if (cfg["x"].is_array()) {
                std::vector<int> parts;
                for (const json& e : cfg["x"]) parts.push_back(e.get<int>());
                Composition c(parts);
                if (c.dim() != k) throw validation_error("x: dimension mismatch with V");
                return c;
            }
        }
        if (key.empty()) throw validation_error("missing composition (--x or config x)");
        Composition c = Composition::parse(key);
        if (c.dim() != k) throw validation_error("x: dimension mismatch with V");
        return c;
    }

    std::vector<double> time_grid(bool required) const {
        std::vector<double> grid;
        if (!t_grid_text.empty()) {
            grid = parse_number_list(t_grid_text, "t-grid");
        } else if (cfg.contains("t_grid")) {
            for (const json& e : cfg["t_grid"]) grid.push_back(e.get<double>());
        } else if (t == t) {
            grid.push_back(t);
        } else if (cfg.contains("t")) {
            grid.push_back(cfg["t"].get<double>());
        }
        if (grid.empty() && required)
            throw validation_error("missing time points (--t, --t-grid, or config t/t_grid)");
        return grid;
    }

    double time_point() const {
        if (t == t) return t;
        if (cfg.contains("t")) return cfg["t"].get<double>();
        throw validation_error("missing time (--t or config t)");
    }

    long integer_field(const char* key, long inline_val, long fallback) const {
        if (inline_val >= 0) return inline_val;
        if (cfg.contains(key)) return cfg[key].get<long>();
        return fallback;
    }

    double number_field(const char* key, double inline_val, double fallback) const {
        if (inline_val == inline_val) return inline_val;
        if (cfg.contains(key)) return cfg[key].get<double>();
        return fallback;
    }
};

struct Artifact {
    std::string path;
    std::string format = "csv";  // csv | json

    bool wanted() const { return !path.empty(); }

    void write(const std::string& csv_body, const json& j) const {
        if (!wanted()) return;
        std::ofstream os(path, std::ios::binary);
        if (!os) throw validation_error("cannot open output path: " + path);
        if (format == "json")
            os << j.dump(2) << '\n';
        else
            os << csv_body;
    }
};

std::string region_name(Region r) { return to_string(r); }

// ----------------------------------------------------------- subcommands ----

int cmd_invert(const Inputs& in, const Artifact& art, std::ostream& out) {
    const WeightMatrix v(in.matrix());
    const Vector z = in.vector_field(in.z_text, "z", v.dim());
    const InversionResult res = invert_minimal(v, z);

    std::string ytxt;
    for (int i = 0; i < res.y.size(); ++i) ytxt += (i ? ", " : "") + fmt7(res.y[i]);
    if (res.y.size() > 1) ytxt = "(" + ytxt + ")";
    out << "y ≈ " << ytxt << ", region=" << region_name(res.region_of_input) << '\n';
    out << "method: " << to_string(res.method) << "  iterations: " << res.iterations
        << "  residual: " << fmt7(res.residual) << '\n';

    std::string csv = "component,y\r\n";
    json jy = json::array();
    for (int i = 0; i < res.y.size(); ++i) {
        csv += std::to_string(i) + "," + fmt17(res.y[i]) + "\r\n";
        jy.push_back(res.y[i]);
    }
    art.write(csv, json{{"y", jy},
                        {"region", region_name(res.region_of_input)},
                        {"method", to_string(res.method)},
                        {"iterations", res.iterations},
                        {"residual", res.residual}});
    return 0;
}

int cmd_curve(const Inputs& in, const Artifact& art, std::ostream& out) {
    const WeightMatrix v(in.matrix());
    const Vector alpha = in.vector_field(in.alpha_text, "alpha", v.dim());
    const std::vector<double> grid = in.time_grid(true);

    std::string csv = "t";
    for (int i = 0; i < v.dim(); ++i) csv += ",y" + std::to_string(i + 1);
    csv += "\r\n";
    json rows = json::array();
    out << "t -> y(t)\n";
    for (double t : grid) {
        const Vector y = minimal_curve(v, alpha, t);
        out << fmt7(t) << " ->";
        csv += fmt17(t);
        json jy = json::array();
        for (int i = 0; i < y.size(); ++i) {
            out << ' ' << fmt7(y[i]);
            csv += "," + fmt17(y[i]);
            jy.push_back(y[i]);
        }
        out << '\n';
        csv += "\r\n";
        rows.push_back(json{{"t", t}, {"y", jy}});
    }
    art.write(csv, rows);
    return 0;
}

int cmd_trees(const Inputs& in, const Artifact& art, std::ostream& out) {
    const WeightMatrix v(in.matrix());
    const Composition x = in.composition(v.dim());

    struct Row {
        const char* name;
        TreeEnumeratorReport rep;
    };
    std::vector<Row> rows;
    rows.push_back({"cofactor", enumerator_cofactor(v, x)});
    rows.push_back({"rank-one", enumerator_rank_one(v, x)});
    rows.push_back({"closed-form", enumerator_closed(v, x)});
    if (x.total() <= 9) rows.push_back({"brute-force", enumerator_brute_force(v, x)});

    out << "method        value\n";
    for (const Row& r : rows)
        out << r.name << std::string(14 - std::string(r.name).size(), ' ')
            << fmt_value(r.rep.value) << '\n';
    if (v.integer_valued() && x.total() <= 12) {
        out << "T = " << to_string(tree_count_exact(v, x)) << '\n';
    } else {
        out << "T = " << fmt_value(rows[0].rep.value) << '\n';
    }

    std::string csv = "method,value,log_value\r\n";
    json jrows = json::array();
    for (const Row& r : rows) {
        csv += std::string(r.name) + "," + fmt17(r.rep.value) + "," + fmt17(r.rep.value_log) +
               "\r\n";
        jrows.push_back(
            json{{"method", r.name}, {"value", r.rep.value}, {"log_value", r.rep.value_log}});
    }
    art.write(csv, jrows);
    return 0;
}

int cmd_zeta(const Inputs& in, const Artifact& art, std::ostream& out) {
    const WeightMatrix v(in.matrix());
    const Vector alpha = in.vector_field(in.alpha_text, "alpha", v.dim());
    const Composition x = in.composition(v.dim());
    const std::vector<double> grid = in.time_grid(true);

    std::string csv = "t,zeta\r\n";
    json rows = json::array();
    for (double t : grid) {
        const double z = zeta_closed(v, alpha, x, t);
        out << "zeta_" << x.key() << "(" << fmt7(t) << ") = " << fmt_value(z) << '\n';
        csv += fmt17(t) + "," + fmt17(z) + "\r\n";
        rows.push_back(json{{"t", t}, {"zeta", z}});
    }
    art.write(csv, rows);
    return 0;
}

int cmd_gelation(const Inputs& in, const Artifact& art, std::ostream& out) {
    const WeightMatrix v(in.matrix());
    const Vector alpha = in.vector_field(in.alpha_text, "alpha", v.dim());
    const double tg = gelation_time(v, alpha);
    out << "T_gel = " << fmt_value(tg) << '\n';
    art.write("t_gel\r\n" + fmt17(tg) + "\r\n", json{{"t_gel", tg}});
    return 0;
}

int cmd_mass(const Inputs& in, const Artifact& art, std::ostream& out) {
    const WeightMatrix v(in.matrix());
    const Vector alpha = in.vector_field(in.alpha_text, "alpha", v.dim());
    const std::vector<double> grid = in.time_grid(true);

    std::string csv = "t";
    for (int i = 0; i < v.dim(); ++i) csv += ",m" + std::to_string(i + 1);
    csv += "\r\n";
    json rows = json::array();
    for (double t : grid) {
        const Vector m = total_mass(v, alpha, t);
        out << "mass(" << fmt7(t) << ") =";
        csv += fmt17(t);
        json jm = json::array();
        for (int i = 0; i < m.size(); ++i) {
            out << ' ' << fmt7(m[i]);
            csv += "," + fmt17(m[i]);
            jm.push_back(m[i]);
        }
        out << '\n';
        csv += "\r\n";
        rows.push_back(json{{"t", t}, {"mass", jm}});
    }
    art.write(csv, rows);
    return 0;
}

int cmd_moments(const Inputs& in, const Artifact& art, std::ostream& out) {
    const WeightMatrix v(in.matrix());
    const Vector alpha = in.vector_field(in.alpha_text, "alpha", v.dim());
    const double t = in.time_point();
    const Matrix a = second_moments(v, alpha, t);

    out << "A(" << fmt7(t) << "):\n";
    std::string csv = "i,j,value\r\n";
    json jrows = json::array();
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) {
            out << (j ? " " : "") << fmt7(a(i, j));
            csv += std::to_string(i) + "," + std::to_string(j) + "," + fmt17(a(i, j)) + "\r\n";
            jrows.push_back(json{{"i", i}, {"j", j}, {"value", a(i, j)}});
        }
        out << '\n';
    }
    art.write(csv, jrows);
    return 0;
}

int cmd_simulate(const Inputs& in, const Artifact& art, std::ostream& out, std::uint64_t seed) {
    SimConfig cfg{WeightMatrix(in.matrix()), Vector(), 0, 0.0, seed, {}};
    cfg.alpha = in.vector_field(in.alpha_text, "alpha", cfg.v.dim());
    cfg.n = in.integer_field("n", -1, 1000);
    cfg.t_max = in.number_field("t_max", std::numeric_limits<double>::quiet_NaN(), 1.0);
    cfg.record_times = in.time_grid(false);
    if (cfg.record_times.empty()) cfg.record_times.push_back(cfg.t_max);

    const SimTrajectory traj = simulate(cfg);
    out << "n = " << traj.n << "  events = " << traj.events
        << "  final_time = " << fmt7(traj.final_time) << '\n';
    long final_clusters = traj.snapshots.empty() ? -1 : traj.snapshots.back().state.clusters();
    if (final_clusters >= 0)
        out << "clusters at last record: " << final_clusters << '\n';

    std::string csv = "t,composition,count\r\n";
    json jrows = json::array();
    for (const Snapshot& snap : traj.snapshots) {
        for (const auto& [parts, count] : snap.state.counts) {
            const std::string key = Composition(parts).key();
            csv += fmt17(snap.t) + "," + key + "," + std::to_string(count) + "\r\n";
            jrows.push_back(json{{"t", snap.t}, {"composition", key}, {"count", count}});
        }
    }
    art.write(csv, jrows);
    return 0;
}

int cmd_mst_series(const Inputs& in, const Artifact& art, std::ostream& out, double tol,
                   int threads) {
    const WeightMatrix v(in.matrix());
    const Vector alpha = in.vector_field(in.alpha_text, "alpha", v.dim());
    const long n_max = in.integer_field("n_max", -1, 200);
    const double tail_tol = in.number_field("tail_tol", tol, 1e-6);

    const MstSeriesReport rep = mst_series(v, alpha, static_cast<int>(n_max), tail_tol, threads);
    out << "partial_sum = " << fmt_value(rep.partial_sum) << '\n'
        << "largest size = " << rep.n_max << "  last shell = " << fmt7(rep.last_shell)
        << (rep.tail_flag ? "  (tail below tolerance)" : "  (tail cap reached)") << '\n';

    std::string csv = "n,partial_sum,shell\r\n";
    json jrows = json::array();
    double acc = 0.0;
    for (size_t i = 0; i < rep.shell_sums.size(); ++i) {
        acc += rep.shell_sums[i];
        csv += std::to_string(i + 1) + "," + fmt17(acc) + "," + fmt17(rep.shell_sums[i]) + "\r\n";
        jrows.push_back(
            json{{"n", i + 1}, {"partial_sum", acc}, {"shell", rep.shell_sums[i]}});
    }
    art.write(csv, jrows);
    return 0;
}

int cmd_mst_mc(const Inputs& in, const Artifact& art, std::ostream& out, std::uint64_t seed,
               int threads) {
    const WeightMatrix v(in.matrix());
    const Vector alpha = in.vector_field(in.alpha_text, "alpha", v.dim());
    const long n = in.integer_field("n", -1, 300);
    const long replicas = in.integer_field("replicas", -1, 200);

    const MstMonteCarlo mc =
        mst_monte_carlo(v, alpha, n, static_cast<int>(replicas), seed, threads);
    out << "mean = " << fmt_value(mc.mean) << " +- " << fmt7(mc.se) << " (s.e., " << replicas
        << " replicas)\n";

    std::string csv = "replica,length\r\n";
    json jrows = json::array();
    for (size_t r = 0; r < mc.lengths.size(); ++r) {
        csv += std::to_string(r) + "," + fmt17(mc.lengths[r]) + "\r\n";
        jrows.push_back(json{{"replica", r}, {"length", mc.lengths[r]}});
    }
    art.write(csv, jrows);
    return 0;
}

int cmd_validate(const std::string& suite, const Artifact& art, std::ostream& out,
                 const ValidateOptions& opts) {
    const std::vector<SuiteResult> results = validate_suites(suite, opts);
    bool all_pass = true;
    for (const SuiteResult& r : results) {
        for (const CheckResult& c : r.checks) {
            all_pass = all_pass && c.pass;
            out << (c.pass ? "[PASS] " : "[FAIL] ") << r.suite << '/' << c.name
                << "  measured=" << fmt7(c.measured) << " limit=" << fmt7(c.limit);
            if (!c.detail.empty()) out << "  (" << c.detail << ')';
            out << '\n';
        }
    }
    out << (all_pass ? "all checks passed\n" : "CHECK FAILURES PRESENT\n");

    std::ostringstream csv;
    csv << "suite,check,measured,limit,pass,detail\r\n";
    json jrows = json::array();
    for (const SuiteResult& r : results) {
        write_suite_csv(r, csv);
        for (const CheckResult& c : r.checks)
            jrows.push_back(json{{"suite", r.suite},
                                 {"check", c.name},
                                 {"measured", c.measured},
                                 {"limit", c.limit},
                                 {"pass", c.pass},
                                 {"detail", c.detail}});
    }
    art.write(csv.str(), jrows);
    return all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"vector-multiplicative coalescent toolkit"};
    app.require_subcommand(1);

    Inputs in;
    Artifact art;
    std::string config_path;
    std::uint64_t seed = 1;
    int threads = 0;
    double tol = std::numeric_limits<double>::quiet_NaN();
    std::string suite = "all";

    const auto add_common = [&](CLI::App* sub, bool wants_alpha) {
        sub->add_option("--config", config_path, "JSON config file");
        sub->add_option("--out", art.path, "artifact output path");
        sub->add_option("--format", art.format, "artifact format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--threads", threads, "worker threads (0 = machine default)");
        sub->add_option("--tol", tol, "primary tolerance of the subcommand");
        sub->add_option("--V", in.v_text, "weight matrix, rows ';', entries ','");
        if (wants_alpha) sub->add_option("--alpha", in.alpha_text, "initial type densities");
    };

    CLI::App* c_invert = app.add_subcommand("invert", "componentwise-minimal inverse at z");
    add_common(c_invert, false);
    c_invert->add_option("--z", in.z_text, "evaluation point");

    CLI::App* c_curve = app.add_subcommand("curve", "minimal solution along t alpha");
    add_common(c_curve, true);
    c_curve->add_option("--t-grid", in.t_grid_text, "comma-separated times");
    c_curve->add_option("--t", in.t, "single time");

    CLI::App* c_trees = app.add_subcommand("trees", "weighted spanning-tree enumerator");
    add_common(c_trees, false);
    c_trees->add_option("--x", in.x_text, "composition, e.g. 2:2");

    CLI::App* c_zeta = app.add_subcommand("zeta", "cluster density zeta_x(t)");
    add_common(c_zeta, true);
    c_zeta->add_option("--x", in.x_text, "composition");
    c_zeta->add_option("--t-grid", in.t_grid_text, "comma-separated times");
    c_zeta->add_option("--t", in.t, "single time");

    CLI::App* c_gel = app.add_subcommand("gelation", "gelation time 1/rho(V D[alpha])");
    add_common(c_gel, true);

    CLI::App* c_mass = app.add_subcommand("mass", "total mass vector y(t)/t");
    add_common(c_mass, true);
    c_mass->add_option("--t-grid", in.t_grid_text, "comma-separated times");
    c_mass->add_option("--t", in.t, "single time");

    CLI::App* c_mom = app.add_subcommand("moments", "second-moment matrix A(t)");
    add_common(c_mom, true);
    c_mom->add_option("--t", in.t, "time (must be below the gelation time)");

    long sim_n = -1;
    double sim_tmax = std::numeric_limits<double>::quiet_NaN();
    CLI::App* c_sim = app.add_subcommand("simulate", "stochastic merge trajectory");
    add_common(c_sim, true);
    c_sim->add_option("--n", sim_n, "scale (initial counts are alpha_i n)");
    c_sim->add_option("--t-max", sim_tmax, "simulation horizon");
    c_sim->add_option("--t-grid", in.t_grid_text, "record times");

    long series_nmax = -1;
    CLI::App* c_series = app.add_subcommand("mst-series", "limit spanning-tree length series");
    add_common(c_series, true);
    c_series->add_option("--n-max", series_nmax, "largest shell size");

    long mc_n = -1, mc_replicas = -1;
    CLI::App* c_mc = app.add_subcommand("mst-mc", "Monte-Carlo spanning-tree length");
    add_common(c_mc, true);
    c_mc->add_option("--n", mc_n, "scale (vertices per type are alpha_i n)");
    c_mc->add_option("--replicas", mc_replicas, "Monte-Carlo replicas");

    CLI::App* c_val = app.add_subcommand("validate", "property suites");
    add_common(c_val, false);
    c_val->add_option("suite", suite, "trees|inversion|kinetics|simulator|mst|all");

    std::vector<const char*> argv;
    argv.push_back("vmcoal");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 64;
    }

    try {
        in.load_config(config_path);
        // Config may carry shared scalars too; flags keep precedence.
        if (in.cfg.contains("seed") && c_val->count("--seed") == 0 &&
            c_sim->count("--seed") == 0 && c_mc->count("--seed") == 0)
            seed = in.cfg["seed"].get<std::uint64_t>();
        if (sim_n >= 0) in.cfg["n"] = sim_n;
        if (mc_n >= 0) in.cfg["n"] = mc_n;
        if (mc_replicas >= 0) in.cfg["replicas"] = mc_replicas;
        if (series_nmax >= 0) in.cfg["n_max"] = series_nmax;
        if (sim_tmax == sim_tmax) in.cfg["t_max"] = sim_tmax;

        const int nthreads = resolve_threads(threads);
        if (c_invert->parsed()) return cmd_invert(in, art, out);
        if (c_curve->parsed()) return cmd_curve(in, art, out);
        if (c_trees->parsed()) return cmd_trees(in, art, out);
        if (c_zeta->parsed()) return cmd_zeta(in, art, out);
        if (c_gel->parsed()) return cmd_gelation(in, art, out);
        if (c_mass->parsed()) return cmd_mass(in, art, out);
        if (c_mom->parsed()) return cmd_moments(in, art, out);
        if (c_sim->parsed()) return cmd_simulate(in, art, out, seed);
        if (c_series->parsed()) return cmd_mst_series(in, art, out, tol, nthreads);
        if (c_mc->parsed()) return cmd_mst_mc(in, art, out, seed, nthreads);
        if (c_val->parsed()) {
            ValidateOptions vopts;
            if (c_val->count("--seed")) vopts.seed = seed;
            else if (in.cfg.contains("seed")) vopts.seed = seed;
            vopts.threads = nthreads;
            return cmd_validate(suite, art, out, vopts);
        }
        err << "no subcommand selected\n";
        return 64;
    } catch (const validation_error& e) {
        err << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const convergence_error& e) {
        err << "convergence error: " << e.what() << '\n';
        return 3;
    } catch (const json::exception& e) {
        err << "validation error: config: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace vmcoal

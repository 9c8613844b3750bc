#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include <luzin/experiment.hpp>

namespace fs = std::filesystem;
using namespace luzin;

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw Error(Errc::invalid_input, "cannot open config " + path);
    return json::parse(in);
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << s;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

void write_run_outputs(const fs::path& dir, const RunReport& r) {
    write_json(dir / "report.json", r.report);
    std::ostringstream tails, env;
    write_tails_csv(tails, r.tails);
    write_envelope_csv(env, r.envelope);
    write_text(dir / "tails.csv", tails.str());
    write_text(dir / "envelope.csv", env.str());
    write_json(dir / "emask.rle.json", r.E ? rle_encode(*r.E) : json{{"available", false}});
}

// "m" sets eps = delta = 1/m; anything else is a dotted path into the config.
json apply_sweep_value(json cfg, const std::string& param, const json& v) {
    if (param == "m") {
        const double p = 1.0 / v.get<double>();
        cfg["eps"] = p;
        cfg["delta"] = p;
        return cfg;
    }
    std::string ptr = "/" + param;
    for (auto& ch : ptr)
        if (ch == '.') ch = '/';
    cfg[json::json_pointer(ptr)] = v;
    return cfg;
}

std::string csv_number(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key) || j[key].is_null()) return "";
    std::ostringstream os;
    os.precision(17);
    os << j[key].get<double>();
    return os.str();
}

int run_sweep(const json& base, const fs::path& out, std::size_t threads) {
    const json spec = base.value("sweep", json::object());
    const std::string param = spec.value("param", "delta");
    const json values = spec.value("values", json::array());
    json cfg = base;
    cfg.erase("sweep");

    std::vector<RunReport> rows(values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t q; (q = next++) < values.size();) {
            try {
                rows[q] = run_experiment(parse_config(apply_sweep_value(cfg, param, values[q])));
            } catch (const std::exception& e) {
                rows[q].report = {{"error", {{"code", "invalid-input"}, {"message", e.what()}}}, {"pass", false}};
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < std::max<std::size_t>(1, threads); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << "row,param,value,pass,error,E_measure,f_minus_g_norm1,g_minus_Q_norm1\n";
    json out_rows = json::array();
    bool all = true;
    for (std::size_t q = 0; q < rows.size(); ++q) {
        const auto& r = rows[q].report;
        const json res = r.value("result", json::object());
        const std::string err = r.contains("error") && !r["error"].is_null() ? r["error"].value("code", "") : "";
        csv << q << ',' << param << ',' << values[q].dump() << ',' << (rows[q].pass ? 1 : 0) << ',' << err << ',' << csv_number(res, "E_measure")
            << ',' << csv_number(res, "f_minus_g_norm1") << ',' << csv_number(res, "g_minus_Q_norm1") << '\n';
        out_rows.push_back({{"row", q}, {"value", values[q]}, {"report", r}});
        all = all && rows[q].pass;
    }
    write_text(out / "sweep.csv", csv.str());
    write_json(out / "report.json", {{"verb", "sweep"}, {"param", param}, {"rows", out_rows}, {"pass", all}});
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Luzin-type correction experiments"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
    app.add_option("--config", config_path, "JSON config")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "overrides the config seed");
    app.add_option("--threads", threads, "sweep rows run concurrently")->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "run one configured pipeline");
    auto* sweep = app.add_subcommand("sweep", "run a parameter grid");
    auto* verify = app.add_subcommand("verify-systems", "gram, norm and sup-bound checks");
    auto* atom = app.add_subcommand("atom-check", "atom example inequality in rational arithmetic");
    auto* fejer = app.add_subcommand("fejer", "decay of the Fejer surrogate integral");
    for (auto* sub : {run, sweep, verify, atom, fejer}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    const auto t0 = std::chrono::steady_clock::now();
    int status = 1;
    try {
        json cfg = load_config(config_path);
        if (seed) cfg["seed"] = *seed;
        const fs::path out(out_dir);
        fs::create_directories(out);

        if (*run) {
            auto r = run_experiment(parse_config(cfg));
            r.report["verb"] = "run";
            write_run_outputs(out, r);
            if (!r.report["error"].is_null()) std::cerr << r.report["error"]["message"].get<std::string>() << "\n";
            status = r.pass ? 0 : 1;
        } else if (*sweep) {
            status = run_sweep(cfg, out, threads);
        } else if (*verify) {
            const auto c = parse_config(cfg);
            json rows = json::array();
            bool all = true;
            for (const auto& s : verify_systems(c.tol)) {
                rows.push_back(to_json(s));
                all = all && s.holds;
            }
            write_json(out / "report.json", {{"verb", "verify-systems"}, {"tolerances", to_json(c)["tolerances"]}, {"systems", rows}, {"pass", all}});
            status = all ? 0 : 1;
        } else if (*atom) {
            const long long n_max = cfg.value("N_max", 100LL);
            json rows = json::array();
            bool all = n_max >= 1;
            for (long long N = 1; N <= n_max; ++N) {
                auto a = atom_example_check(N);
                std::ostringstream l, r;
                l << a.lhs;
                r << a.rhs;
                rows.push_back({{"N", N}, {"lhs", l.str()}, {"rhs", r.str()}, {"holds", a.holds}});
                all = all && a.holds;
            }
            write_json(out / "report.json", {{"verb", "atom-check"}, {"rows", rows}, {"pass", all}});
            status = all ? 0 : 1;
        } else if (*fejer) {
            const double delta = cfg.value("delta", 0.5);
            const int j_min = cfg.value("j_min", 4), j_max = cfg.value("j_max", 12);
            const double bound = cfg.value("final_bound", 1e-3);
            const double ds = delta_star(delta);
            auto curve = fejer_curve(ds, j_min, j_max);
            std::ostringstream csv;
            csv.precision(17);
            csv << "j,lambda,abs_integral\n";
            json rows = json::array();
            for (const auto& p : curve) {
                csv << p.j << ',' << p.lambda << ',' << p.value << '\n';
                rows.push_back({{"j", p.j}, {"lambda", p.lambda}, {"abs_integral", p.value}});
            }
            write_text(out / "fejer.csv", csv.str());
            const bool ok = fejer_decays(curve, bound);
            write_json(out / "report.json", {{"verb", "fejer"}, {"delta_star", ds}, {"final_bound", bound}, {"rows", rows}, {"pass", ok}});
            status = ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        status = 2;
    }
    std::cerr << "elapsed " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
    return status;
}

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "tloc/verifier.hpp"

using namespace tloc;

namespace {

struct CommonOpts {
    int64_t p = 3;
    int f0 = 1;
    int64_t e = 2, f = 1, m = 0;
    int r = 4;
    int64_t theta_index = -1; // -1: all
    std::string cocycle = "trivial";
    uint64_t seed = 1;
    std::string format = "pretty";
    std::string cache_dir;
    int jobs = 1;
};

struct CommonBind {
    std::map<std::string, CLI::Option*> opts;
};

CommonBind add_common(CLI::App* cmd, CommonOpts& o, std::string& config_path) {
    CommonBind b;
    cmd->add_option("--config", config_path, "key=value config file");
    b.opts["p"] = cmd->add_option("--p", o.p, "odd residue prime");
    b.opts["f0"] = cmd->add_option("--f0", o.f0, "degree of the unramified base F/Q_p");
    b.opts["e"] = cmd->add_option("--e", o.e, "ramification index of K/F");
    b.opts["f"] = cmd->add_option("--f", o.f, "residue degree of K/F");
    b.opts["m"] = cmd->add_option("--m", o.m, "rho^f = delta^m twist");
    b.opts["r"] = cmd->add_option("--r", o.r, "depth parameter r >= 2");
    b.opts["theta-index"] = cmd->add_option("--theta-index", o.theta_index,
                                            "run one admissible theta (default: all)");
    b.opts["cocycle"] = cmd->add_option("--cocycle", o.cocycle, "trivial|cyclic|random")
                            ->check(CLI::IsMember({"trivial", "cyclic", "random"}));
    b.opts["seed"] = cmd->add_option("--seed", o.seed, "seed for the random cocycle");
    b.opts["format"] = cmd->add_option("--format", o.format, "json|csv|pretty")
                           ->check(CLI::IsMember({"json", "csv", "pretty"}));
    b.opts["cache-dir"] =
        cmd->add_option("--cache-dir", o.cache_dir, "directory for report artifacts");
    b.opts["jobs"] = cmd->add_option("--jobs", o.jobs, "parallelism degree");
    return b;
}

TowerParams params_of(const CommonOpts& o) {
    TowerParams par;
    par.p = o.p;
    par.f0 = o.f0;
    par.e = o.e;
    par.f = o.f;
    par.m = o.m;
    par.r = o.r;
    if (o.f == 1) par.tau_kind = TauKind::TotallyRamified;
    else if (o.f % 2 == 0) par.tau_kind = TauKind::UnramifiedOverKPlus;
    else throw InvalidParams("f odd and > 1: no valid quadratic K/K+ structure");
    return par;
}

Cocycle::Kind kind_of(const std::string& s) {
    if (s == "trivial") return Cocycle::Kind::Trivial;
    if (s == "cyclic") return Cocycle::Kind::CyclicFundamental;
    return Cocycle::Kind::RandomValid;
}

// key=value config file; flags given on the command line win
void apply_config(const std::string& path, CommonOpts& o, const CommonBind& b) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto want = [&](const std::string& key) {
        auto it = b.opts.find(key);
        return kv.count(key) && it != b.opts.end() && it->second->count() == 0;
    };
    if (want("p")) o.p = std::stoll(kv["p"]);
    if (want("f0")) o.f0 = std::stoi(kv["f0"]);
    if (want("e")) o.e = std::stoll(kv["e"]);
    if (want("f")) o.f = std::stoll(kv["f"]);
    if (want("m")) o.m = std::stoll(kv["m"]);
    if (want("r")) o.r = std::stoi(kv["r"]);
    if (want("theta-index")) o.theta_index = std::stoll(kv["theta-index"]);
    if (want("cocycle")) o.cocycle = kv["cocycle"];
    if (want("seed")) o.seed = std::stoull(kv["seed"]);
    if (want("format")) o.format = kv["format"];
    if (want("cache-dir")) o.cache_dir = kv["cache-dir"];
    if (want("jobs")) o.jobs = std::stoi(kv["jobs"]);
}

void emit(const CommonOpts& o, const std::vector<VerdictReport>& reps,
          const std::string& name) {
    std::string text;
    if (o.format == "json") text = to_json(reps, true);
    else if (o.format == "csv") text = to_csv(reps);
    else {
        std::ostringstream os;
        for (auto& r : reps) os << to_pretty(r);
        text = os.str();
    }
    std::cout << text;
    if (!o.cache_dir.empty()) {
        std::ofstream out(std::filesystem::path(o.cache_dir) / (name + ".json"));
        out << to_json(reps, true);
    }
}

std::vector<int64_t> theta_range(const CommonOpts& o, const ThetaFamily& fam) {
    if (o.theta_index >= 0) {
        if (o.theta_index >= fam.count())
            throw InvalidParams("theta index out of range");
        return {o.theta_index};
    }
    std::vector<int64_t> all(fam.count());
    for (int64_t i = 0; i < fam.count(); ++i) all[i] = i;
    return all;
}

int run_verdicts(const CommonOpts& o,
                 const std::function<VerdictReport(Verifier&, const Instance&)>& fn,
                 const std::string& name) {
    Verifier V;
    TowerParams par = params_of(o);
    const ThetaFamily& fam = V.family(par);
    std::vector<VerdictReport> reps;
    for (int64_t k : theta_range(o, fam)) {
        Instance inst{par, k, kind_of(o.cocycle), o.seed};
        reps.push_back(fn(V, inst));
    }
    emit(o, reps, name);
    for (auto& r : reps)
        if (!r.ok()) return 1;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact local-factor verification for tame towers"};
    app.require_subcommand(1);
    std::string config_path;

    CommonOpts o;

    auto* tower = app.add_subcommand("tower", "tower model commands");
    auto* tdesc = tower->add_subcommand("describe", "realize and describe a tower");
    std::map<CLI::App*, CommonBind> binds;
    binds[tdesc] = add_common(tdesc, o, config_path);

    auto* chars = app.add_subcommand("chars", "character commands");
    auto* clist = chars->add_subcommand("list", "list admissible thetas");
    binds[clist] = add_common(clist, o, config_path);

    auto* factors = app.add_subcommand("factors", "local factor computations");
    auto* fadj = factors->add_subcommand("adjoint", "adjoint factor report");
    binds[fadj] = add_common(fadj, o, config_path);

    auto* verify = app.add_subcommand("verify", "verify the local-factor identities");
    auto* vfd = verify->add_subcommand("formal-degree", "formal degree identity");
    binds[vfd] = add_common(vfd, o, config_path);
    auto* vrn = verify->add_subcommand("root-number", "root number identity");
    binds[vrn] = add_common(vrn, o, config_path);
    auto* vdec = verify->add_subcommand("decomposition", "wedge-square decomposition");
    binds[vdec] = add_common(vdec, o, config_path);

    auto* sweep = app.add_subcommand("sweep", "run the verification grid");
    CommonOpts so;
    std::vector<int64_t> sweep_q{3, 5}, sweep_n{1, 2};
    sweep->add_option("--q", sweep_q, "residue field sizes");
    sweep->add_option("--n", sweep_n, "half-degrees n");
    sweep->add_option("--r", so.r, "depth parameter");
    int64_t theta_cap = 3;
    sweep->add_option("--theta-cap", theta_cap, "deep checks per instance");
    sweep->add_option("--seed", so.seed, "random cocycle seed");
    sweep->add_option("--format", so.format, "json|csv|pretty")
        ->check(CLI::IsMember({"json", "csv", "pretty"}));
    sweep->add_option("--cache-dir", so.cache_dir, "directory for report artifacts");
    sweep->add_option("--jobs", so.jobs, "parallelism degree");

    try {
        app.parse(argc, argv);
        if (!config_path.empty())
            for (auto& [cmd, b] : binds)
                if (cmd->parsed()) apply_config(config_path, o, b);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (!o.cache_dir.empty() && !std::filesystem::is_directory(o.cache_dir)) {
            std::cerr << "error: cache dir does not exist: " << o.cache_dir << "\n";
            return 2;
        }
        if (tdesc->parsed()) {
            Verifier V;
            TowerParams par = params_of(o);
            const TowerModel& T = V.model(par);
            auto H = T.gamma().involutions();
            std::cout << par.canonical_key(T.Nw());
            std::cout << "|Gamma| = " << T.gamma().order() << ", |H| = " << H.size()
                      << ", tau = delta^" << T.tau().a << " rho^" << T.tau().b << "\n";
            std::cout << "beta valuation " << T.val(T.beta())
                      << ", supercuspidal bound "
                      << (par.supercuspidal_certified() ? "satisfied" : "not certified")
                      << "\n";
            for (auto& s : subfield_lattice(T.gamma(), T.tau()))
                std::cout << "  " << s.name << ": e(L/F)=" << s.e_LF
                          << " f(L/F)=" << s.f_LF
                          << (s.quadratic_over
                                  ? (s.ramified_KL ? "  [K/L ramified]" : "  [K/L unramified]")
                                  : "")
                          << "\n";
            return 0;
        }
        if (clist->parsed()) {
            Verifier V;
            TowerParams par = params_of(o);
            const ThetaFamily& fam = V.family(par);
            FactorEngine eng(V.model(par));
            Subfield K = V.model(par).subfield("K");
            std::cout << "admissible thetas: " << fam.count() << " (expected "
                      << fam.expected_count() << ")\n";
            const auto& ords = fam.Q().orders();
            for (int64_t k : theta_range(o, fam)) {
                auto th = fam.theta(k);
                LChar vt = eng.vartheta_char(fam, th);
                std::cout << "theta#" << k << ": generator images";
                for (size_t i = 0; i < th.chi.size(); ++i)
                    std::cout << " (" << ords[i] << "," << th.chi[i] << ")";
                std::cout << ", theta(-1) = " << fam.theta_minus_one(th).str()
                          << ", f(vartheta-tilde) = " << eng.conductor(K, vt) << "\n";
            }
            return 0;
        }
        if (fadj->parsed()) {
            Verifier V;
            TowerParams par = params_of(o);
            const ThetaFamily& fam = V.family(par);
            std::vector<VerdictReport> reps;
            for (int64_t k : theta_range(o, fam)) {
                Instance inst{par, k, kind_of(o.cocycle), o.seed};
                AdjointFactors af(V.model(par), fam, fam.theta(k),
                                  V.make_provider(V.model(par), inst.provider, inst.seed));
                auto fr = af.report();
                VerdictReport rep;
                rep.instance_label = inst.label();
                rep.par = par;
                rep.theta_index = k;
                rep.checks.push_back(CheckLine{"a(Ad)", fr.a_route_filtration.str(),
                                               std::to_string(fr.a),
                                               fr.a_route_filtration == Rat(fr.a), true,
                                               "filtration"});
                rep.checks.push_back(CheckLine{"epsilon", fr.eps.str_float(),
                                               "w*q^{a/2}", fr.unimodular, true,
                                               "assembly"});
                rep.checks.push_back(CheckLine{"w", fr.w.str_float(),
                                               fr.w_closed.str_float(), fr.w_match,
                                               true, "closed form"});
                rep.checks.push_back(CheckLine{"L", fr.L.str(), fr.L_expected.str(),
                                               fr.L_match, true, "L closed form"});
                reps.push_back(rep);
            }
            emit(o, reps, "factors-adjoint");
            for (auto& r : reps)
                if (!r.ok()) return 1;
            return 0;
        }
        if (vfd->parsed())
            return run_verdicts(o, [](Verifier& V, const Instance& i) {
                return V.verify_formal_degree(i);
            }, "verify-formal-degree");
        if (vrn->parsed())
            return run_verdicts(o, [](Verifier& V, const Instance& i) {
                return V.verify_root_number(i);
            }, "verify-root-number");
        if (vdec->parsed())
            return run_verdicts(o, [](Verifier& V, const Instance& i) {
                return V.verify_decomposition(i);
            }, "verify-decomposition");
        if (sweep->parsed()) {
            Verifier V;
            Verifier::SweepOptions opt;
            opt.qs = sweep_q;
            opt.ns = sweep_n;
            opt.r = so.r;
            opt.theta_cap = theta_cap;
            opt.seed = so.seed;
            opt.jobs = so.jobs;
            auto res = V.sweep(opt);
            CommonOpts eo = so;
            emit(eo, res.reports, "sweep");
            std::cout << (res.all_ok() ? "\nsweep: all verdicts as expected\n"
                                       : "\nsweep: MISMATCH\n");
            return res.all_ok() ? 0 : 1;
        }
    } catch (const InvalidParams& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

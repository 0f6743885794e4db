#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tloc/localfactors.hpp"

namespace tloc {

struct Instance {
    TowerParams par;
    int64_t theta_index = 0;
    Cocycle::Kind provider = Cocycle::Kind::Trivial;
    uint64_t seed = 1;

    int64_t n() const { return par.n(); }
    int64_t dim_G() const { return par.n() * (2 * par.n() + 1); }
    std::string label() const;
};

struct CheckLine {
    std::string name;
    std::string lhs, rhs;
    bool equal = false;
    bool expected = true; // whether equality is the predicted outcome
    std::string route;
    bool ok() const { return equal == expected; }
};

struct VerdictReport {
    std::string instance_label;
    TowerParams par;
    int64_t theta_index = 0;
    std::vector<CheckLine> checks;
    std::string error; // nonempty if the instance failed to build
    bool ok() const {
        if (!error.empty()) return false;
        for (auto& c : checks)
            if (!c.ok()) return false;
        return true;
    }
};

// closed-form ingredients
Rat dim_delta(const TowerParams& par);          // dimension closed form
Rat formal_degree_lhs(const TowerParams& par);  // dim / |EP constant|
Rat gamma_adjoint_abs_closed(const TowerParams& par); // |gamma| closed form
bool root_number_expected_equal(const TowerParams& par); // (q-1)/2 (n-1) mod 4

// Builds and caches tower models / theta families per canonical key.
class Verifier {
public:
    Verifier() {}
    Verifier(const Verifier&) = delete;

    const TowerModel& model(const TowerParams& par);
    const ThetaFamily& family(const TowerParams& par);

    Cocycle make_provider(const TowerModel& T, Cocycle::Kind kind, uint64_t seed);

    VerdictReport verify_formal_degree(const Instance& inst);
    VerdictReport verify_root_number(const Instance& inst);
    VerdictReport verify_decomposition(const Instance& inst);
    // conductor value, twist-fixer subgroups, and the theta count
    VerdictReport verify_conductors(const Instance& inst);

    struct SweepOptions {
        std::vector<int64_t> qs{3, 5};
        std::vector<int64_t> ns{1, 2};
        int r = 4;
        int64_t theta_cap = 3;  // deep checks run on min(cap, count) thetas
        uint64_t seed = 1;
        int jobs = 1;
    };
    struct SweepResult {
        std::vector<VerdictReport> reports;
        bool all_ok() const {
            for (auto& r : reports)
                if (!r.ok()) return false;
            return !reports.empty();
        }
    };
    SweepResult sweep(const SweepOptions& opt);
    static std::vector<TowerParams> sweep_grid(const SweepOptions& opt);

private:
    std::mutex mu_;
    std::map<std::string, std::unique_ptr<TowerModel>> models_;
    std::map<std::string, std::unique_ptr<ThetaFamily>> families_;
};

// report rendering
std::string to_json(const VerdictReport& rep, bool pretty);
std::string to_json(const std::vector<VerdictReport>& reps, bool pretty);
std::string to_csv(const std::vector<VerdictReport>& reps);
std::string to_pretty(const VerdictReport& rep);

} // namespace tloc

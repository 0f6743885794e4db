#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "tloc/rootu.hpp"
#include "tloc/tower.hpp"

namespace tloc {

// Finite abelian group on indices 0..n-1 with a multiplication callback.
// Computes an independent-generator basis (Smith-normal-form style) by
// peeling maximal-order elements, plus discrete logs for every element.
class FinAbGroup {
public:
    FinAbGroup() {}
    FinAbGroup(int n, int id_idx, std::function<int(int, int)> mul)
        : n_(n), id_(id_idx), mul_(std::move(mul)) {}

    int n() const { return n_; }
    int id() const { return id_; }
    int mul(int a, int b) const { return mul_(a, b); }
    int pow(int a, int64_t k) const;
    int inv(int a) const;
    int64_t order_of(int a) const;

    void build_basis();
    const std::vector<int>& basis() const { return basis_; }
    const std::vector<int64_t>& orders() const { return orders_; }
    // coordinates of element i over the basis
    const std::vector<int64_t>& dlog(int i) const { return coords_[i]; }
    int from_coords(const std::vector<int64_t>& c) const;

    // all characters, deterministic lexicographic order in basis exponents
    struct Character {
        std::vector<int64_t> exps; // chi(b_i) = zeta_{orders[i]}^{exps[i]}
    };
    std::vector<Character> characters() const;
    RootU char_value(const Character& ch, int elem) const;

private:
    int n_ = 1, id_ = 0;
    std::function<int(int, int)> mul_;
    std::vector<int> basis_;
    std::vector<int64_t> orders_;
    std::vector<std::vector<int64_t>> coords_;
};

// (O_K/p_K^N)^x as an enumerated abelian group with an independent-generator
// basis and discrete logs, the 1+p_K^k filtration layer, and the norm-one
// subgroup U_{K/K+} inside it.
struct UnitQuotient {
    std::vector<OKElem> elems;
    FinAbGroup grp;
    std::vector<int> filtered;  // indices lying in 1 + p_K^k
    std::vector<int> norm_one;  // indices with N_{K/K+}(u) = 1
};
UnitQuotient unit_group_quotient(const TowerModel& T, int k, int N);

} // namespace tloc

#include "tloc/abelian.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <unordered_map>

#include "tloc/errors.hpp"

namespace tloc {

int FinAbGroup::pow(int a, int64_t k) const {
    if (k < 0) return pow(inv(a), -k);
    int r = id_, b = a;
    while (k > 0) {
        if (k & 1) r = mul_(r, b);
        b = mul_(b, b);
        k >>= 1;
    }
    return r;
}

int FinAbGroup::inv(int a) const {
    int prev = id_, cur = a;
    while (cur != id_) { prev = cur; cur = mul_(cur, a); }
    return a == id_ ? id_ : prev;
}

int64_t FinAbGroup::order_of(int a) const {
    int64_t k = 1;
    int cur = a;
    while (cur != id_) { cur = mul_(cur, a); ++k; }
    return k;
}

namespace {

// recursive basis of an abelian group given by an explicit index set
struct Peeler {
    std::function<int(int, int)> mul;
    int id;

    // returns pairs (element, order); elements multiply independently
    std::vector<std::pair<int, int64_t>> run(const std::vector<int>& elems) {
        if (elems.size() == 1) return {};
        // element of maximal order (= exponent of an abelian group)
        int g = id;
        int64_t maxord = 1;
        for (int e : elems) {
            int64_t o = order(e);
            if (o > maxord) { maxord = o; g = e; }
        }
        // cyclic table for <g>
        std::unordered_map<int, int64_t> cyc;
        {
            int cur = id;
            for (int64_t j = 0; j < maxord; ++j) {
                cyc[cur] = j;
                cur = mul(cur, g);
            }
        }
        // quotient by <g>: canonical rep = smallest index in the coset
        std::unordered_map<int, int> rep;
        std::vector<int> qelems;
        for (int e : elems) {
            if (rep.count(e)) continue;
            int can = e, cur = e;
            std::vector<int> orbit;
            for (int64_t j = 0; j < maxord; ++j) {
                orbit.push_back(cur);
                can = std::min(can, cur);
                cur = mul(cur, g);
            }
            for (int x : orbit) rep[x] = can;
            qelems.push_back(can);
        }
        for (auto& [k, v] : rep) v = rep.count(v) ? rep[v] : v;
        std::sort(qelems.begin(), qelems.end());
        qelems.erase(std::unique(qelems.begin(), qelems.end()), qelems.end());

        Peeler sub;
        sub.id = rep[id];
        sub.mul = [this, &rep](int a, int b) { return rep.at(mul(a, b)); };
        // note: sub.mul captures rep by reference; run it before rep dies
        auto down = sub.run(qelems);

        std::vector<std::pair<int, int64_t>> out;
        out.push_back({g, maxord});
        for (auto& [bq, k] : down) {
            // lift: b in the full group with rep[b] = bq; bq itself works
            int b = bq;
            int bk = id;
            for (int64_t j = 0; j < k; ++j) bk = mul(bk, b);
            auto it = cyc.find(bk);
            assert(it != cyc.end());
            int64_t t = it->second;
            assert(t % k == 0);
            int corr = id;
            {
                int64_t steps = (maxord - t / k) % maxord;
                int gp = g;
                int64_t s = steps;
                int acc = id;
                while (s > 0) {
                    if (s & 1) acc = mul(acc, gp);
                    gp = mul(gp, gp);
                    s >>= 1;
                }
                corr = acc;
            }
            int bfix = mul(b, corr);
            out.push_back({bfix, k});
        }
        return out;
    }

    int64_t order(int a) {
        int64_t k = 1;
        int cur = a;
        while (cur != id) { cur = mul(cur, a); ++k; }
        return k;
    }
};

} // namespace

void FinAbGroup::build_basis() {
    std::vector<int> elems(n_);
    for (int i = 0; i < n_; ++i) elems[i] = i;
    Peeler peel;
    peel.id = id_;
    peel.mul = mul_;
    auto bs = peel.run(elems);
    basis_.clear();
    orders_.clear();
    for (auto& [g, o] : bs) {
        basis_.push_back(g);
        orders_.push_back(o);
    }
    // discrete logs: enumerate all products of basis powers
    coords_.assign(n_, {});
    std::vector<char> seen(n_, 0);
    std::vector<int64_t> c(basis_.size(), 0);
    int64_t total = 1;
    for (auto o : orders_) total *= o;
    if (total != n_) throw std::runtime_error("FinAbGroup: basis does not span");
    for (;;) {
        int prod = id_;
        for (size_t i = 0; i < basis_.size(); ++i)
            if (c[i]) prod = mul_(prod, pow(basis_[i], c[i]));
        if (seen[prod]) throw std::runtime_error("FinAbGroup: duplicate coordinates");
        seen[prod] = 1;
        coords_[prod] = c;
        size_t i = 0;
        while (i < basis_.size()) {
            if (++c[i] < orders_[i]) break;
            c[i] = 0;
            ++i;
        }
        if (i == basis_.size()) break;
    }
    coords_[id_].assign(basis_.size(), 0);
}

int FinAbGroup::from_coords(const std::vector<int64_t>& c) const {
    int prod = id_;
    for (size_t i = 0; i < basis_.size(); ++i)
        if (c[i] % orders_[i]) prod = mul_(prod, pow(basis_[i], ((c[i] % orders_[i]) + orders_[i]) % orders_[i]));
    return prod;
}

std::vector<FinAbGroup::Character> FinAbGroup::characters() const {
    std::vector<Character> out;
    std::vector<int64_t> c(basis_.size(), 0);
    for (;;) {
        out.push_back({c});
        size_t i = basis_.size();
        // lexicographic: vary the LAST exponent fastest
        while (i > 0) {
            --i;
            if (++c[i] < orders_[i]) break;
            c[i] = 0;
            if (i == 0) return out;
        }
        if (basis_.empty()) return out;
    }
}

RootU FinAbGroup::char_value(const Character& ch, int elem) const {
    const auto& co = coords_[elem];
    RootU v = RootU::one();
    for (size_t i = 0; i < basis_.size(); ++i)
        if (ch.exps[i] && co[i])
            v = v * RootU(ch.exps[i] * co[i] % orders_[i], orders_[i]);
    return v;
}

UnitQuotient unit_group_quotient(const TowerModel& T, int k, int N) {
    if (!(0 <= k && k < N && N <= T.Nw()))
        throw PrecisionTooSmall("unit_group_quotient: need 0 <= k < N <= precision");
    UnitQuotient uq;
    Subfield K = T.subfield("K");
    uq.elems = T.subfield_units(K, N);
    const auto& par = T.params();
    int64_t qK = par.qf();
    int64_t want = qK - 1;
    for (int i = 1; i < N; ++i) want *= qK;
    if ((int64_t)uq.elems.size() != want)
        throw std::runtime_error("unit_group_quotient: unexpected unit count");
    std::unordered_map<OKElem, int, OKElemHash> idx;
    for (size_t i = 0; i < uq.elems.size(); ++i) idx[uq.elems[i]] = (int)i;
    const TowerModel* Tp = &T;
    auto elems = &uq.elems;
    int id = idx.at(T.truncate(T.one(), N));
    uq.grp = FinAbGroup((int)uq.elems.size(), id, [Tp, elems, idx, N](int a, int b) {
        return idx.at(Tp->truncate(Tp->mul((*elems)[a], (*elems)[b]), N));
    });
    uq.grp.build_basis();
    std::vector<GammaElem> tg{T.gamma().id(), T.tau()};
    OKElem one = T.truncate(T.one(), N);
    for (size_t i = 0; i < uq.elems.size(); ++i) {
        const OKElem& u = uq.elems[i];
        if (T.val(T.sub(u, one)) >= k) uq.filtered.push_back((int)i);
        if (T.truncate(T.norm_subgroup(tg, u), N) == one) uq.norm_one.push_back((int)i);
    }
    return uq;
}

} // namespace tloc

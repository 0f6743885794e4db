#include "tloc/galoisring.hpp"

#include <cassert>
#include <stdexcept>

namespace tloc {

namespace {

// dense polynomial arithmetic over F_p, ascending coefficients
using Poly = std::vector<int64_t>;

Poly poly_mod(Poly a, const Poly& g, int64_t p) {
    while (a.size() >= g.size()) {
        int64_t lead = a.back() % p;
        size_t sh = a.size() - g.size();
        if (lead) {
            for (size_t i = 0; i < g.size(); ++i)
                a[sh + i] = ((a[sh + i] - lead * g[i]) % p + p) % p;
        }
        a.pop_back();
    }
    return a;
}

Poly poly_mul_mod(const Poly& a, const Poly& b, const Poly& g, int64_t p) {
    Poly c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    return poly_mod(std::move(c), g, p);
}

Poly poly_pow_mod(Poly b, int64_t e, const Poly& g, int64_t p) {
    Poly r{1};
    while (e > 0) {
        if (e & 1) r = poly_mul_mod(r, b, g, p);
        b = poly_mul_mod(b, b, g, p);
        e >>= 1;
    }
    return r;
}

Poly trim(Poly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

bool irreducible(const Poly& g, int64_t p, int d) {
    // x^{p^d} == x mod g, and x^{p^{d/l}} != x for prime l | d
    Poly x{0, 1};
    std::vector<Poly> powers(d + 1); // x^{p^k} mod g
    powers[0] = x;
    for (int k = 1; k <= d; ++k)
        powers[k] = poly_pow_mod(powers[k - 1], p, g, p);
    auto eq_x = [&](Poly a) {
        a = trim(std::move(a));
        return a == Poly{0, 1};
    };
    if (!eq_x(powers[d])) return false;
    for (int l = 2; l <= d; ++l)
        if (d % l == 0) {
            bool lp = true;
            for (int t = 2; t * t <= l; ++t)
                if (l % t == 0) { lp = false; break; }
            if (lp && eq_x(powers[d / l])) return false;
        }
    return true;
}

std::vector<int64_t> prime_divisors(int64_t n) {
    std::vector<int64_t> out;
    for (int64_t q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    if (n > 1) out.push_back(n);
    return out;
}

} // namespace

GaloisRing::GaloisRing(int64_t p, int M, int d) : p_(p), M_(M), d_(d) {
    if (M < 1 || d < 1) throw std::invalid_argument("GaloisRing: bad M or d");
    pM_ = i64pow(p, M);
    q_ = i64pow(p, d);

    // stage 1: residue field F_p[x]/(g), multiplicative generator y
    Poly g;
    if (d == 1) {
        g = {0, 1}; // placeholder; residue field is F_p itself
    } else {
        bool found = false;
        for (int64_t code = 0; code < i64pow(p, d) && !found; ++code) {
            Poly cand(d + 1, 0);
            cand[d] = 1;
            int64_t c = code;
            for (int i = 0; i < d; ++i) { cand[i] = c % p; c /= p; }
            if (irreducible(cand, p, d)) { g = cand; found = true; }
        }
        if (!found) throw std::runtime_error("GaloisRing: no irreducible poly");
    }

    auto fieldmul = [&](const Poly& a, const Poly& b) {
        if (d == 1) return Poly{(a[0] * b[0]) % p};
        return poly_mul_mod(a, b, g, p);
    };
    auto fieldpow = [&](Poly b, int64_t e) {
        Poly r{1};
        while (e > 0) {
            if (e & 1) r = fieldmul(r, b);
            b = fieldmul(b, b);
            e >>= 1;
        }
        return r;
    };
    auto is_one = [&](Poly a) { return trim(std::move(a)) == Poly{1}; };

    auto ell = prime_divisors(q_ - 1);
    Poly y;
    for (int64_t code = 1;; ++code) {
        Poly cand;
        int64_t c = code;
        for (int i = 0; i < d; ++i) { cand.push_back(c % p); c /= p; }
        if (trim(cand).empty()) continue;
        bool gen = true;
        for (int64_t l : ell)
            if (is_one(fieldpow(cand, (q_ - 1) / l))) { gen = false; break; }
        if (gen) { y = cand; y.resize(d, 0); break; }
    }

    // minimal polynomial of y over F_p: dependency among 1, y, ..., y^d
    std::vector<Poly> pw(d + 1);
    pw[0] = Poly(d, 0); pw[0][0] = 1;
    for (int k = 1; k <= d; ++k) {
        Poly t = fieldmul(pw[k - 1], y);
        t.resize(d, 0);
        pw[k] = t;
    }
    // solve sum_{j<d} c_j y^j = y^d over F_p
    std::vector<std::vector<int64_t>> A(d, std::vector<int64_t>(d + 1, 0));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) A[i][j] = pw[j][i];
        A[i][d] = pw[d][i];
    }
    for (int col = 0, row = 0; col < d; ++col, ++row) {
        int pr = -1;
        for (int i = row; i < d; ++i)
            if (A[i][col] % p != 0) { pr = i; break; }
        assert(pr >= 0);
        std::swap(A[row], A[pr]);
        int64_t ip = inv_mod(A[row][col], p);
        for (int j = col; j <= d; ++j) A[row][j] = A[row][j] * ip % p;
        for (int i = 0; i < d; ++i)
            if (i != row && A[i][col]) {
                int64_t f = A[i][col];
                for (int j = col; j <= d; ++j)
                    A[i][j] = ((A[i][j] - f * A[row][j]) % p + p) % p;
            }
    }
    Poly hmin(d + 1, 0); // y^d = sum c_j y^j -> h(t) = t^d - sum c_j t^j
    hmin[d] = 1;
    for (int j = 0; j < d; ++j) hmin[j] = (p - A[j][d]) % p;

    // stage 2: work in Z/p^M [t]/(hmin) with t-class z0; Teichmüller-ize z0
    auto zmod = [&](int64_t v) { return ((v % pM_) + pM_) % pM_; };
    std::vector<int64_t> hred(d); // t^d = sum hred[j] t^j  mod p^M
    for (int j = 0; j < d; ++j) hred[j] = zmod(-hmin[j]);
    auto tmul = [&](const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
        std::vector<int64_t> cnv(2 * d - 1, 0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                cnv[i + j] = (cnv[i + j] + (__int128)a[i] * b[j]) % pM_;
        for (int k = 2 * d - 2; k >= d; --k) {
            int64_t cf = cnv[k];
            if (!cf) continue;
            cnv[k] = 0;
            for (int j = 0; j < d; ++j)
                cnv[k - d + j] = (cnv[k - d + j] + (__int128)cf * hred[j]) % pM_;
        }
        cnv.resize(d);
        return cnv;
    };
    std::vector<int64_t> z0(d, 0);
    if (d == 1) z0[0] = y[0]; else z0[1] = 1;
    // xi = lim z0^{p^d} (Teichmüller of the generator residue)
    std::vector<int64_t> xi = z0;
    for (int it = 0; it < M + 2; ++it) {
        std::vector<int64_t> acc = xi;
        // acc = xi^{p^d} via repeated p-th powers
        for (int k = 0; k < d; ++k) {
            std::vector<int64_t> r(d, 0);
            r[0] = 1;
            std::vector<int64_t> b = acc;
            int64_t e = p;
            while (e > 0) {
                if (e & 1) r = tmul(r, b);
                b = tmul(b, b);
                e >>= 1;
            }
            acc = r;
        }
        xi = acc;
    }

    // basis change to 1, xi, ..., xi^{d-1}
    std::vector<std::vector<int64_t>> xipow(2 * d); // xi^k in t-basis
    xipow[0] = std::vector<int64_t>(d, 0); xipow[0][0] = 1;
    for (int k = 1; k < 2 * d; ++k) xipow[k] = tmul(xipow[k - 1], xi);

    // invert T = [xi^0 ... xi^{d-1}] mod p^M
    std::vector<std::vector<int64_t>> Ti(d, std::vector<int64_t>(2 * d, 0));
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) Ti[i][j] = xipow[j][i];
        Ti[i][d + i] = 1;
    }
    for (int col = 0; col < d; ++col) {
        int pr = -1;
        for (int i = col; i < d; ++i)
            if (Ti[i][col] % p != 0) { pr = i; break; }
        assert(pr >= 0);
        std::swap(Ti[col], Ti[pr]);
        int64_t ip = inv_mod(Ti[col][col], pM_);
        for (int j = 0; j < 2 * d; ++j) Ti[col][j] = (__int128)Ti[col][j] * ip % pM_;
        for (int i = 0; i < d; ++i)
            if (i != col && Ti[i][col]) {
                int64_t f = Ti[i][col];
                for (int j = 0; j < 2 * d; ++j)
                    Ti[i][j] = zmod(Ti[i][j] - (__int128)f * Ti[col][j] % pM_);
            }
    }
    auto to_xi_basis = [&](const std::vector<int64_t>& v) {
        std::vector<int64_t> out(d, 0);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                out[i] = (out[i] + (__int128)Ti[i][d + j] * v[j]) % pM_;
        return out;
    };

    // reduction rows: xi^k in xi-basis for k in [d, 2d-2]
    red_.resize(2 * d - 1);
    for (int k = d; k <= 2 * d - 2; ++k) red_[k] = to_xi_basis(xipow[k]);

    // Teichmüller table and residue index
    teich_.resize(q_ - 1);
    teich_[0] = one();
    GRElem xig{to_xi_basis(xipow[1])};
    // by construction xi in xi-basis is (0,1,0,...)
    for (int64_t k = 1; k < q_ - 1; ++k)
        teich_[k] = mul_raw(teich_[k - 1], xig);
    for (int64_t k = 0; k < q_ - 1; ++k) {
        int64_t key = residue_key(teich_[k]);
        assert(!teich_idx_.count(key));
        teich_idx_[key] = k;
    }

    // Frobenius matrix: column j = xi^{j*p mod (q-1)} for j >= 1, column 0 = 1
    frob_mat_.assign(d, std::vector<int64_t>(d, 0));
    for (int j = 0; j < d; ++j) {
        GRElem img = (j == 0) ? one() : teich_pow((int64_t)j * p % (q_ - 1));
        for (int i = 0; i < d; ++i) frob_mat_[j][i] = img.c[i];
    }
}

GRElem GaloisRing::from_int(int64_t n) const {
    GRElem z = zero();
    z.c[0] = norm(n);
    return z;
}

GRElem GaloisRing::from_coeffs(const std::vector<int64_t>& v) const {
    assert((int)v.size() == d_);
    GRElem z;
    z.c.resize(d_);
    for (int i = 0; i < d_; ++i) z.c[i] = norm(v[i]);
    return z;
}

GRElem GaloisRing::teich_pow(int64_t k) const {
    k %= (q_ - 1);
    if (k < 0) k += q_ - 1;
    return teich_[k];
}

GRElem GaloisRing::add(const GRElem& a, const GRElem& b) const {
    GRElem z;
    z.c.resize(d_);
    for (int i = 0; i < d_; ++i) z.c[i] = norm(a.c[i] + b.c[i]);
    return z;
}

GRElem GaloisRing::sub(const GRElem& a, const GRElem& b) const {
    GRElem z;
    z.c.resize(d_);
    for (int i = 0; i < d_; ++i) z.c[i] = norm(a.c[i] - b.c[i]);
    return z;
}

GRElem GaloisRing::neg(const GRElem& a) const {
    GRElem z;
    z.c.resize(d_);
    for (int i = 0; i < d_; ++i) z.c[i] = norm(-a.c[i]);
    return z;
}

GRElem GaloisRing::mul_raw(const GRElem& a, const GRElem& b) const {
    std::vector<int64_t> cnv(2 * d_ - 1, 0);
    for (int i = 0; i < d_; ++i) {
        if (!a.c[i]) continue;
        for (int j = 0; j < d_; ++j)
            cnv[i + j] = (cnv[i + j] + (__int128)a.c[i] * b.c[j]) % pM_;
    }
    for (int k = 2 * d_ - 2; k >= d_; --k) {
        int64_t cf = cnv[k];
        if (!cf) continue;
        for (int j = 0; j < d_; ++j)
            cnv[j] = (cnv[j] + (__int128)cf * red_[k][j]) % pM_;
    }
    GRElem z;
    z.c.assign(cnv.begin(), cnv.begin() + d_);
    return z;
}

GRElem GaloisRing::mul(const GRElem& a, const GRElem& b) const { return mul_raw(a, b); }

GRElem GaloisRing::mul_int(const GRElem& a, int64_t n) const {
    GRElem z;
    z.c.resize(d_);
    n = norm(n);
    for (int i = 0; i < d_; ++i) z.c[i] = (__int128)a.c[i] * n % pM_;
    return z;
}

GRElem GaloisRing::pow(const GRElem& a, int64_t e) const {
    assert(e >= 0);
    GRElem r = one(), b = a;
    while (e > 0) {
        if (e & 1) r = mul_raw(r, b);
        b = mul_raw(b, b);
        e >>= 1;
    }
    return r;
}

bool GaloisRing::is_zero(const GRElem& a) const {
    for (auto v : a.c) if (v) return false;
    return true;
}

int GaloisRing::vval(const GRElem& a) const {
    int best = M_;
    for (auto v : a.c) {
        if (!v) continue;
        int k = 0;
        int64_t w = v;
        while (w % p_ == 0) { w /= p_; ++k; }
        best = std::min(best, k);
    }
    return best;
}

int64_t GaloisRing::residue_key(const GRElem& a) const {
    int64_t key = 0;
    for (int i = d_ - 1; i >= 0; --i) key = key * p_ + (a.c[i] % p_);
    return key;
}

GRElem GaloisRing::teichmuller(const GRElem& a) const {
    int64_t key = residue_key(a);
    if (key == 0) return zero();
    auto it = teich_idx_.find(key);
    assert(it != teich_idx_.end());
    return teich_[it->second];
}

int64_t GaloisRing::teich_index(const GRElem& a) const {
    int64_t key = residue_key(a);
    auto it = teich_idx_.find(key);
    if (it == teich_idx_.end()) throw std::invalid_argument("teich_index: not a unit");
    return it->second;
}

std::vector<int64_t> GaloisRing::teich_digits(const GRElem& a) const {
    std::vector<int64_t> out;
    GRElem x = a;
    for (int i = 0; i < M_; ++i) {
        int64_t key = residue_key(x);
        if (key == 0) {
            out.push_back(-1);
            x = divide_exact(x, p_);
        } else {
            int64_t k = teich_idx_.at(key);
            out.push_back(k);
            x = divide_exact(sub(x, teich_[k]), p_);
        }
    }
    return out;
}

GRElem GaloisRing::divide_exact(const GRElem& a, int64_t pk) const {
    GRElem z;
    z.c.resize(d_);
    for (int i = 0; i < d_; ++i) {
        assert(a.c[i] % pk == 0);
        z.c[i] = a.c[i] / pk;
    }
    return z;
}

GRElem GaloisRing::truncate(const GRElem& a, int k) const {
    int64_t pk = i64pow(p_, std::min(k, M_));
    GRElem z;
    z.c.resize(d_);
    for (int i = 0; i < d_; ++i) z.c[i] = a.c[i] % pk;
    return z;
}

GRElem GaloisRing::inv(const GRElem& a) const {
    if (!is_unit(a)) throw std::invalid_argument("GaloisRing::inv: not a unit");
    int64_t k = teich_index(a);
    GRElem y = teich_pow(q_ - 1 - k); // inverse of the Teichmüller part
    // Newton refinement: y <- y(2 - a y)
    for (int it = 0; it < M_ + 1; ++it) {
        GRElem t = sub(from_int(2), mul_raw(a, y));
        y = mul_raw(y, t);
    }
    assert(mul_raw(a, y) == one());
    return y;
}

GRElem GaloisRing::frob(const GRElem& a, int j) const {
    j %= d_;
    if (j < 0) j += d_;
    GRElem z = a;
    for (int rep = 0; rep < j; ++rep) {
        GRElem w = zero();
        for (int col = 0; col < d_; ++col) {
            if (!z.c[col]) continue;
            for (int i = 0; i < d_; ++i)
                w.c[i] = (w.c[i] + (__int128)z.c[col] * frob_mat_[col][i]) % pM_;
        }
        z = w;
    }
    return z;
}

int64_t GaloisRing::trace_to_prime_ring(const GRElem& a) const {
    GRElem s = zero();
    GRElem x = a;
    for (int j = 0; j < d_; ++j) {
        s = add(s, x);
        x = frob(x);
    }
    for (int i = 1; i < d_; ++i) assert(s.c[i] == 0);
    return s.c[0];
}

} // namespace tloc

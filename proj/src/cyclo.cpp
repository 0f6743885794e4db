#include "tloc/cyclo.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "tloc/errors.hpp"

namespace tloc {

std::vector<std::pair<int64_t, int>> Cyclo::factorize(int64_t N) {
    std::vector<std::pair<int64_t, int>> out;
    for (int64_t p = 2; p * p <= N; ++p) {
        if (N % p == 0) {
            int a = 0;
            while (N % p == 0) { N /= p; ++a; }
            out.push_back({p, a});
        }
    }
    if (N > 1) out.push_back({N, 1});
    return out;
}

int64_t Cyclo::conductor() const {
    int64_t N = 1;
    for (auto& [p, a] : fac_) N *= i64pow(p, a);
    return N;
}

void Cyclo::reduce_into(const Mono& m, const Rat& r) {
    for (size_t i = 0; i < fac_.size(); ++i) {
        auto [p, a] = fac_[i];
        int64_t pa1 = i64pow(p, a - 1);
        if (m[i] / pa1 == p - 1) {
            int64_t d = m[i] % pa1;
            Mono m2 = m;
            for (int64_t j = 0; j <= p - 2; ++j) {
                m2[i] = j * pa1 + d;
                reduce_into(m2, -r);
            }
            return;
        }
    }
    auto it = coef_.find(m);
    if (it == coef_.end()) {
        if (!r.is_zero()) coef_[m] = r;
    } else {
        it->second += r;
        if (it->second.is_zero()) coef_.erase(it);
    }
}

void Cyclo::shrink() {
    for (size_t i = 0; i < fac_.size();) {
        auto& [p, a] = fac_[i];
        bool all_div = true;
        for (auto& [m, r] : coef_)
            if (m[i] % p != 0) { all_div = false; break; }
        if (!all_div) { ++i; continue; }
        if (a >= 2) {
            std::map<Mono, Rat> nc;
            for (auto& [m, r] : coef_) {
                Mono m2 = m;
                m2[i] /= p;
                nc[m2] = r;
            }
            coef_ = std::move(nc);
            a -= 1;
        } else {
            // a == 1 and every exponent is 0: the prime drops out
            std::map<Mono, Rat> nc;
            for (auto& [m, r] : coef_) {
                Mono m2 = m;
                m2.erase(m2.begin() + i);
                nc[m2] = r;
            }
            coef_ = std::move(nc);
            fac_.erase(fac_.begin() + i);
        }
    }
}

Cyclo Cyclo::zeta(int64_t N, int64_t k) {
    if (N <= 0) throw std::invalid_argument("zeta: N must be positive");
    k = ((k % N) + N) % N;
    Cyclo z;
    z.fac_ = factorize(N);
    Mono m(z.fac_.size());
    for (size_t i = 0; i < z.fac_.size(); ++i) {
        int64_t pa = i64pow(z.fac_[i].first, z.fac_[i].second);
        int64_t cof = N / pa;
        m[i] = (__int128)(k % pa) * inv_mod(cof % pa, pa) % pa;
    }
    z.reduce_into(m, Rat(1));
    z.shrink();
    return z;
}

Cyclo Cyclo::operator-() const {
    Cyclo z = *this;
    for (auto& [m, r] : z.coef_) r = -r;
    return z;
}

Cyclo Cyclo::rebase(int64_t M) const {
    auto mf = factorize(M);
    // check divisibility
    {
        int64_t N = conductor();
        if (M % N != 0)
            throw NonDivisibleConductor("rebase: " + std::to_string(N) +
                                        " does not divide " + std::to_string(M));
    }
    Cyclo z;
    z.fac_ = mf;
    for (auto& [m, r] : coef_) {
        Mono m2(mf.size(), 0);
        for (size_t j = 0; j < mf.size(); ++j) {
            for (size_t i = 0; i < fac_.size(); ++i) {
                if (fac_[i].first == mf[j].first) {
                    m2[j] = m[i] * i64pow(mf[j].first, mf[j].second - fac_[i].second);
                    break;
                }
            }
        }
        z.coef_[m2] = r;
    }
    return z;
}

static int64_t merged_conductor(const Cyclo& a, const Cyclo& b) {
    return lcm64(a.conductor(), b.conductor());
}

Cyclo Cyclo::operator+(const Cyclo& o) const {
    int64_t M = merged_conductor(*this, o);
    Cyclo a = rebase(M), b = o.rebase(M);
    for (auto& [m, r] : b.coef_) a.reduce_into(m, r);
    // rebase keeps monomials canonical, reduce_into preserves that
    a.shrink();
    return a;
}

Cyclo Cyclo::operator*(const Rat& r) const {
    Cyclo z;
    if (r.is_zero()) return z;
    z = *this;
    for (auto& [m, c] : z.coef_) c *= r;
    return z;
}

Cyclo Cyclo::operator*(const Cyclo& o) const {
    int64_t M = merged_conductor(*this, o);
    Cyclo a = rebase(M), b = o.rebase(M);
    Cyclo z;
    z.fac_ = a.fac_;
    std::vector<int64_t> mods(z.fac_.size());
    for (size_t i = 0; i < mods.size(); ++i)
        mods[i] = i64pow(z.fac_[i].first, z.fac_[i].second);
    Mono m(z.fac_.size());
    for (auto& [ma, ra] : a.coef_)
        for (auto& [mb, rb] : b.coef_) {
            for (size_t i = 0; i < m.size(); ++i)
                m[i] = (ma[i] + mb[i]) % mods[i];
            z.reduce_into(m, ra * rb);
        }
    z.shrink();
    return z;
}

Cyclo Cyclo::conj() const {
    Cyclo z;
    z.fac_ = fac_;
    std::vector<int64_t> mods(fac_.size());
    for (size_t i = 0; i < mods.size(); ++i)
        mods[i] = i64pow(fac_[i].first, fac_[i].second);
    for (auto& [m, r] : coef_) {
        Mono m2 = m;
        for (size_t i = 0; i < m2.size(); ++i)
            m2[i] = (mods[i] - m2[i]) % mods[i];
        z.reduce_into(m2, r);
    }
    z.shrink();
    return z;
}

Cyclo Cyclo::inv() const {
    if (is_zero()) throw std::invalid_argument("Cyclo::inv: zero");
    Cyclo cj = conj();
    Cyclo s = *this * cj;
    if (!s.is_rational())
        throw std::invalid_argument("Cyclo::inv: |z|^2 not rational");
    return cj * (Rat(1) / s.rat_value());
}

Cyclo Cyclo::pow(long k) const {
    if (k < 0) return inv().pow(-k);
    Cyclo r(Rat(1)), b = *this;
    while (k > 0) {
        if (k & 1) r = r * b;
        b = b * b;
        k >>= 1;
    }
    return r;
}

Rat Cyclo::rat_value() const {
    if (!is_rational()) throw std::invalid_argument("Cyclo: not rational");
    if (coef_.empty()) return Rat(0);
    return coef_.begin()->second;
}

Cyclo Cyclo::sqrt_prime(int64_t p) {
    if (p == 2) {
        // sqrt(2) = zeta_8 + zeta_8^-1
        return zeta(8, 1) + zeta(8, 7);
    }
    // odd p: g = sum_t legendre(t) zeta_p^t; g = sqrt(p) (p=1 mod 4), i*sqrt(p) (p=3 mod 4)
    Cyclo g;
    g.fac_ = {{p, 1}};
    for (int64_t t = 1; t < p; ++t) {
        int leg = mod_pow(t, (p - 1) / 2, p) == 1 ? 1 : -1;
        g.reduce_into({t}, Rat(leg));
    }
    g.shrink();
    if (p % 4 == 1) return g;
    return g * zeta(4, 3); // -i * g
}

Cyclo Cyclo::half_power(int64_t p, int64_t f0, int64_t h) {
    int64_t e = f0 * h;
    bool invert = e < 0;
    if (invert) e = -e;
    Cyclo z;
    if (e % 2 == 0) z = Cyclo(Rat(Int(1)) * Rat(ipow(Int(p), e / 2)));
    else z = Cyclo(Rat(ipow(Int(p), (e - 1) / 2))) * sqrt_prime(p);
    if (invert) z = z.inv();
    return z;
}

std::complex<double> Cyclo::as_float() const {
    long double re = 0, im = 0;
    std::vector<int64_t> mods(fac_.size());
    for (size_t i = 0; i < mods.size(); ++i)
        mods[i] = i64pow(fac_[i].first, fac_[i].second);
    const long double TWO_PI = 6.283185307179586476925286766559L;
    for (auto& [m, r] : coef_) {
        long double frac = 0;
        for (size_t i = 0; i < m.size(); ++i)
            frac += (long double)m[i] / (long double)mods[i];
        frac -= std::floor(frac);
        long double c = r.to_ld();
        re += c * std::cos(TWO_PI * frac);
        im += c * std::sin(TWO_PI * frac);
    }
    return {(double)re, (double)im};
}

std::string Cyclo::str() const {
    if (coef_.empty()) return "0";
    int64_t N = conductor();
    std::vector<int64_t> mods(fac_.size()), cofs(fac_.size());
    for (size_t i = 0; i < fac_.size(); ++i) {
        mods[i] = i64pow(fac_[i].first, fac_[i].second);
        cofs[i] = N / mods[i];
    }
    std::ostringstream os;
    bool first = true;
    for (auto& [m, r] : coef_) {
        int64_t k = 0;
        for (size_t i = 0; i < m.size(); ++i)
            k = (k + (__int128)m[i] * cofs[i]) % N;
        if (!first) os << " + ";
        first = false;
        os << r.str();
        if (k != 0) os << "*z" << N << "^" << k;
    }
    return os.str();
}

std::string Cyclo::str_float() const {
    auto z = as_float();
    std::ostringstream os;
    os.precision(12);
    os << z.real();
    if (std::abs(z.imag()) > 1e-12) {
        os << (z.imag() > 0 ? "+" : "-");
        os << std::abs(z.imag()) << "i";
    }
    return os.str();
}

void CycloBuilder::add(const RootU& r, const Rat& scale) {
    auto key = std::make_pair(r.den, r.num);
    auto it = raw_.find(key);
    if (it == raw_.end()) raw_[key] = scale;
    else {
        it->second += scale;
        if (it->second.is_zero()) raw_.erase(it);
    }
}

void CycloBuilder::add(const Cyclo& z, const Rat& scale) {
    general_.push_back(z * scale);
}

Cyclo CycloBuilder::take() {
    // group by denominator, build one element per conductor in a single
    // reduction pass, then a balanced summation tree
    std::vector<Cyclo> parts;
    auto flush = [&](int64_t den, const std::vector<std::pair<int64_t, Rat>>& terms) {
        Cyclo z;
        z.fac_ = Cyclo::factorize(den);
        std::vector<int64_t> mods(z.fac_.size()), invs(z.fac_.size());
        for (size_t i = 0; i < z.fac_.size(); ++i) {
            mods[i] = i64pow(z.fac_[i].first, z.fac_[i].second);
            invs[i] = inv_mod((den / mods[i]) % mods[i], mods[i]);
        }
        Cyclo::Mono m(z.fac_.size());
        for (auto& [num, c] : terms) {
            for (size_t i = 0; i < m.size(); ++i)
                m[i] = (__int128)(num % mods[i]) * invs[i] % mods[i];
            z.reduce_into(m, c);
        }
        z.shrink();
        parts.push_back(z);
    };
    int64_t cur_den = -1;
    std::vector<std::pair<int64_t, Rat>> terms;
    for (auto& [key, c] : raw_) {
        auto [den, num] = key;
        if (den != cur_den) {
            if (cur_den > 0) flush(cur_den, terms);
            terms.clear();
            cur_den = den;
        }
        terms.push_back({num, c});
    }
    if (cur_den > 0) flush(cur_den, terms);
    for (auto& g : general_) parts.push_back(g);
    raw_.clear();
    general_.clear();
    if (parts.empty()) return Cyclo();
    while (parts.size() > 1) {
        std::vector<Cyclo> next;
        for (size_t i = 0; i + 1 < parts.size(); i += 2)
            next.push_back(parts[i] + parts[i + 1]);
        if (parts.size() % 2) next.push_back(parts.back());
        parts = std::move(next);
    }
    return parts[0];
}

} // namespace tloc

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>

#include <gmpxx.h>

namespace sinv {

struct NonUnit : std::domain_error {
    using std::domain_error::domain_error;
};

struct RingDescriptor {
    enum class Kind { PrimeField, Rationals, Integers, IntegersMod4 };
    Kind kind = Kind::PrimeField;
    std::uint32_t p = 2;

    bool is_field() const { return kind == Kind::PrimeField || kind == Kind::Rationals; }

    std::string name() const {
        switch (kind) {
        case Kind::PrimeField: return "f" + std::to_string(p);
        case Kind::Rationals: return "q";
        case Kind::Integers: return "z";
        case Kind::IntegersMod4: return "z4";
        }
        return "?";
    }

    friend bool operator==(const RingDescriptor&, const RingDescriptor&) = default;

    static RingDescriptor prime_field(std::uint32_t p) { return {Kind::PrimeField, p}; }
    static RingDescriptor rationals() { return {Kind::Rationals, 0}; }
    static RingDescriptor integers() { return {Kind::Integers, 0}; }
    static RingDescriptor z4() { return {Kind::IntegersMod4, 4}; }

    // Accepts "f<p>" with p prime, "q", "z", "z4".
    static RingDescriptor parse(const std::string& s);
};

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline RingDescriptor RingDescriptor::parse(const std::string& s) {
    if (s == "q") return rationals();
    if (s == "z") return integers();
    if (s == "z4") return z4();
    if (s.size() >= 2 && s[0] == 'f') {
        std::uint64_t p = 0;
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9' || p > (1u << 30)) throw std::invalid_argument("bad ring: " + s);
            p = p * 10 + std::uint64_t(s[i] - '0');
        }
        if (!is_prime(p) || p >= (1u << 31)) throw std::invalid_argument("not a prime field: " + s);
        return prime_field(std::uint32_t(p));
    }
    throw std::invalid_argument("bad ring: " + s);
}

class ModulusScope;

// Prime field with compile-time modulus. P == 0 selects a per-thread runtime modulus.
template <std::uint32_t P>
class Fp {
public:
    Fp() = default;
    static Fp from_int(long long x) {
        long long m = (long long)modulus();
        long long r = x % m;
        return raw(std::uint32_t(r < 0 ? r + m : r));
    }
    static Fp one() { return raw(1 % modulus()); }

    static std::uint32_t modulus() {
        if constexpr (P != 0) return P;
        else return dyn_modulus();
    }
    static RingDescriptor descriptor() { return RingDescriptor::prime_field(modulus()); }

    std::uint32_t value() const { return v_; }

    friend Fp operator+(Fp a, Fp b) {
        std::uint32_t s = a.v_ + b.v_;
        return raw(s >= modulus() ? s - modulus() : s);
    }
    friend Fp operator-(Fp a, Fp b) { return raw(a.v_ >= b.v_ ? a.v_ - b.v_ : a.v_ + modulus() - b.v_); }
    friend Fp operator-(Fp a) { return raw(a.v_ == 0 ? 0 : modulus() - a.v_); }
    friend Fp operator*(Fp a, Fp b) { return raw(std::uint32_t(std::uint64_t(a.v_) * b.v_ % modulus())); }
    Fp& operator+=(Fp b) { return *this = *this + b; }
    Fp& operator-=(Fp b) { return *this = *this - b; }
    Fp& operator*=(Fp b) { return *this = *this * b; }
    friend bool operator==(Fp a, Fp b) { return a.v_ == b.v_; }

    friend bool is_zero(Fp a) { return a.v_ == 0; }
    friend bool is_unit(Fp a) { return a.v_ != 0; }
    friend Fp invert(Fp a) {
        if (a.v_ == 0) throw NonUnit("0 has no inverse");
        // a^(p-2)
        std::uint64_t r = 1, b = a.v_, e = modulus() - 2, m = modulus();
        while (e) {
            if (e & 1) r = r * b % m;
            b = b * b % m;
            e >>= 1;
        }
        return raw(std::uint32_t(r));
    }
    friend std::string to_string(Fp a) { return std::to_string(a.v_); }
    // Least non-negative representative.
    friend long long lift(Fp a) { return a.v_; }

private:
    static Fp raw(std::uint32_t v) {
        Fp r;
        r.v_ = v;
        return r;
    }
    static std::uint32_t& dyn_modulus() {
        thread_local std::uint32_t m = 2;
        return m;
    }
    friend class ModulusScope;

    std::uint32_t v_ = 0;
};

using F2 = Fp<2>;
using F3 = Fp<3>;
using FpDyn = Fp<0>;

// Sets the runtime modulus of FpDyn for the current thread.
class ModulusScope {
public:
    explicit ModulusScope(std::uint32_t p) : saved_(FpDyn::dyn_modulus()) {
        if (!is_prime(p)) throw std::invalid_argument("modulus must be prime");
        FpDyn::dyn_modulus() = p;
    }
    ~ModulusScope() { FpDyn::dyn_modulus() = saved_; }
    ModulusScope(const ModulusScope&) = delete;
    ModulusScope& operator=(const ModulusScope&) = delete;

private:
    std::uint32_t saved_;
};

class Z4 {
public:
    Z4() = default;
    static Z4 from_int(long long x) { return raw(std::uint8_t(((x % 4) + 4) % 4)); }
    static Z4 one() { return raw(1); }
    static RingDescriptor descriptor() { return RingDescriptor::z4(); }
    std::uint8_t value() const { return v_; }

    friend Z4 operator+(Z4 a, Z4 b) { return raw((a.v_ + b.v_) & 3); }
    friend Z4 operator-(Z4 a, Z4 b) { return raw((a.v_ - b.v_) & 3); }
    friend Z4 operator-(Z4 a) { return raw((-a.v_) & 3); }
    friend Z4 operator*(Z4 a, Z4 b) { return raw((a.v_ * b.v_) & 3); }
    Z4& operator+=(Z4 b) { return *this = *this + b; }
    Z4& operator-=(Z4 b) { return *this = *this - b; }
    Z4& operator*=(Z4 b) { return *this = *this * b; }
    friend bool operator==(Z4 a, Z4 b) { return a.v_ == b.v_; }

    friend bool is_zero(Z4 a) { return a.v_ == 0; }
    friend bool is_unit(Z4 a) { return (a.v_ & 1) != 0; }
    // 1 and 3 are self-inverse.
    friend Z4 invert(Z4 a) {
        if (!is_unit(a)) throw NonUnit(std::to_string(a.v_) + " is not a unit mod 4");
        return a;
    }
    friend std::string to_string(Z4 a) { return std::to_string(a.v_); }
    friend long long lift(Z4 a) { return a.v_; }

private:
    static Z4 raw(int v) {
        Z4 r;
        r.v_ = std::uint8_t(v);
        return r;
    }
    std::uint8_t v_ = 0;
};

// Machine integers; every operation traps overflow.
class Zint {
public:
    Zint() = default;
    static Zint from_int(long long x) { return Zint(x); }
    static Zint one() { return Zint(1); }
    static RingDescriptor descriptor() { return RingDescriptor::integers(); }
    long long value() const { return v_; }

    friend Zint operator+(Zint a, Zint b) {
        long long r;
        if (__builtin_add_overflow(a.v_, b.v_, &r)) throw std::overflow_error("integer overflow");
        return Zint(r);
    }
    friend Zint operator-(Zint a, Zint b) {
        long long r;
        if (__builtin_sub_overflow(a.v_, b.v_, &r)) throw std::overflow_error("integer overflow");
        return Zint(r);
    }
    friend Zint operator-(Zint a) { return Zint() - a; }
    friend Zint operator*(Zint a, Zint b) {
        long long r;
        if (__builtin_mul_overflow(a.v_, b.v_, &r)) throw std::overflow_error("integer overflow");
        return Zint(r);
    }
    Zint& operator+=(Zint b) { return *this = *this + b; }
    Zint& operator-=(Zint b) { return *this = *this - b; }
    Zint& operator*=(Zint b) { return *this = *this * b; }
    friend bool operator==(Zint a, Zint b) { return a.v_ == b.v_; }

    friend bool is_zero(Zint a) { return a.v_ == 0; }
    friend bool is_unit(Zint a) { return a.v_ == 1 || a.v_ == -1; }
    friend Zint invert(Zint a) {
        if (!is_unit(a)) throw NonUnit(std::to_string(a.v_) + " is not a unit in Z");
        return a;
    }
    friend std::string to_string(Zint a) { return std::to_string(a.v_); }
    friend long long lift(Zint a) { return a.v_; }

private:
    explicit Zint(long long v) : v_(v) {}
    long long v_ = 0;
};

// Rationals in lowest terms with positive denominator (mpq canonical form).
class Q {
public:
    Q() = default;
    Q(long n, long d) : v_(n, d) {
        if (d == 0) throw std::domain_error("zero denominator");
        v_.canonicalize();
    }
    static Q from_int(long long x) { return Q(long(x), 1L); }
    static Q one() { return Q(1L, 1L); }
    static RingDescriptor descriptor() { return RingDescriptor::rationals(); }
    const mpq_class& value() const { return v_; }

    friend Q operator+(const Q& a, const Q& b) { return Q(mpq_class(a.v_ + b.v_)); }
    friend Q operator-(const Q& a, const Q& b) { return Q(mpq_class(a.v_ - b.v_)); }
    friend Q operator-(const Q& a) { return Q(mpq_class(-a.v_)); }
    friend Q operator*(const Q& a, const Q& b) { return Q(mpq_class(a.v_ * b.v_)); }
    Q& operator+=(const Q& b) { v_ += b.v_; return *this; }
    Q& operator-=(const Q& b) { v_ -= b.v_; return *this; }
    Q& operator*=(const Q& b) { v_ *= b.v_; return *this; }
    friend bool operator==(const Q& a, const Q& b) { return a.v_ == b.v_; }

    friend bool is_zero(const Q& a) { return sgn(a.v_) == 0; }
    friend bool is_unit(const Q& a) { return sgn(a.v_) != 0; }
    friend Q invert(const Q& a) {
        if (sgn(a.v_) == 0) throw NonUnit("0 has no inverse");
        return Q(mpq_class(1 / a.v_));
    }
    friend std::string to_string(const Q& a) { return a.v_.get_str(); }
    friend long long lift(const Q& a) {
        if (a.v_.get_den() != 1 || !a.v_.get_num().fits_slong_p()) throw std::domain_error("not a small integer");
        return a.v_.get_num().get_si();
    }

private:
    explicit Q(mpq_class v) : v_(std::move(v)) {}
    mpq_class v_;
};

template <class R>
concept Ring = requires(R a, R b) {
    { R::from_int(1) } -> std::same_as<R>;
    { R::one() } -> std::same_as<R>;
    { R::descriptor() } -> std::same_as<RingDescriptor>;
    { a + b } -> std::same_as<R>;
    { a - b } -> std::same_as<R>;
    { a * b } -> std::same_as<R>;
    { -a } -> std::same_as<R>;
    { a == b } -> std::same_as<bool>;
    { is_zero(a) } -> std::same_as<bool>;
    { is_unit(a) } -> std::same_as<bool>;
    { invert(a) } -> std::same_as<R>;
};

// Calls f(std::type_identity<R>{}) with the coefficient type for d.
template <class F>
decltype(auto) with_ring(const RingDescriptor& d, F&& f) {
    switch (d.kind) {
    case RingDescriptor::Kind::Rationals: return f(std::type_identity<Q>{});
    case RingDescriptor::Kind::Integers: return f(std::type_identity<Zint>{});
    case RingDescriptor::Kind::IntegersMod4: return f(std::type_identity<Z4>{});
    case RingDescriptor::Kind::PrimeField: break;
    }
    switch (d.p) {
    case 2: return f(std::type_identity<Fp<2>>{});
    case 3: return f(std::type_identity<Fp<3>>{});
    case 5: return f(std::type_identity<Fp<5>>{});
    case 7: return f(std::type_identity<Fp<7>>{});
    default: {
        ModulusScope scope(d.p);
        return f(std::type_identity<FpDyn>{});
    }
    }
}

} // namespace sinv

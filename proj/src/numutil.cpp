#include "testinv/numutil.hpp"

#include <algorithm>
#include <cctype>

#include "testinv/errors.hpp"

namespace testinv {

bool is_prime(const Int& n)
{
    if (n < 2)
        return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 40) != 0;
}

std::vector<Int> distinct_prime_factors(Int n)
{
    if (n == 0)
        throw ValidationError("prime factorization of zero");
    n = abs(n);
    std::vector<Int> out;
    for (Int p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0)
                n /= p;
        }
    }
    if (n > 1)
        out.push_back(n);
    return out;
}

long valuation(const Int& n, const Int& p)
{
    if (n == 0)
        throw ValidationError("valuation of zero");
    Int reduced;
    return static_cast<long>(mpz_remove(reduced.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

long valuation(const Rat& r, const Int& p)
{
    if (r == 0)
        throw ValidationError("valuation of zero");
    long vnum = (r.get_num() == 0) ? 0 : valuation(Int(r.get_num()), p);
    long vden = valuation(Int(r.get_den()), p);
    return vnum - vden;
}

Int ipow(const Int& base, unsigned long exp)
{
    Int out;
    mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
    return out;
}

Int floor_quot(const Int& a, const Int& b)
{
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

std::vector<long> primes_up_to(long bound)
{
    std::vector<long> out;
    if (bound < 2)
        return out;
    std::vector<bool> composite(static_cast<std::size_t>(bound) + 1, false);
    for (long i = 2; i <= bound; ++i) {
        if (!composite[static_cast<std::size_t>(i)]) {
            out.push_back(i);
            for (long j = 2 * i; j <= bound; j += i)
                composite[static_cast<std::size_t>(j)] = true;
        }
    }
    return out;
}

std::vector<long> first_primes(std::size_t count)
{
    std::vector<long> out;
    long candidate = 2;
    while (out.size() < count) {
        if (is_prime(Int(candidate)))
            out.push_back(candidate);
        ++candidate;
    }
    return out;
}

namespace {

bool all_digits(const std::string& s)
{
    if (s.empty())
        return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Int parse_signed_integer(const std::string& token)
{
    std::string body = token;
    bool neg = false;
    if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
        neg = body[0] == '-';
        body = body.substr(1);
    }
    if (!all_digits(body))
        throw ParseError("invalid integer literal: '" + token + "'");
    Int v(body, 10);
    return neg ? Int(-v) : v;
}

} // namespace

Rat parse_rational(const std::string& token)
{
    auto slash = token.find('/');
    if (slash == std::string::npos) {
        return Rat(parse_signed_integer(token));
    }
    Int num = parse_signed_integer(token.substr(0, slash));
    std::string den_str = token.substr(slash + 1);
    if (!all_digits(den_str))
        throw ParseError("invalid rational literal: '" + token + "'");
    Int den(den_str, 10);
    if (den == 0)
        throw ParseError("zero denominator: '" + token + "'");
    Rat out(num, den);
    out.canonicalize();
    return out;
}

Int parse_integer(const std::string& token)
{
    return parse_signed_integer(token);
}

std::string rat_str(const Rat& r)
{
    return r.get_str();
}

unsigned long to_ulong(const Int& n)
{
    if (n < 0 || !n.fits_ulong_p())
        throw ValidationError("integer out of unsigned range: " + n.get_str());
    return n.get_ui();
}

long to_long(const Int& n)
{
    if (!n.fits_slong_p())
        throw ValidationError("integer out of long range: " + n.get_str());
    return n.get_si();
}

} // namespace testinv

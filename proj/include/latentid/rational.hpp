/*
 * Copyright 2026 The latentid authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <gmpxx.h>

#include <string>

#include "latentid/errors.hpp"

namespace latentid {

/*
 * Exact rational scalar.
 *
 * Backed by GMP's mpq_class: arbitrary-precision numerator/denominator,
 * kept in canonical form (den > 0, gcd(|num|, den) = 1) by every GMP
 * operation.  All arithmetic in this library is exact; no floating point
 * is used anywhere.
 *
 * Beware of gmpxx expression templates: never bind GMP arithmetic results
 * to `auto`.
 */
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw domain_error("rational with zero denominator");
    Rat q{mpz_class(num), mpz_class(den)};
    q.canonicalize();
    return q;
}

inline int sign(const Rat& q) { return sgn(q); }

/// Parses "p", "-p" or "p/q".  Does not accept whitespace inside the token
/// (GMP's own string constructor would).
inline Rat parse_rat(const std::string& token) {
    const auto is_integer_literal = [](const std::string& s) {
        std::size_t i = (!s.empty() && (s[0] == '+' || s[0] == '-')) ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    const std::string::size_type slash = token.find('/');
    const std::string num_text = slash == std::string::npos ? token : token.substr(0, slash);
    const std::string den_text = slash == std::string::npos ? "1" : token.substr(slash + 1);
    if (!is_integer_literal(num_text) || !is_integer_literal(den_text))
        throw parse_error("not a rational number: '" + token + "'");
    mpz_class den(den_text);
    if (den == 0) throw domain_error("rational with zero denominator: " + token);
    Rat q{mpz_class(num_text), den};
    q.canonicalize();
    return q;
}

inline std::string to_string(const Rat& q) { return q.get_str(); }

}  // namespace latentid

#pragma once

#include <string>

#include "spherepde/problem_spec.hpp"
#include "spherepde/types.hpp"

namespace spherepde {

/// Parse a pointwise complex expression over the variable u into a callable.
/// Grammar: + - * / ^(integer powers), unary minus, parentheses, numeric
/// literals with an optional trailing i, the constant i, and the functions
/// abs, conj, re/real, im/imag.  Examples: "u - u^3",
/// "i*u*abs(u)^2", "u - (1+1.5i)*u*abs(u)^2".
PointwiseNonlinearity parse_nonlinearity(const std::string& text);

/// Parse a constant complex expression (no u allowed), e.g. "1e-4" or "i".
Complex parse_complex_constant(const std::string& text);

}  // namespace spherepde

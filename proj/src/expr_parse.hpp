#pragma once

// Internal parsing entry points for interpretation expressions, shared by
// the .csi reader and the inline polynomial syntax.

#include "cstuple/csexpr.hpp"

#include "lexer.hpp"

namespace cstuple {

// body expression over the given binders
CsExprPtr parse_cs_expr(TokCursor& c, const std::vector<Binder>& binders);

// optional "\b1 ... bn." prefix followed by a body; binder count must match
// expectedKinds, and each binder takes the expected kind (function binders
// must be applied, number binders must not be)
CsLambda parse_cs_lambda(TokCursor& c, const std::vector<BinderKind>& expectedKinds);

} // namespace cstuple

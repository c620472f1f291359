#pragma once

// Internal symbolic machinery behind check_rule's certify mode and
// check_poly_bounded: multivariate polynomials over named atoms with
// coefficient-domination comparison.

#include "cstuple/interp.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cstuple {

class Poly {
public:
    // atoms sorted by name; entries carry positive exponents
    using Monomial = std::vector<std::pair<std::string, uint32_t>>;

    static Poly constant(uint64_t v);
    static Poly var(const std::string& atom);
    Poly plus(const Poly& other) const;
    Poly times(const Poly& other) const;

    bool is_zero() const { return c_.empty(); }
    bool is_constant() const;
    uint64_t constant_term() const;
    // coefficient of the degree-1 monomial in a single atom
    uint64_t coeff_var(const std::string& atom) const;
    size_t term_count() const { return c_.size(); }
    const std::map<Monomial, uint64_t>& terms() const { return c_; }

    // canonical rendering; doubles as the identification key for F(...) atoms
    std::string to_string() const;

    // every coefficient at least matches other's; the constant term must
    // exceed other's by at least constantSlack
    bool dominates(const Poly& other, uint64_t constantSlack) const;
    // diagnostic: the first monomial of other that breaks domination
    std::optional<std::string> first_undominated(const Poly& other, uint64_t slack) const;

private:
    std::map<Monomial, uint64_t> c_;
};

// normalize a certifiable-fragment expression with binder names as atoms
// (function binders render as name(<argument key>)); nullopt when the body
// uses max/monus/pow
std::optional<Poly> normalize_fragment(const CsExprPtr& body, const std::vector<Binder>& binders);

// sound symbolic compatibility check of one rule: Certified or Unknown
Verdict certify_rule(const CsInterp& interp, const Strs& strs, size_t ruleIndex);

} // namespace cstuple

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace cstuple {

// Bodies of interpretation functions: expressions over naturals with bound
// variables addressed by binder index. FApp applies a function-kind binder
// to one argument.
enum class CsKind { Const, Arg, Add, Mul, Max, Monus, Pow, FApp };

class CsExpr;
using CsExprPtr = std::shared_ptr<const CsExpr>;

class CsExpr {
public:
    static CsExprPtr constant(uint64_t v);
    static CsExprPtr arg(int index);
    static CsExprPtr add(CsExprPtr a, CsExprPtr b);
    static CsExprPtr mul(CsExprPtr a, CsExprPtr b);
    static CsExprPtr max(CsExprPtr a, CsExprPtr b);
    static CsExprPtr monus(CsExprPtr a, CsExprPtr b);
    static CsExprPtr pow(CsExprPtr a, CsExprPtr b);
    static CsExprPtr fapp(int index, CsExprPtr argument);

    CsKind kind() const { return kind_; }
    uint64_t value() const;      // Const
    int index() const;           // Arg, FApp
    const CsExprPtr& a() const;  // binary ops; FApp argument
    const CsExprPtr& b() const;  // binary ops

private:
    CsExpr(CsKind k, uint64_t v, int idx, CsExprPtr a, CsExprPtr b)
        : kind_(k), value_(v), index_(idx), a_(std::move(a)), b_(std::move(b)) {}

    CsKind kind_;
    uint64_t value_;
    int index_;
    CsExprPtr a_, b_;
};

enum class BinderKind { Number, Function };

struct Binder {
    std::string name;
    BinderKind kind;
};

// An interpretation function \b1 ... bn. body. A symbol's size function
// binds, per argument in positional order, one Function binder for an
// order-1 argument or one Number binder for a base argument; its cost
// function binds a (cost, size) Function pair per order-1 argument and one
// Number binder per base argument.
struct CsLambda {
    std::vector<Binder> binders;
    CsExprPtr body;
};

// saturating arithmetic over uint64 (values clamp at the maximum)
uint64_t sat_add(uint64_t a, uint64_t b);
uint64_t sat_mul(uint64_t a, uint64_t b);
uint64_t sat_pow(uint64_t a, uint64_t b);

using CsFun = std::function<uint64_t(uint64_t)>;
using CsValue = std::variant<uint64_t, CsFun>;

// evaluate with env[i] the value of binder i; throws std::logic_error when a
// binder is used against its kind or the env is too short
uint64_t eval_cs(const CsExprPtr& e, const std::vector<CsValue>& env);

// only {Const, Arg, Add, Mul, FApp} — the fragment the certifier handles
bool in_certifiable_fragment(const CsExprPtr& e);

std::string cs_to_string(const CsExprPtr& e, const std::vector<Binder>& binders);
// "\x y. x + 1", or just the body when there are no binders
std::string lambda_to_string(const CsLambda& l);

} // namespace cstuple

#pragma once

#include <memory>
#include <string>

namespace cstuple {

class SimpleType;
using TypePtr = std::shared_ptr<const SimpleType>;

// Simple types over named base sorts: either a sort name or an arrow type.
// Immutable; build through the two factories.
class SimpleType {
public:
    static TypePtr base(std::string name);
    static TypePtr arrow(TypePtr arg, TypePtr result);

    bool is_base() const { return arg_ == nullptr; }
    const std::string& base_name() const;
    const TypePtr& arg() const;
    const TypePtr& result() const;

    // order(sort) = 0, order(s -> t) = max(order(s) + 1, order(t))
    int order() const;
    // number of arguments to reach a base result
    int arity() const;
    // base type at the end of the arrow spine
    const SimpleType& final_result() const;

    std::string to_string() const;

private:
    explicit SimpleType(std::string name) : name_(std::move(name)) {}
    SimpleType(TypePtr a, TypePtr r) : arg_(std::move(a)), result_(std::move(r)) {}

    std::string name_;
    TypePtr arg_;
    TypePtr result_;
};

bool type_equal(const TypePtr& a, const TypePtr& b);

} // namespace cstuple

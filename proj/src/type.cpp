#include "cstuple/type.hpp"

#include <stdexcept>

namespace cstuple {

TypePtr SimpleType::base(std::string name) {
    return TypePtr(new SimpleType(std::move(name)));
}

TypePtr SimpleType::arrow(TypePtr arg, TypePtr result) {
    if (!arg || !result) throw std::invalid_argument("arrow type with null component");
    return TypePtr(new SimpleType(std::move(arg), std::move(result)));
}

const std::string& SimpleType::base_name() const {
    if (!is_base()) throw std::logic_error("base_name on arrow type");
    return name_;
}

const TypePtr& SimpleType::arg() const {
    if (is_base()) throw std::logic_error("arg on base type");
    return arg_;
}

const TypePtr& SimpleType::result() const {
    if (is_base()) throw std::logic_error("result on base type");
    return result_;
}

int SimpleType::order() const {
    if (is_base()) return 0;
    int a = arg_->order() + 1;
    int r = result_->order();
    return a > r ? a : r;
}

int SimpleType::arity() const {
    int n = 0;
    const SimpleType* t = this;
    while (!t->is_base()) {
        ++n;
        t = t->result_.get();
    }
    return n;
}

const SimpleType& SimpleType::final_result() const {
    const SimpleType* t = this;
    while (!t->is_base()) t = t->result_.get();
    return *t;
}

std::string SimpleType::to_string() const {
    if (is_base()) return name_;
    std::string lhs = arg_->is_base() ? arg_->to_string() : "(" + arg_->to_string() + ")";
    return lhs + " -> " + result_->to_string();
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
    if (a.get() == b.get()) return true;
    if (!a || !b) return false;
    if (a->is_base() != b->is_base()) return false;
    if (a->is_base()) return a->base_name() == b->base_name();
    return type_equal(a->arg(), b->arg()) && type_equal(a->result(), b->result());
}

} // namespace cstuple

#pragma once

#include <string>

#include "slp/ast.hpp"

namespace slp {

// Concrete syntax, parse(pretty(x)) == x:
//   @a x |-> y,z ^ 1/2   *   (+)   &&   _|_   o   ow   exists   emp   true
std::string pretty(const ArithTerm& t);
std::string pretty(const PermTerm& t);
std::string pretty(const LabelTerm& t);
std::string pretty(const PureAtom& a);
std::string pretty(const Spatial& s);
std::string pretty(const SymbolicHeap& sh);
std::string pretty(const Formula& f);

}  // namespace slp

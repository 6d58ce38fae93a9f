#ifndef PROGPOLY_FUNCTION_ID_HPP
#define PROGPOLY_FUNCTION_ID_HPP

#include <string_view>

namespace progpoly {

enum class FunctionId : unsigned char { Log2, Ln, Log10, Exp2, Exp, Exp10 };

inline bool is_log_family(FunctionId f) {
    return f == FunctionId::Log2 || f == FunctionId::Ln || f == FunctionId::Log10;
}
inline bool is_exp_family(FunctionId f) { return !is_log_family(f); }

const char* to_string(FunctionId f);
FunctionId parse_function(std::string_view s);

}  // namespace progpoly

#endif

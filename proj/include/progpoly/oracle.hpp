#ifndef PROGPOLY_ORACLE_HPP
#define PROGPOLY_ORACLE_HPP

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "progpoly/formats.hpp"
#include "progpoly/function_id.hpp"

namespace progpoly {

/// Correctly rounded result of an elementary function at one input.
struct OracleResult {
    FpValue value;
    bool exact = false;  // true iff the infinite-precision result is representable
};

enum class OracleStatus : unsigned char { Ok, DomainError };

struct OracleOutcome {
    OracleStatus status = OracleStatus::Ok;
    OracleResult result;
};

/// Raised when the bracket still straddles a rounding boundary at the
/// deepest working precision; never silently rounded.
class PrecisionExhausted : public std::runtime_error {
  public:
    explicit PrecisionExhausted(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr long kOraclePrecisionLadder[] = {64, 128, 256, 512};
inline constexpr int kOracleVersion = 1;

/// IEEE-convention results for inputs outside the numeric path:
/// NaN, infinities, zeros, and log-family non-positive inputs.
std::optional<FpValue> special_value_result(FunctionId f, FpValue x, FpFormat out,
                                            RoundingMode mode);

/// Certain overflow/underflow of the exp family, decided by exact rational
/// comparison with margins wide enough that all six modes agree on a proxy;
/// shared by the oracle and the generated evaluator so they cannot diverge.
std::optional<FpValue> exp_saturation_result(FunctionId f, const ExactReal& x,
                                             FpFormat out, RoundingMode mode);

/// Correctly rounded f(x) into `out` under `mode`. The input's own format is
/// irrelevant beyond its value. Requires x finite and inside f's domain.
OracleOutcome oracle_round(FunctionId f, FpValue x, FpFormat out, RoundingMode mode);

/// One bracket evaluation serving several modes at once.
std::vector<OracleOutcome> oracle_round_many(FunctionId f, FpValue x, FpFormat out,
                                             std::span<const RoundingMode> modes);

/// Streams (input, result) for every encoding of fmt in ascending order.
/// Out-of-domain and special inputs carry their IEEE-mandated results.
void oracle_table(FunctionId f, FpFormat fmt, RoundingMode mode,
                  const std::function<void(FpValue, OracleResult)>& fn);

/// Binary on-disk cache of a full oracle table: little-endian records of
/// (input encoding, output encoding) padded to whole bytes, after a header
/// with a version byte and the format parameters.
std::string oracle_cache_filename(FunctionId f, FpFormat fmt, RoundingMode mode);
void write_oracle_cache(const std::string& path, FunctionId f, FpFormat fmt,
                        RoundingMode mode, const std::vector<std::uint64_t>& outputs);
std::optional<std::vector<std::uint64_t>> read_oracle_cache(const std::string& path,
                                                            FunctionId f, FpFormat fmt,
                                                            RoundingMode mode);

}  // namespace progpoly

#endif

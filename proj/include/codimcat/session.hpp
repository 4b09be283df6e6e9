#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "codimcat/arith.hpp"

namespace codimcat {

struct RunConfig {
  std::optional<std::uint32_t> prime_override;
  std::optional<MonomialOrder> order_override;
  Limits limits;
  int jobs = 1;
  bool timing = true;
  std::uint64_t seed = 0xC0D1CA7ull;
};

class Session {
 public:
  struct Impl;
  std::shared_ptr<const Impl> impl;
};

/// Parses the line-oriented session language. Throws ParseError with line
/// and column on malformed input; references are checked against earlier
/// declarations.
Session parse_session(const std::string& text, const RunConfig& cfg = {});

/// Canonical rendering; parse(print(parse(text))) equals parse(text).
std::string print_session(const Session& s);

/// Executes the commands in order and returns the JSON report as a string
/// (pretty printed, two spaces). Engine errors become structured entries,
/// never a crash.
std::string run_session(const Session& s, const RunConfig& cfg = {});

/// Parse + run; parse errors land in the report's error list.
std::string run_session_text(const std::string& text, const RunConfig& cfg = {});

/// One polynomial in the canonical syntax over the given ring.
Poly parse_poly_text(const RingPtr& ring, const std::string& text);

/// True when the report contains no errors.
bool report_clean(const std::string& report_json);

/// Built-in example corpus used by `codim-cat check`.
struct CorpusEntry {
  std::string name;
  std::string text;
};
const std::vector<CorpusEntry>& builtin_corpus();

/// The aggregated corpus report printed by `codim-cat check`.
std::string check_report(const RunConfig& cfg);

}  // namespace codimcat

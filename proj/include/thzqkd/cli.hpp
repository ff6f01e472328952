#pragma once

// Command-line front end. Every subcommand is a thin wrapper around the
// table builders below, which are public so the library path can be checked
// against the CLI path.

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "thzqkd/csv.hpp"
#include "thzqkd/experiments.hpp"
#include "thzqkd/keyrate.hpp"
#include "thzqkd/protocol_mc.hpp"

namespace thzqkd {

inline constexpr std::string_view kToolVersion = "thzqkd 0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2 };

// Metadata block shared by every table: tool, constants, scenario hash.
std::vector<std::pair<std::string, std::string>> base_metadata(const Scenario& scenario);

Table rate_table(const Scenario& scenario, const RateBreakdown& breakdown);
Table distance_sweep_table(const Scenario& scenario, const std::vector<SweepRow>& rows);
Table frequency_sweep_table(const Scenario& scenario, const std::vector<FrequencyPoint>& points,
                            double target_rate, RateMethod method);
Table zeta_table(const Scenario& scenario, const std::vector<ZetaPoint>& points);
Table max_distance_table(const Scenario& scenario, const MaxDistanceResult& result,
                         double target_rate, RateMethod method);

struct McValidationRow {
  int channel = 0;
  double transmittance = 0.0;
  double var_bob = 0.0;
  double var_bob_expected = 0.0;
  double var_bob_se = 0.0;
  double mi_bits = 0.0;
  double mi_expected_bits = 0.0;
  double mi_se = 0.0;
  bool within_3se = false;
};

std::vector<McValidationRow> mc_validate(const ProtocolRun& run);
Table mc_table(const Scenario& scenario, const ProtocolRun& run,
               const std::vector<McValidationRow>& rows);

// argv without the program name. Returns an ExitCode.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace thzqkd

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "despeckle/estimators.hpp"
#include "despeckle/lower_bound.hpp"
#include "despeckle/noise_models.hpp"
#include "despeckle/risk_harness.hpp"

// Dataset and report persistence. CSV numbers carry 17 significant digits
// so values round-trip bit-exactly; JSON reports carry schema_version 1
// and an echo of the fully resolved configuration that produced them.

namespace despeckle::io {

inline constexpr int kSchemaVersion = 1;

/// "%.17g" rendering.
std::string format_double(double v);

/// Observation CSV, header "x,y".
void write_observations_csv(std::ostream& out, const ObservationSet& obs);

/// Reads an "x,y" CSV and checks that the design is x_i = i/n to 1e-12.
/// sigma/model/seed are not part of the file; the caller supplies them.
/// Throws CsvError on malformed input.
ObservationSet read_observations_csv(std::istream& in, double sigma, NoiseModel model);

/// Curve CSV, header "x,f_hat,g_hat".
void write_curve_csv(std::ostream& out, const EstimateCurve& curve);

/// Risk CSV: "# schema_version=1" then header "n,sigma,risk,se".
void write_risk_csv(std::ostream& out, const std::vector<RiskPoint>& points, Loss loss);

/// Risk points parsed back from write_risk_csv output (the selected loss
/// column lands in risk_l2/se_l2).
std::vector<RiskPoint> read_risk_csv(std::istream& in);

nlohmann::json risk_point_json(const RiskPoint& p);
nlohmann::json rate_fit_json(const RateFit& fit);
nlohmann::json regime_report_json(const RegimeReport& report, double slope_tolerance);
nlohmann::json packing_json(const PackingSet& set);
nlohmann::json lr_diagnostic_json(const LrDiagnostic& diag);

}  // namespace despeckle::io

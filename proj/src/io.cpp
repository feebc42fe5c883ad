#include "despeckle/io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace despeckle::io {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_observations_csv(std::ostream& out, const ObservationSet& obs) {
    out << "x,y\n";
    for (int i = 0; i < obs.n; ++i)
        out << format_double(obs.xs[i]) << ',' << format_double(obs.ys[i]) << '\n';
}

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_field(const std::string& field, int line_no) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw CsvError("line " + std::to_string(line_no) + ": not a number: '" + field + "'");
    }
    if (pos != field.size())
        throw CsvError("line " + std::to_string(line_no) + ": trailing junk in '" + field + "'");
    return v;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

ObservationSet read_observations_csv(std::istream& in, double sigma, NoiseModel model) {
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty input");
    if (strip_cr(line) != "x,y") throw CsvError("expected header 'x,y', got '" + line + "'");

    std::vector<double> xs, ys;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 2)
            throw CsvError("line " + std::to_string(line_no) + ": expected two fields");
        xs.push_back(parse_field(fields[0], line_no));
        ys.push_back(parse_field(fields[1], line_no));
    }
    if (xs.empty()) throw CsvError("no data rows");

    const int n = static_cast<int>(xs.size());
    ObservationSet obs;
    obs.n = n;
    obs.sigma = sigma;
    obs.model = model;
    obs.seed = 0;
    obs.xs.resize(n);
    obs.ys.resize(n);
    for (int i = 0; i < n; ++i) {
        const double expect = static_cast<double>(i + 1) / n;
        if (std::abs(xs[i] - expect) > 1e-12)
            throw CsvError("row " + std::to_string(i + 1) + ": x=" + format_double(xs[i]) +
                           " is not the design point " + format_double(expect));
        obs.xs[i] = xs[i];
        obs.ys[i] = ys[i];
    }
    return obs;
}

void write_curve_csv(std::ostream& out, const EstimateCurve& curve) {
    out << "x,f_hat,g_hat\n";
    for (int i = 0; i < curve.grid.size(); ++i) {
        out << format_double(curve.grid[i]) << ',' << format_double(curve.values[i]) << ','
            << format_double(curve.gsq_values[i]) << '\n';
    }
}

void write_risk_csv(std::ostream& out, const std::vector<RiskPoint>& points, Loss loss) {
    out << "# schema_version=" << kSchemaVersion << "\n";
    out << "n,sigma,risk,se\n";
    for (const auto& p : points) {
        const double risk = loss == Loss::L2 ? p.risk_l2 : p.risk_sup;
        const double se = loss == Loss::L2 ? p.se_l2 : p.se_sup;
        out << p.n << ',' << format_double(p.sigma) << ',' << format_double(risk) << ','
            << format_double(se) << '\n';
    }
}

std::vector<RiskPoint> read_risk_csv(std::istream& in) {
    std::vector<RiskPoint> points;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line != "n,sigma,risk,se")
                throw CsvError("expected header 'n,sigma,risk,se', got '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 4)
            throw CsvError("line " + std::to_string(line_no) + ": expected four fields");
        RiskPoint p;
        p.n = static_cast<int>(parse_field(fields[0], line_no));
        p.sigma = parse_field(fields[1], line_no);
        p.risk_l2 = parse_field(fields[2], line_no);
        p.se_l2 = parse_field(fields[3], line_no);
        points.push_back(p);
    }
    if (!header_seen) throw CsvError("missing risk CSV header");
    return points;
}

namespace {

std::string loss_name(Loss loss) { return loss == Loss::L2 ? "l2" : "sup"; }

}  // namespace

nlohmann::json risk_point_json(const RiskPoint& p) {
    return {{"n", p.n},           {"sigma", p.sigma},   {"trials", p.trials},
            {"risk_l2", p.risk_l2}, {"risk_sup", p.risk_sup}, {"se_l2", p.se_l2},
            {"se_sup", p.se_sup}, {"bandwidth", p.bandwidth}};
}

nlohmann::json rate_fit_json(const RateFit& fit) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [x, y] : fit.points) pts.push_back({{"log_x", x}, {"log_risk", y}});
    return {{"loss", loss_name(fit.loss)},
            {"slope", fit.slope},
            {"intercept", fit.intercept},
            {"r_squared", fit.r_squared},
            {"theoretical_slope", fit.theoretical_slope},
            {"points", pts}};
}

nlohmann::json regime_report_json(const RegimeReport& report, double slope_tolerance) {
    nlohmann::json despeckle_pts = nlohmann::json::array();
    for (const auto& p : report.despeckle_points) despeckle_pts.push_back(risk_point_json(p));
    nlohmann::json denoise_pts = nlohmann::json::array();
    for (const auto& p : report.denoise_points) denoise_pts.push_back(risk_point_json(p));

    const bool despeckle_ok =
        std::abs(report.despeckle_fit.slope - report.despeckle_fit.theoretical_slope) <=
        slope_tolerance;
    const bool denoise_ok =
        std::abs(report.denoise_fit.slope - report.denoise_fit.theoretical_slope) <=
        slope_tolerance;

    return {{"schema_version", kSchemaVersion},
            {"config",
             {{"beta", report.beta},
              {"L", report.L},
              {"h_floor", report.h_floor},
              {"sigma_rule", report.rule.describe()},
              {"loss", loss_name(report.loss)},
              {"trials", report.trials},
              {"seed", report.seed},
              {"test_function", report.test_function},
              {"slope_tolerance", slope_tolerance}}},
            {"despeckle", {{"points", despeckle_pts}, {"fit", rate_fit_json(report.despeckle_fit)}}},
            {"denoise", {{"points", denoise_pts}, {"fit", rate_fit_json(report.denoise_fit)}}},
            {"slope_gap", report.slope_gap()},
            {"checks",
             {{"despeckle_slope_within_tolerance", despeckle_ok},
              {"denoise_slope_within_tolerance", denoise_ok}}}};
}

nlohmann::json packing_json(const PackingSet& set) {
    nlohmann::json words = nlohmann::json::array();
    for (const auto& cw : set.codewords) {
        std::string bits(cw.size(), '0');
        for (std::size_t i = 0; i < cw.size(); ++i) bits[i] = cw[i] ? '1' : '0';
        words.push_back(bits);
    }
    const int required = static_cast<int>(std::ceil(set.m / 16.0));
    const auto required_size = static_cast<std::size_t>(std::ceil(std::pow(2.0, set.m / 8.0)));
    return {{"schema_version", kSchemaVersion},
            {"m", set.m},
            {"size", set.size()},
            {"min_distance", set.min_distance},
            {"min_weight", set.min_weight},
            {"required_size", required_size},
            {"required_distance", required},
            {"required_weight", required},
            {"audit_pass", set.size() >= required_size && set.min_distance >= required &&
                               set.min_weight >= required},
            {"codewords", words}};
}

nlohmann::json lr_diagnostic_json(const LrDiagnostic& diag) {
    return {{"schema_version", kSchemaVersion},
            {"l", diag.l},
            {"lambda_l", diag.lambda_l},
            {"packing_size", diag.packing_size},
            {"trials", diag.trials},
            {"hit_rate", diag.hit_rate},
            {"target", diag.target},
            {"ci_halfwidth", diag.ci_halfwidth},
            {"mean_log_lr", diag.mean_log_lr},
            {"phi_l2", diag.phi_l2},
            {"phi_small_l2", diag.phi_small_l2},
            {"phi_small_sup", diag.phi_small_sup}};
}

}  // namespace despeckle::io

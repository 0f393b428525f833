#include "cli.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "uexp/detail/format.hpp"
#include "uexp/errors.hpp"
#include "uexp/estimators.hpp"
#include "uexp/laplace.hpp"
#include "uexp/montecarlo.hpp"
#include "uexp/oracle.hpp"

namespace uexp::cli {

namespace {

using json = nlohmann::ordered_json;

// Bumped whenever a report field is renamed or removed; see docs/report-schema.md.
constexpr int kSchemaVersion = 1;

struct CommonArgs {
    std::string format = "json";
    std::string out = "-";
    int jobs = 1;
};

struct SpecArgs {
    std::string kind;
    std::optional<double> p;
    std::optional<double> q;
    std::optional<double> t;
    std::optional<std::int64_t> m;
    bool relax_negative_integer = false;
};

void add_spec_options(CLI::App* cmd, SpecArgs& a) {
    cmd->add_option("--kind", a.kind, "functional kind (rate-power, quantile, moment, ...)")->required();
    cmd->add_option("--p", a.p, "exponent, moment order or shortfall level");
    cmd->add_option("--q", a.q, "quantile level");
    cmd->add_option("--t", a.t, "time point / MGF argument");
    cmd->add_option("--m", a.m, "power for max/min kinds");
    cmd->add_flag("--allow-negative-integer-power", a.relax_negative_integer,
                  "rate-power: admit negative integer exponents");
}

FunctionalSpec build_spec(const SpecArgs& a) {
    const auto kind = parse_kind(a.kind);
    if (!kind || *kind == Kind::Custom) {
        throw SpecError("unknown functional kind '" + a.kind + "'");
    }
    FunctionalSpec spec;
    spec.kind = *kind;
    spec.p = a.p;
    spec.q = a.q;
    spec.t = a.t;
    spec.m = a.m;
    spec.allow_negative_integer_power = a.relax_negative_integer;
    spec.validate();
    return spec;
}

json spec_json(const FunctionalSpec& spec) {
    json j;
    j["kind"] = kind_name(spec.kind);
    if (spec.p) j["p"] = *spec.p;
    if (spec.q) j["q"] = *spec.q;
    if (spec.t) j["t"] = *spec.t;
    if (spec.m) j["m"] = *spec.m;
    if (spec.allow_negative_integer_power) j["allow_negative_integer_power"] = true;
    return j;
}

json manifest(const std::string& command, json spec, const std::optional<std::string>& input_path,
              const std::optional<std::uint64_t>& seed, const CommonArgs& common, json parameters) {
    json m;
    m["schema_version"] = kSchemaVersion;
    m["command"] = command;
    m["spec"] = std::move(spec);
    m["input_path"] = input_path ? json(*input_path) : json(nullptr);
    m["seed"] = seed ? json(*seed) : json(nullptr);
    m["output_format"] = common.format;
    m["tool_version"] = UEXP_VERSION;
    m["parameters"] = std::move(parameters);
    return m;
}

// RFC 4180 quoting.
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string num(double v) { return detail::format_double(v); }
std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string render() const {
        std::string out;
        const auto line = [&out](const std::vector<std::string>& fields) {
            for (std::size_t i = 0; i < fields.size(); ++i) {
                if (i) out += ',';
                out += csv_field(fields[i]);
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-") {
        out << text;
        out.flush();
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw InputError("cannot open output file '" + path + "'");
    }
    file << text;
    if (!file) {
        throw InputError("failed writing output file '" + path + "'");
    }
}

// One document: JSON object, or CSV whose every row carries the manifest.
void emit(const CommonArgs& common, const json& manifest_doc, json body, CsvTable table,
          std::ostream& out) {
    if (common.format == "json") {
        json doc;
        doc["manifest"] = manifest_doc;
        for (auto& [key, value] : body.items()) doc[key] = value;
        write_text(common.out, doc.dump(2) + "\n", out);
        return;
    }
    table.header.push_back("manifest");
    const std::string m = manifest_doc.dump();
    for (auto& row : table.rows) row.push_back(m);
    write_text(common.out, table.render(), out);
}

json summary_json(const McSummary& s) {
    json j;
    j["mean"] = s.mean;
    j["variance"] = s.variance;
    j["std_error"] = s.std_error;
    j["variance_std_error"] = s.variance_std_error;
    j["replications"] = s.replications;
    j["ks_statistic"] = s.ks_statistic ? json(*s.ks_statistic) : json(nullptr);
    if (s.standardized_moments) {
        j["skewness"] = s.standardized_moments->first;
        j["excess_kurtosis"] = s.standardized_moments->second;
    } else {
        j["skewness"] = nullptr;
        j["excess_kurtosis"] = nullptr;
    }
    return j;
}

McConfig mc_config(std::int64_t reps, std::int64_t n, double lambda, std::uint64_t seed, int jobs) {
    McConfig c;
    c.replications = reps;
    c.n = n;
    c.lambda = lambda;
    c.seed = seed;
    c.parallel_chunks = jobs;
    c.validate();
    return c;
}

// ---- estimate ----

struct EstimateArgs {
    SpecArgs spec;
    std::string data;
    std::string family = "closed";
    std::string method = "auto";
    int gs_order = 18;
    int talbot_nodes = 32;
};

int cmd_estimate(const EstimateArgs& a, const CommonArgs& common, std::ostream& out) {
    const FunctionalSpec spec = build_spec(a.spec);
    const Sample sample = read_data_file(a.data);
    EstimateResult result;
    json parameters;
    parameters["family"] = a.family;
    if (a.family == "closed") {
        result = estimate(spec, sample);
    } else if (a.family == "mle") {
        result = mle_estimate(spec, sample);
    } else if (a.family == "tate") {
        result = tate_estimate(spec, sample.mean(), sample.size());
    } else {
        spec.validate_for(sample.size());
        const auto xi = builtin_transform(spec);
        InversionConfig config = default_inversion_config(*xi);
        if (a.method == "talbot") config.method = InversionMethod::Talbot;
        if (a.method == "gaver-stehfest") config.method = InversionMethod::GaverStehfest;
        if (a.method == "convolution") config.method = InversionMethod::ConvolutionQuadrature;
        config.gs_order = a.gs_order;
        config.talbot_nodes = a.talbot_nodes;
        result = generic_unbiased_estimate(*xi, sample, config);
        result.spec = spec;
        parameters["method"] = method_name(config.method);
        parameters["gs_order"] = config.gs_order;
        parameters["talbot_nodes"] = config.talbot_nodes;
    }

    json body;
    body["result"] = {{"value", result.value},
                      {"spec", spec_json(spec)},
                      {"n", result.n},
                      {"family", family_name(result.family)},
                      {"sample_mean", sample.mean()}};
    CsvTable table{{"value", "family", "n", "sample_mean", "kind", "p", "q", "t", "m"}, {}};
    table.rows.push_back({num(result.value), std::string(family_name(result.family)), std::to_string(result.n),
                          num(sample.mean()), std::string(kind_name(spec.kind)), opt_num(spec.p),
                          opt_num(spec.q), opt_num(spec.t), spec.m ? std::to_string(*spec.m) : ""});
    emit(common, manifest("estimate", spec_json(spec), a.data, std::nullopt, common, parameters),
         std::move(body), std::move(table), out);
    return kExitOk;
}

// ---- verify ----

struct VerifyArgs {
    bool tate = false;
    std::vector<std::string> kinds;
    std::vector<std::int64_t> n;
    std::vector<double> lambda;
    std::vector<double> p{-0.499, 0.5, 1.0, 2.0};
    std::vector<double> q{0.25, 0.5, 0.9};
    std::vector<double> t{0.5, 1.0, 2.0};
    std::vector<std::int64_t> m{1, 2, 3};
    double rel_tol = 1e-10;
    double threshold = 1e-7;
};

std::vector<FunctionalSpec> specs_for_kind(Kind kind, const VerifyArgs& a) {
    std::vector<FunctionalSpec> out;
    switch (kind) {
        case Kind::RatePower:
            for (double p : a.p) out.push_back(FunctionalSpec::rate_power(p));
            break;
        case Kind::Moment:
            for (double p : a.p) out.push_back(FunctionalSpec::moment(p));
            break;
        case Kind::Quantile:
            for (double q : a.q) out.push_back(FunctionalSpec::quantile(q));
            break;
        case Kind::ExpectedShortfall:
            for (double q : a.q) out.push_back(FunctionalSpec::expected_shortfall(q));
            break;
        case Kind::Survival:
            for (double t : a.t) out.push_back(FunctionalSpec::survival(t));
            break;
        case Kind::Pdf:
            for (double t : a.t) out.push_back(FunctionalSpec::pdf(t));
            break;
        case Kind::MeanPastLifetime:
            for (double t : a.t) out.push_back(FunctionalSpec::mean_past_lifetime(t));
            break;
        case Kind::Mgf:
            for (double t : a.t) out.push_back(FunctionalSpec::mgf(t));
            break;
        case Kind::MaxCdfPower:
            for (double t : a.t)
                for (std::int64_t m : a.m) out.push_back(FunctionalSpec::max_cdf_power(t, m));
            break;
        case Kind::MinSurvival:
            for (double t : a.t)
                for (std::int64_t m : a.m) out.push_back(FunctionalSpec::min_survival(t, m));
            break;
        case Kind::Custom:
            break;
    }
    return out;
}

bool cell_is_valid(const GridCell& c, bool tate) {
    try {
        if (tate) {
            if (c.n < 2) return false;
            if (c.spec.kind == Kind::RatePower && !(*c.spec.p < static_cast<double>(c.n - 1))) return false;
            c.spec.validate();
        } else {
            c.spec.validate_for(c.n);
        }
        if (c.spec.kind == Kind::Mgf && !(*c.spec.t < c.lambda)) return false;
        return c.lambda > 0.0;
    } catch (const Error&) {
        return false;
    }
}

int cmd_verify(VerifyArgs a, const CommonArgs& common, std::ostream& out, std::ostream& err) {
    if (!(a.rel_tol > 0.0) || !(a.threshold > 0.0)) {
        throw ConfigError("--rel-tol and --threshold must be positive");
    }
    if (a.kinds.empty()) {
        a.kinds = a.tate ? std::vector<std::string>{"rate-power", "quantile", "max-cdf-power"}
                         : std::vector<std::string>{"rate-power", "quantile", "moment", "survival",
                                                    "max-cdf-power", "min-survival", "pdf",
                                                    "mean-past-lifetime", "mgf", "expected-shortfall"};
    }
    if (a.n.empty()) {
        a.n = a.tate ? std::vector<std::int64_t>{3, 5, 10} : std::vector<std::int64_t>{1, 2, 5, 10, 30};
    }

    std::vector<GridCell> cells;
    std::int64_t skipped = 0;
    for (const auto& name : a.kinds) {
        const auto kind = parse_kind(name);
        if (!kind || *kind == Kind::Custom) {
            throw SpecError("unknown functional kind '" + name + "'");
        }
        if (a.tate && *kind != Kind::RatePower && *kind != Kind::Quantile && *kind != Kind::MaxCdfPower) {
            throw SpecError("--tate covers rate-power, quantile and max-cdf-power only");
        }
        for (const auto& spec : specs_for_kind(*kind, a))
            for (std::int64_t n : a.n)
                for (double lambda : a.lambda) {
                    GridCell cell{spec, n, lambda};
                    if (cell_is_valid(cell, a.tate)) {
                        cells.push_back(std::move(cell));
                    } else {
                        ++skipped;
                    }
                }
    }

    const Execution execution = common.jobs > 1 ? Execution::with_threads(common.jobs) : Execution::serial();
    const std::vector<SweepRow> rows = verify_sweep(cells, a.rel_tol, a.tate, execution);

    std::int64_t passed = 0;
    std::int64_t numerical = 0;
    std::int64_t other = 0;
    json results = json::array();
    CsvTable table{{"kind", "p", "q", "t", "m", "n", "lambda", "family", "oracle_expectation", "target",
                    "functional_value", "tate_delta", "abs_bias", "rel_bias", "quad_abs_err_estimate", "pass",
                    "error"},
                   {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& row = rows[i];
        const FunctionalSpec& spec = row.cell.spec;
        json r;
        r["cell"] = i;
        r["spec"] = spec_json(spec);
        r["n"] = row.cell.n;
        r["lambda"] = row.cell.lambda;
        std::vector<std::string> csv{std::string(kind_name(spec.kind)), opt_num(spec.p), opt_num(spec.q),
                                     opt_num(spec.t), spec.m ? std::to_string(*spec.m) : "",
                                     std::to_string(row.cell.n), num(row.cell.lambda)};
        if (row.report) {
            const VerificationReport& rep = *row.report;
            const bool pass = rep.rel_bias < a.threshold;
            passed += pass ? 1 : 0;
            r["family"] = family_name(rep.estimator_family);
            r["oracle_expectation"] = rep.oracle_expectation;
            r["target"] = rep.target;
            r["functional_value"] = rep.functional_value;
            r["tate_delta"] = rep.target - rep.functional_value;
            r["abs_bias"] = rep.abs_bias;
            r["rel_bias"] = rep.rel_bias;
            r["quad_abs_err_estimate"] = rep.quad_abs_err_estimate;
            r["pass"] = pass;
            r["error"] = nullptr;
            for (const auto& v : {num(rep.oracle_expectation), num(rep.target), num(rep.functional_value),
                                  num(rep.target - rep.functional_value), num(rep.abs_bias), num(rep.rel_bias),
                                  num(rep.quad_abs_err_estimate)}) {
                csv.push_back(v);
            }
            csv.insert(csv.begin() + 7, std::string(family_name(rep.estimator_family)));
            csv.push_back(pass ? "true" : "false");
            csv.push_back("");
        } else {
            (row.numerical_failure ? numerical : other) += 1;
            err << "cell " << i << " (" << spec.describe() << ", n=" << row.cell.n
                << ", lambda=" << num(row.cell.lambda) << ") failed: " << row.failure << "\n";
            r["pass"] = false;
            r["error"] = row.failure;
            csv.push_back(a.tate ? "tate-biased" : "closed-form-unbiased");
            for (int k = 0; k < 7; ++k) csv.push_back("");
            csv.push_back("false");
            csv.push_back(row.failure);
        }
        results.push_back(std::move(r));
        table.rows.push_back(std::move(csv));
    }

    json parameters;
    parameters["tate"] = a.tate;
    parameters["kinds"] = a.kinds;
    parameters["n"] = a.n;
    parameters["lambda"] = a.lambda;
    parameters["p"] = a.p;
    parameters["q"] = a.q;
    parameters["t"] = a.t;
    parameters["m"] = a.m;
    parameters["rel_tol"] = a.rel_tol;
    parameters["threshold"] = a.threshold;

    json body;
    body["summary"] = {{"cells", rows.size()},
                       {"skipped_invalid", skipped},
                       {"passed", passed},
                       {"failed", static_cast<std::int64_t>(rows.size()) - passed},
                       {"numerical_failures", numerical}};
    body["rows"] = std::move(results);
    emit(common, manifest("verify", json(nullptr), std::nullopt, std::nullopt, common, parameters),
         std::move(body), std::move(table), out);

    if (numerical > 0) return kExitNumerical;
    if (other > 0) return kExitDomain;
    if (passed != static_cast<std::int64_t>(rows.size())) {
        err << (static_cast<std::int64_t>(rows.size()) - passed) << " cell(s) exceed the bias threshold "
            << num(a.threshold) << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

// ---- compare ----

struct CompareArgs {
    double p = 0.0;
    std::int64_t n = 0;
    double lambda = 0.0;
    std::int64_t reps = 100000;
    std::uint64_t seed = 0;
};

int cmd_compare(const CompareArgs& a, const CommonArgs& common, std::ostream& out) {
    const McConfig config = mc_config(a.reps, a.n, a.lambda, a.seed, common.jobs);
    const VarianceComparison c = variance_comparison(a.p, config);
    json parameters{{"p", a.p}, {"n", a.n}, {"lambda", a.lambda}, {"replications", a.reps}};
    json body;
    body["result"] = {{"closed_unbiased", c.closed_unbiased},
                      {"closed_mle", c.closed_mle},
                      {"empirical_unbiased", c.empirical_unbiased.variance},
                      {"empirical_mle", c.empirical_mle.variance},
                      {"empirical_unbiased_se", c.empirical_unbiased.variance_std_error},
                      {"empirical_mle_se", c.empirical_mle.variance_std_error},
                      {"unbiased_summary", summary_json(c.empirical_unbiased)},
                      {"mle_summary", summary_json(c.empirical_mle)}};
    CsvTable table{{"p", "n", "lambda", "replications", "closed_unbiased", "closed_mle", "empirical_unbiased",
                    "empirical_unbiased_se", "empirical_mle", "empirical_mle_se"},
                   {}};
    table.rows.push_back({num(a.p), std::to_string(a.n), num(a.lambda), std::to_string(a.reps),
                          num(c.closed_unbiased), num(c.closed_mle), num(c.empirical_unbiased.variance),
                          num(c.empirical_unbiased.variance_std_error), num(c.empirical_mle.variance),
                          num(c.empirical_mle.variance_std_error)});
    emit(common, manifest("compare", json{{"kind", "moment"}, {"p", a.p}}, std::nullopt, a.seed, common, parameters),
         std::move(body), std::move(table), out);
    return kExitOk;
}

// ---- clt ----

struct CltArgs {
    SpecArgs spec;
    std::int64_t n = 0;
    double lambda = 0.0;
    std::int64_t reps = 100000;
    std::uint64_t seed = 0;
    std::string hist;
    int bins = 40;
    double hist_range = 5.0;
};

int cmd_clt(const CltArgs& a, const CommonArgs& common, std::ostream& out) {
    const FunctionalSpec spec = build_spec(a.spec);
    const McConfig config = mc_config(a.reps, a.n, a.lambda, a.seed, common.jobs);
    const double sigma2 = asymptotic_variance(spec, a.n, a.lambda);
    const std::vector<double> z = clt_replicates(spec, config);
    const McSummary s = summarize(z, {.ks_against_normal = true, .standardized_moments = true});

    json parameters{{"n", a.n}, {"lambda", a.lambda}, {"replications", a.reps}};
    if (!a.hist.empty()) {
        const Histogram h = histogram(z, a.bins, -a.hist_range, a.hist_range);
        CsvTable hist{{"bin_lo", "bin_hi", "count"}, {}};
        for (std::size_t i = 0; i < h.counts.size(); ++i) {
            hist.rows.push_back({num(h.edges[i]), num(h.edges[i + 1]), std::to_string(h.counts[i])});
        }
        write_text(a.hist, hist.render(), out);
        parameters["hist"] = a.hist;
        parameters["bins"] = a.bins;
        parameters["hist_range"] = a.hist_range;
    }

    json body;
    json result = summary_json(s);
    result["asymptotic_variance"] = sigma2;
    result["target"] = target_value(spec, a.lambda);
    body["result"] = std::move(result);
    CsvTable table{{"kind", "n", "lambda", "replications", "mean", "variance", "std_error", "ks_statistic",
                    "skewness", "excess_kurtosis", "asymptotic_variance"},
                   {}};
    table.rows.push_back({std::string(kind_name(spec.kind)), std::to_string(a.n), num(a.lambda),
                          std::to_string(a.reps), num(s.mean), num(s.variance), num(s.std_error),
                          num(*s.ks_statistic), num(s.standardized_moments->first),
                          num(s.standardized_moments->second), num(sigma2)});
    emit(common, manifest("clt", spec_json(spec), std::nullopt, a.seed, common, parameters), std::move(body),
         std::move(table), out);
    return kExitOk;
}

// ---- transforms ----

int cmd_transforms(const CommonArgs& common, std::ostream& out) {
    json list = json::array();
    CsvTable table{{"name", "note"}, {}};
    for (const auto& e : builtin_registry()) {
        list.push_back({{"name", e.name}, {"note", e.note}});
        table.rows.push_back({e.name, e.note});
    }
    json body;
    body["transforms"] = std::move(list);
    emit(common, manifest("transforms", json(nullptr), std::nullopt, std::nullopt, common, json::object()),
         std::move(body), std::move(table), out);
    return kExitOk;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

Sample parse_data(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string raw;
    std::int64_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        double v = 0.0;
        const char* begin = line.data();
        const char* end = line.data() + line.size();
        if (*begin == '+') ++begin;
        const auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc{} || ptr != end) {
            throw InputError("line " + std::to_string(line_no) + ": not a number: '" + std::string(line) + "'");
        }
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InputError("line " + std::to_string(line_no) + ": observation must be finite and positive, got '" +
                             std::string(line) + "'");
        }
        values.push_back(v);
    }
    if (values.empty()) {
        throw InputError("data contains no observations");
    }
    return Sample(std::move(values));
}

Sample read_data_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw InputError("cannot read data file '" + path + "'");
    }
    std::ostringstream buf;
    buf << file.rdbuf();
    if (file.bad()) {
        throw InputError("error reading data file '" + path + "'");
    }
    return parse_data(buf.str());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Unbiased estimators for functionals of the exponential rate"};
    app.set_version_flag("--version", std::string(UEXP_VERSION));
    app.require_subcommand(1);
    app.fallthrough();

    CommonArgs common;
    app.add_option("--format", common.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--out", common.out, "output path, '-' for standard output")->capture_default_str();
    app.add_option("--jobs", common.jobs, "worker threads for grids and Monte Carlo")
        ->check(CLI::Range(1, 1024))
        ->capture_default_str();

    EstimateArgs est;
    auto* estimate_cmd = app.add_subcommand("estimate", "estimate a functional from a data file");
    add_spec_options(estimate_cmd, est.spec);
    estimate_cmd->add_option("--data", est.data, "observations, one per line")->required();
    estimate_cmd->add_option("--family", est.family, "estimator family")
        ->check(CLI::IsMember({"closed", "generic", "mle", "tate"}))
        ->capture_default_str();
    estimate_cmd->add_option("--method", est.method, "inversion method for --family generic")
        ->check(CLI::IsMember({"auto", "talbot", "gaver-stehfest", "convolution"}))
        ->capture_default_str();
    estimate_cmd->add_option("--gs-order", est.gs_order, "Gaver-Stehfest order")->capture_default_str();
    estimate_cmd->add_option("--talbot-nodes", est.talbot_nodes, "Talbot contour nodes")->capture_default_str();

    VerifyArgs ver;
    auto* verify_cmd = app.add_subcommand("verify", "certify unbiasedness by quadrature over a grid");
    verify_cmd->add_flag("--tate", ver.tate, "verify Tate's biased estimators against their expectations");
    verify_cmd->add_option("--kinds", ver.kinds, "kinds to include")->delimiter(',');
    verify_cmd->add_option("--n", ver.n, "sample sizes")->delimiter(',');
    verify_cmd->add_option("--lambda", ver.lambda, "true rates")->delimiter(',')->required();
    verify_cmd->add_option("--p", ver.p, "exponents / moment orders")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--q", ver.q, "quantile and shortfall levels")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--t", ver.t, "time points")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--m", ver.m, "max/min powers")->delimiter(',')->capture_default_str();
    verify_cmd->add_option("--rel-tol", ver.rel_tol, "quadrature relative tolerance")->capture_default_str();
    verify_cmd->add_option("--threshold", ver.threshold, "pass threshold on rel_bias")->capture_default_str();

    CompareArgs cmp;
    auto* compare_cmd = app.add_subcommand("compare", "unbiased vs MLE moment estimator variances");
    compare_cmd->add_option("--p", cmp.p, "moment order")->required();
    compare_cmd->add_option("--n", cmp.n, "sample size")->required();
    compare_cmd->add_option("--lambda", cmp.lambda, "true rate")->required();
    compare_cmd->add_option("--reps", cmp.reps, "replications")->capture_default_str();
    compare_cmd->add_option("--seed", cmp.seed, "RNG seed")->required();

    CltArgs clt;
    auto* clt_cmd = app.add_subcommand("clt", "normality of standardized estimates");
    add_spec_options(clt_cmd, clt.spec);
    clt_cmd->add_option("--n", clt.n, "sample size")->required();
    clt_cmd->add_option("--lambda", clt.lambda, "true rate")->required();
    clt_cmd->add_option("--reps", clt.reps, "replications")->capture_default_str();
    clt_cmd->add_option("--seed", clt.seed, "RNG seed")->required();
    clt_cmd->add_option("--hist", clt.hist, "write a histogram of Z to this CSV file");
    clt_cmd->add_option("--bins", clt.bins, "histogram bins")->check(CLI::Range(1, 100000))->capture_default_str();
    clt_cmd->add_option("--hist-range", clt.hist_range, "histogram covers [-r, r]")->capture_default_str();

    auto* transforms_cmd = app.add_subcommand("transforms", "list built-in transfer functions");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << UEXP_VERSION << "\n";
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (estimate_cmd->parsed()) return cmd_estimate(est, common, out);
        if (verify_cmd->parsed()) return cmd_verify(ver, common, out, err);
        if (compare_cmd->parsed()) return cmd_compare(cmp, common, out);
        if (clt_cmd->parsed()) return cmd_clt(clt, common, out);
        if (transforms_cmd->parsed()) return cmd_transforms(common, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const QuadratureError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const NumericalInversionError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const RangeError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        err << "domain error: " << e.what() << "\n";
        return kExitDomain;
    }
    err << "error: no command given\n";
    return kExitInput;
}

}  // namespace uexp::cli

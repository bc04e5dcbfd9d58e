#include "possys/system_io.hpp"

#include "possys/oracle.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

namespace possys {

using nlohmann::json;

std::uint64_t fnv1a_hash(const std::string& bytes) {
    return detail::fnv1a(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size());
}

std::string hash_hex(std::uint64_t hash) {
    static const char* digits = "0123456789abcdef";
    std::string out = "fnv1a:";
    for (int shift = 60; shift >= 0; shift -= 4) out.push_back(digits[(hash >> shift) & 0xf]);
    return out;
}

std::optional<NormKind> parse_norm(const std::string& name) {
    if (name == "one") return NormKind::One;
    if (name == "inf") return NormKind::Inf;
    if (name == "frobenius") return NormKind::Frobenius;
    return std::nullopt;
}

std::optional<Direction> parse_direction(const std::string& name) {
    if (name == "max") return Direction::Max;
    if (name == "min") return Direction::Min;
    return std::nullopt;
}

std::optional<MonotoneObjective> parse_objective(const std::string& name) {
    if (name == "l1") return MonotoneObjective::l1();
    if (name == "l2") return MonotoneObjective::l2();
    if (name == "linf") return MonotoneObjective::linf();
    return std::nullopt;
}

Vec parse_vector_arg(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw Error(Errc::ValidationError, "cannot parse '" + item + "' as a number in vector '" + text + "'");
        }
    }
    if (values.empty()) throw Error(Errc::ValidationError, "vector argument '" + text + "' is empty");
    Vec x(static_cast<Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) x(static_cast<Index>(i)) = values[i];
    return x;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

double require_number(const json& node, const std::string& context) {
    if (!node.is_number()) {
        throw ValidationErrorAt(context, "expected a number, got " + std::string(node.type_name()));
    }
    return node.get<double>();
}

Mat parse_matrix(const json& node, const std::string& context) {
    if (!node.is_array() || node.empty()) {
        throw ValidationErrorAt(context, "a matrix must be a non-empty array of rows");
    }
    const std::size_t rows = node.size();
    std::size_t cols = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (!node[i].is_array() || node[i].empty()) {
            throw ValidationErrorAt(context, "row " + std::to_string(i) + " must be a non-empty array of numbers");
        }
        if (i == 0) cols = node[i].size();
        if (node[i].size() != cols) {
            throw ValidationErrorAt(context, "row " + std::to_string(i) + " has length " +
                                                 std::to_string(node[i].size()) + ", expected " +
                                                 std::to_string(cols));
        }
    }
    Mat m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Index>(i), static_cast<Index>(j)) =
                require_number(node[i][j], context + ", entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
        }
    }
    return m;
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixSet parse_block(const std::string& name, const json& node) {
    if (!node.is_object()) throw ValidationErrorAt(name, "a block must be an object");
    const std::string kind = node.value("kind", "");
    const std::string mode_name = node.value("mode", "");
    Mode mode;
    if (mode_name == "positive") {
        mode = Mode::Positive;
    } else if (mode_name == "non-negative") {
        mode = Mode::NonNegative;
    } else {
        throw ValidationErrorAt(name, "mode must be 'positive' or 'non-negative'");
    }
    try {
        if (kind == "explicit" || kind == "ordered") {
            if (!node.contains("matrices") || !node["matrices"].is_array() || node["matrices"].empty()) {
                throw ValidationErrorAt(name, "'" + kind + "' blocks need a non-empty 'matrices' array");
            }
            std::vector<Mat> matrices;
            for (std::size_t k = 0; k < node["matrices"].size(); ++k) {
                matrices.push_back(parse_matrix(node["matrices"][k], name + ", matrix " + std::to_string(k)));
            }
            return kind == "explicit" ? make_explicit(std::move(matrices), mode)
                                      : make_ordered(std::move(matrices), mode);
        }
        if (kind == "iru") {
            if (!node.contains("rows") || !node["rows"].is_array() || node["rows"].empty()) {
                throw ValidationErrorAt(name, "'iru' blocks need a non-empty 'rows' array of row sets");
            }
            std::vector<std::vector<RowVec>> row_sets;
            for (std::size_t i = 0; i < node["rows"].size(); ++i) {
                const json& options = node["rows"][i];
                if (!options.is_array() || options.empty()) {
                    throw ValidationErrorAt(name, "row set " + std::to_string(i) + " must be a non-empty array");
                }
                std::vector<RowVec> parsed;
                for (std::size_t j = 0; j < options.size(); ++j) {
                    const json& option = options[j];
                    const std::string context =
                        name + ", row set " + std::to_string(i) + ", option " + std::to_string(j);
                    if (!option.is_array() || option.empty()) {
                        throw ValidationErrorAt(name, context + " must be a non-empty array of numbers");
                    }
                    RowVec r(static_cast<Index>(option.size()));
                    for (std::size_t c = 0; c < option.size(); ++c) {
                        r(static_cast<Index>(c)) = require_number(option[c], context);
                    }
                    parsed.push_back(std::move(r));
                }
                row_sets.push_back(std::move(parsed));
            }
            return make_iru(std::move(row_sets), mode);
        }
    } catch (const ValidationErrorAt&) {
        throw;
    } catch (const Error& e) {
        throw ValidationErrorAt(name, e.what());
    }
    throw ValidationErrorAt(name, "kind must be 'explicit', 'iru' or 'ordered'");
}

json block_to_json(const MatrixSet& set) {
    json node;
    node["kind"] = to_string(set.kind());
    node["mode"] = to_string(set.mode());
    if (set.kind() == SetKind::Iru) {
        json row_sets = json::array();
        for (const auto& options : set.row_sets()) {
            json parsed = json::array();
            for (const RowVec& r : options) {
                json row = json::array();
                for (Index c = 0; c < r.cols(); ++c) row.push_back(r(c));
                parsed.push_back(std::move(row));
            }
            row_sets.push_back(std::move(parsed));
        }
        node["rows"] = std::move(row_sets);
    } else {
        json matrices = json::array();
        for (const Mat& m : set.members()) matrices.push_back(matrix_to_json(m));
        node["matrices"] = std::move(matrices);
    }
    return node;
}

bool is_graph_op(const std::string& op) { return op == "edge" || op == "series" || op == "parallel"; }

std::string node_op(const json& node) {
    if (!node.is_object() || !node.contains("op") || !node["op"].is_string()) {
        throw ValidationErrorAt("composition", "every composition node needs a string 'op' field");
    }
    return node["op"].get<std::string>();
}

std::string require_block_field(const json& node, const std::string& op) {
    if (!node.contains("block") || !node["block"].is_string()) {
        throw ValidationErrorAt("composition", "'" + op + "' nodes need a string 'block' field");
    }
    return node["block"].get<std::string>();
}

std::pair<CompositionExpr, json> parse_expr_node(const json& node) {
    const std::string op = node_op(node);
    if (is_graph_op(op)) {
        throw ValidationErrorAt("composition",
                                "graph operator '" + op + "' cannot appear inside an expression tree");
    }
    json canonical;
    canonical["op"] = op;
    if (op == "ref") {
        const std::string block = require_block_field(node, op);
        canonical["block"] = block;
        return {CompositionExpr::ref(block), std::move(canonical)};
    }
    if (op == "add" || op == "mul") {
        if (!node.contains("args") || !node["args"].is_array() || node["args"].size() != 2) {
            throw ValidationErrorAt("composition", "'" + op + "' nodes need an 'args' array of exactly two nodes");
        }
        auto [left, left_json] = parse_expr_node(node["args"][0]);
        auto [right, right_json] = parse_expr_node(node["args"][1]);
        canonical["args"] = json::array({std::move(left_json), std::move(right_json)});
        return {op == "add" ? CompositionExpr::add(left, right) : CompositionExpr::mul(left, right),
                std::move(canonical)};
    }
    if (op == "scale") {
        if (!node.contains("factor")) {
            throw ValidationErrorAt("composition", "'scale' nodes need a 'factor' field");
        }
        const double factor = require_number(node["factor"], "composition scale factor");
        if (!node.contains("arg")) throw ValidationErrorAt("composition", "'scale' nodes need an 'arg' node");
        auto [child, child_json] = parse_expr_node(node["arg"]);
        canonical["factor"] = factor;
        canonical["arg"] = std::move(child_json);
        try {
            return {CompositionExpr::scaled(factor, child), std::move(canonical)};
        } catch (const Error& e) {
            throw ValidationErrorAt("composition", e.what());
        }
    }
    throw ValidationErrorAt("composition", "unknown composition operator '" + op + "'");
}

std::pair<BlockGraph, json> parse_graph_node(const json& node) {
    const std::string op = node_op(node);
    if (!is_graph_op(op)) {
        throw ValidationErrorAt("composition",
                                "expression operator '" + op + "' cannot appear inside a series-parallel graph");
    }
    json canonical;
    canonical["op"] = op;
    if (op == "edge") {
        const std::string block = require_block_field(node, op);
        canonical["block"] = block;
        return {BlockGraph::edge(block), std::move(canonical)};
    }
    if (!node.contains("parts") || !node["parts"].is_array() || node["parts"].empty()) {
        throw ValidationErrorAt("composition", "'" + op + "' nodes need a non-empty 'parts' array");
    }
    std::vector<BlockGraph> parts;
    json parts_json = json::array();
    for (const json& part : node["parts"]) {
        auto [graph, part_json] = parse_graph_node(part);
        parts.push_back(std::move(graph));
        parts_json.push_back(std::move(part_json));
    }
    canonical["parts"] = std::move(parts_json);
    return {op == "series" ? BlockGraph::series(std::move(parts)) : BlockGraph::parallel(std::move(parts)),
            std::move(canonical)};
}

}  // namespace

SystemDescription parse_system_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_col(text, e.byte);
        throw ParseErrorAt(line, column, e.what());
    }
    if (!doc.is_object()) throw ValidationErrorAt("document", "the top level must be an object");
    if (!doc.contains("version") || !doc["version"].is_number_integer() ||
        doc["version"].get<int>() != kFormatVersion) {
        throw ValidationErrorAt("document", "'version' must be the integer " + std::to_string(kFormatVersion));
    }
    if (!doc.contains("blocks") || !doc["blocks"].is_object() || doc["blocks"].empty()) {
        throw ValidationErrorAt("document", "'blocks' must be a non-empty object of named blocks");
    }
    if (!doc.contains("composition")) {
        throw ValidationErrorAt("document", "'composition' is required");
    }

    BlockEnv blocks;
    json blocks_json;
    for (const auto& [name, node] : doc["blocks"].items()) {
        MatrixSet set = parse_block(name, node);
        blocks_json[name] = block_to_json(set);
        blocks.insert({name, std::move(set)});
    }

    const json& comp = doc["composition"];
    const std::string root_op = node_op(comp);
    CompositionExpr expr = CompositionExpr::ref("");
    json comp_json;
    if (is_graph_op(root_op)) {
        auto [graph, canonical] = parse_graph_node(comp);
        expr = compile_graph(graph);
        comp_json = std::move(canonical);
    } else {
        auto [parsed, canonical] = parse_expr_node(comp);
        expr = parsed;
        comp_json = std::move(canonical);
    }

    try {
        expr_dims(expr, blocks);
    } catch (const DimMismatchError& e) {
        throw ValidationErrorAt(e.left + ", " + e.right, e.what());
    } catch (const Error& e) {
        throw ValidationErrorAt("composition", e.what());
    }

    json canonical_doc;
    canonical_doc["version"] = kFormatVersion;
    canonical_doc["blocks"] = std::move(blocks_json);
    canonical_doc["composition"] = std::move(comp_json);

    SystemDescription description{kFormatVersion, std::move(blocks), std::move(expr),
                                  canonical_doc.dump(2) + "\n", fnv1a_hash(text)};
    return description;
}

SystemDescription parse_system(const std::string& path) {
    std::ifstream stream(path, std::ios::binary);
    if (!stream) throw Error(Errc::ParseError, "cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << stream.rdbuf();
    return parse_system_text(buffer.str());
}

std::string serialize_system(const SystemDescription& description) { return description.canonical; }

// ---------------------------------------------------------------------------
// Verification orchestration
// ---------------------------------------------------------------------------

VerifyReport run_verification(const MatrixSet& set, const VerifyOptions& opts) {
    VerifyReport report;
    AnalyzeOptions aopts;
    aopts.enum_limit = opts.enum_limit;
    aopts.hourglass_samples = opts.hourglass_samples;
    aopts.seed = opts.seed;
    report.analysis = analyze(set, aopts);
    const double rho_max = report.analysis.rho_max;
    const double rho_min = report.analysis.rho_min;
    const double attain_tol = 1e-8 * std::max(1.0, std::abs(rho_max));

    report.extrema_consistent = true;
    for (int depth = 1; depth <= opts.max_depth; ++depth) {
        DepthCheck check;
        check.bounds = product_bounds(set, depth, opts.norm, opts.budget);
        check.jsr_within = check.bounds.jsr_lower <= rho_max + 1e-8;
        check.lsr_within = check.bounds.lsr_upper >= rho_min - 1e-8;
        check.max_attained = std::abs(check.bounds.jsr_lower - rho_max) <= attain_tol;
        check.min_attained = std::abs(check.bounds.lsr_upper - rho_min) <= attain_tol;
        report.extrema_consistent = report.extrema_consistent && check.jsr_within && check.lsr_within &&
                                   check.max_attained && check.min_attained;
        report.depth_checks.push_back(check);
    }

    std::mt19937_64 rng(opts.seed ^ 0x9e3779b97f4a7c15ull);
    const SetCardinality card = set.cardinality();
    int max_steps = 1;
    while (max_steps < 5) {
        std::uint64_t count = 0;
        if (card.overflow || !detail::sequence_count_within(card.value, max_steps + 1, opts.budget, count)) break;
        ++max_steps;
    }
    report.greedy_consistent = true;
    const MonotoneObjective objectives[] = {MonotoneObjective::l1(), MonotoneObjective::l2(),
                                            MonotoneObjective::linf()};
    for (int t = 0; t < opts.trials; ++t) {
        const int steps = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_steps));
        const Vec x0 = detail::log_uniform_vector(rng, set.cols());
        const Direction dir = (rng() % 2 == 0) ? Direction::Max : Direction::Min;
        bool no_dominant = false;
        TrajectoryResult greedy;
        try {
            TrajectoryOptions topts;
            topts.enum_limit = opts.enum_limit;
            greedy = greedy_trajectory(set, x0, steps, dir, topts);
        } catch (const NoDominantMatrixError&) {
            no_dominant = true;
        }
        for (const MonotoneObjective& obj : objectives) {
            TrajectoryTrial trial;
            trial.steps = steps;
            trial.direction = dir;
            trial.objective = obj.name();
            trial.no_dominant = no_dominant;
            if (!no_dominant) {
                trial.greedy_value = evaluate_objective(greedy, obj).values.back();
                trial.exhaustive_value = exhaustive_extremum(set, x0, steps, obj, dir, opts.budget).best_value;
                trial.agree = std::abs(trial.greedy_value - trial.exhaustive_value) <=
                              1e-9 * std::max(1.0, std::abs(trial.exhaustive_value));
            }
            report.greedy_consistent = report.greedy_consistent && trial.agree && !trial.no_dominant;
            report.trials.push_back(std::move(trial));
        }
    }

    const bool consistent = report.extrema_consistent && report.greedy_consistent;
    report.expected_for_non_h = !consistent && report.analysis.hset_status == HsetStatus::Falsified;
    report.pass = consistent || report.expected_for_non_h;
    return report;
}

// ---------------------------------------------------------------------------
// Report documents
// ---------------------------------------------------------------------------

namespace {

json vec_to_json(const Vec& x) {
    json out = json::array();
    for (Index i = 0; i < x.size(); ++i) out.push_back(x(i));
    return out;
}

json bounds_to_json(const BoundReport& bounds) {
    json j;
    j["depth"] = bounds.depth;
    j["jsr_lower"] = bounds.jsr_lower;
    j["jsr_upper"] = bounds.jsr_upper;
    j["lsr_upper"] = bounds.lsr_upper;
    j["norm"] = to_string(bounds.norm);
    return j;
}

json analysis_to_json(const AnalysisReport& report) {
    json j;
    if (report.cardinality.overflow) {
        j["cardinality"] = "overflow";
    } else {
        j["cardinality"] = report.cardinality.value;
    }
    j["rho_max"] = report.rho_max;
    j["rho_max_witness"] = report.rho_max_witness;
    j["rho_min"] = report.rho_min;
    j["rho_min_witness"] = report.rho_min_witness;
    j["stable"] = report.stable;
    j["stabilizable"] = report.stabilizable;
    j["hset_status"] = to_string(report.hset_status);
    j["verdict_basis"] = to_string(report.basis);
    if (report.hset_witness) {
        j["hset_witness"] = {{"x", vec_to_json(report.hset_witness->x)},
                             {"member", report.hset_witness->member},
                             {"axiom", to_string(report.hset_witness->axiom)}};
    }
    if (report.oracle_bounds) j["oracle_bounds"] = bounds_to_json(*report.oracle_bounds);
    if (report.greedy) {
        j["greedy"] = {{"value_max", report.greedy->value_max},
                       {"value_min", report.greedy->value_min},
                       {"validated", report.greedy->validated}};
    }
    return j;
}

json envelope(const DocumentMeta& meta) {
    json doc;
    doc["command"] = meta.command;
    doc["input"] = {{"hash", hash_hex(meta.input_hash)}};
    doc["seed"] = meta.seed;
    doc["tool"] = {{"name", "possys"}, {"version", kToolVersion}};
    return doc;
}

std::string finish(json doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string render_analysis_document(const DocumentMeta& meta, const AnalyzeOptions& opts,
                                     const AnalysisReport& report) {
    json doc = envelope(meta);
    doc["options"] = {{"oracle_depth", opts.oracle_depth},
                      {"norm", to_string(opts.norm)},
                      {"samples", opts.hourglass_samples},
                      {"greedy", opts.use_greedy},
                      {"limit", opts.enum_limit}};
    doc["report"] = analysis_to_json(report);
    return finish(std::move(doc));
}

std::string render_trajectory_document(const DocumentMeta& meta, const TrajectoryResult& result,
                                       const std::optional<StabilizationReport>& stabilization) {
    json doc = envelope(meta);
    doc["options"] = {{"steps", result.steps},
                      {"direction", to_string(result.direction)},
                      {"renormalized", result.renormalized}};
    json traj;
    traj["chosen"] = result.chosen;
    json states = json::array();
    for (const Vec& x : result.states) states.push_back(vec_to_json(x));
    traj["states"] = std::move(states);
    traj["log_scales"] = result.log_scales;
    json objectives;
    for (const ObjectiveTrace& trace : result.objectives) objectives[trace.objective.name()] = trace.values;
    traj["objectives"] = std::move(objectives);
    traj["selection_passes"] = result.selection_passes;
    traj["nu_evaluations"] = result.nu_evaluations;
    if (stabilization) {
        traj["stabilization"] = {{"rho_min", stabilization->rho_min},
                                 {"rho_min_witness", stabilization->rho_min_witness},
                                 {"stabilizable", stabilization->stabilizable},
                                 {"decay_rate_l1", stabilization->decay_rate_l1}};
    }
    doc["report"] = std::move(traj);
    return finish(std::move(doc));
}

std::string render_hourglass_document(const DocumentMeta& meta, std::uint64_t samples_requested,
                                      const HourglassVerdict& verdict) {
    json doc = envelope(meta);
    doc["options"] = {{"samples", samples_requested}};
    json j;
    j["pass"] = verdict.pass;
    j["samples_tested"] = verdict.samples_tested;
    if (verdict.witness) {
        j["witness"] = {{"x", vec_to_json(verdict.witness->x)},
                        {"member", verdict.witness->member},
                        {"axiom", to_string(verdict.witness->axiom)}};
    }
    doc["report"] = std::move(j);
    return finish(std::move(doc));
}

std::string render_verify_document(const DocumentMeta& meta, const VerifyOptions& opts,
                                   const VerifyReport& report) {
    json doc = envelope(meta);
    doc["options"] = {{"max_depth", opts.max_depth},
                      {"trials", opts.trials},
                      {"norm", to_string(opts.norm)},
                      {"budget", opts.budget},
                      {"samples", opts.hourglass_samples}};
    json j;
    j["analysis"] = analysis_to_json(report.analysis);
    json depths = json::array();
    for (const DepthCheck& check : report.depth_checks) {
        json d = bounds_to_json(check.bounds);
        d["jsr_within"] = check.jsr_within;
        d["lsr_within"] = check.lsr_within;
        d["max_attained"] = check.max_attained;
        d["min_attained"] = check.min_attained;
        depths.push_back(std::move(d));
    }
    j["depth_checks"] = std::move(depths);
    json trials = json::array();
    for (const TrajectoryTrial& trial : report.trials) {
        trials.push_back({{"steps", trial.steps},
                          {"direction", to_string(trial.direction)},
                          {"objective", trial.objective},
                          {"greedy", trial.greedy_value},
                          {"exhaustive", trial.exhaustive_value},
                          {"agree", trial.agree},
                          {"no_dominant", trial.no_dominant}});
    }
    j["trials"] = std::move(trials);
    j["extrema_consistent"] = report.extrema_consistent;
    j["greedy_consistent"] = report.greedy_consistent;
    j["expected_for_non_h"] = report.expected_for_non_h;
    j["pass"] = report.pass;
    doc["report"] = std::move(j);
    return finish(std::move(doc));
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace {

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case Errc::CardinalityOverflow:
        case Errc::BudgetExceeded:
        case Errc::NoConvergence:
            return 3;
        case Errc::NoDominantMatrix:
            return 4;
        default:
            return 2;
    }
}

}  // namespace

int cmd_analyze(const std::string& path, const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const auto norm = parse_norm(args.norm);
        if (!norm) {
            err << "unknown norm '" << args.norm << "' (expected one|inf|frobenius)\n";
            return 2;
        }
        const SystemDescription sys = parse_system(path);
        const MatrixSet set = eval_poly(sys.composition, sys.blocks, args.limit);
        AnalyzeOptions opts;
        opts.enum_limit = args.limit;
        opts.oracle_depth = args.oracle_depth;
        opts.norm = *norm;
        opts.hourglass_samples = args.samples;
        opts.seed = args.seed;
        opts.use_greedy = args.greedy;
        opts.product_budget = args.budget;
        for (const std::string& w : args.forced_witnesses) {
            opts.hourglass_forced_samples.push_back(parse_vector_arg(w));
        }
        const AnalysisReport report = analyze(set, opts);
        out << render_analysis_document({"analyze", sys.input_hash, args.seed}, opts, report);
        return 0;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    }
}

int cmd_trajectory(const std::string& path, const TrajectoryArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const Vec x0 = parse_vector_arg(args.x0);
        if ((x0.array() <= 0.0).any()) {
            err << "x0 must be strictly positive\n";
            return 2;
        }
        if (args.steps < 1) {
            err << "--steps must be at least 1\n";
            return 2;
        }
        const auto direction = parse_direction(args.direction);
        if (!direction) {
            err << "unknown direction '" << args.direction << "' (expected max|min)\n";
            return 2;
        }
        std::vector<MonotoneObjective> objectives;
        {
            std::stringstream stream(args.nu);
            std::string item;
            while (std::getline(stream, item, ',')) {
                const auto obj = parse_objective(item);
                if (!obj) {
                    err << "unknown objective '" << item << "' (expected l1|l2|linf)\n";
                    return 2;
                }
                objectives.push_back(*obj);
            }
        }
        const SystemDescription sys = parse_system(path);
        const MatrixSet set = eval_poly(sys.composition, sys.blocks, args.limit);
        TrajectoryOptions topts;
        topts.renormalize = args.renormalize;
        topts.enum_limit = args.limit;

        std::optional<StabilizationReport> stabilization;
        TrajectoryResult result;
        if (*direction == Direction::Min) {
            stabilization = stabilizing_sequence(set, x0, args.steps, topts);
            result = stabilization->trajectory;
        } else {
            result = greedy_trajectory(set, x0, args.steps, *direction, topts);
        }
        for (const MonotoneObjective& obj : objectives) {
            bool already = false;
            for (const ObjectiveTrace& trace : result.objectives) {
                if (std::string(trace.objective.name()) == obj.name()) already = true;
            }
            if (!already) evaluate_objective(result, obj);
        }
        out << render_trajectory_document({"trajectory", sys.input_hash, args.seed}, result, stabilization);
        return 0;
    } catch (const NoDominantMatrixError& e) {
        err << e.what() << "\nwitness state:";
        for (Index i = 0; i < e.x.size(); ++i) err << ' ' << e.x(i);
        err << '\n';
        return 4;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    }
}

int cmd_verify(const std::string& path, const VerifyArgs& args, std::ostream& out, std::ostream& err) {
    try {
        const auto norm = parse_norm(args.norm);
        if (!norm) {
            err << "unknown norm '" << args.norm << "' (expected one|inf|frobenius)\n";
            return 2;
        }
        if (args.max_depth < 1) {
            err << "--max-depth must be at least 1\n";
            return 2;
        }
        const SystemDescription sys = parse_system(path);
        const MatrixSet set = eval_poly(sys.composition, sys.blocks, args.limit);
        VerifyOptions opts;
        opts.max_depth = args.max_depth;
        opts.trials = args.trials;
        opts.seed = args.seed;
        opts.norm = *norm;
        opts.budget = args.budget;
        opts.enum_limit = args.limit;
        opts.hourglass_samples = args.samples;
        const VerifyReport report = run_verification(set, opts);
        out << render_verify_document({"verify", sys.input_hash, args.seed}, opts, report);
        return 0;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    }
}

int cmd_hourglass(const std::string& path, const HourglassArgs& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.samples < 1) {
            err << "at least one sample is required\n";
            return 2;
        }
        const SystemDescription sys = parse_system(path);
        const MatrixSet set = eval_poly(sys.composition, sys.blocks, args.limit);
        std::vector<Vec> forced;
        for (const std::string& w : args.include_witness) forced.push_back(parse_vector_arg(w));
        const HourglassVerdict verdict = check_hourglass(set, args.samples, args.seed, forced, args.limit);
        out << render_hourglass_document({"hourglass", sys.input_hash, args.seed}, args.samples, verdict);
        return 0;
    } catch (const Error& e) {
        err << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace possys

// SPDX-FileCopyrightText: 2026 hmflow contributors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hmflow/expression.hpp"
#include "hmflow/scenario.hpp"

namespace hmf {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// TOML-lite: [section] headers, key = value, strings, numbers, booleans and
// (possibly nested) arrays; '#' comments; arrays may span lines.
// ---------------------------------------------------------------------------

struct TomlValue {
    enum class Kind { str, num, boolean, array };
    Kind kind = Kind::str;
    std::string s;
    double d = 0.0;
    bool b = false;
    std::vector<TomlValue> items;
    int line = 0, col = 0;
};

struct TomlSection {
    std::string name;
    int line = 0;
    std::vector<std::pair<std::string, TomlValue>> values;

    const TomlValue* find(const std::string& key) const {
        for (const auto& [k, v] : values)
            if (k == key) return &v;
        return nullptr;
    }
};

struct TomlDoc {
    std::vector<TomlSection> sections;

    const TomlSection* find(const std::string& name) const {
        for (const auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

struct TomlParser {
    const std::string& text;
    const std::string& origin;
    size_t pos = 0;
    int line = 1, col = 1;
    std::vector<ConfigIssue>& issues;

    char peek() const { return pos < text.size() ? text[pos] : '\0'; }
    char get() {
        char c = text[pos++];
        if (c == '\n') {
            line++;
            col = 1;
        } else {
            col++;
        }
        return c;
    }
    bool done() const { return pos >= text.size(); }

    void syntax(const std::string& msg) { issues.push_back({"", msg, line, col}); }

    void skip_inline_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t')) get();
    }
    void skip_ws_and_comments() {
        for (;;) {
            skip_inline_ws();
            if (!done() && peek() == '#') {
                while (!done() && peek() != '\n') get();
            }
            if (!done() && (peek() == '\n' || peek() == '\r')) {
                get();
                continue;
            }
            return;
        }
    }

    std::string read_bare_token() {
        std::string out;
        while (!done() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                           peek() == '-' || peek() == '.' || peek() == '+'))
            out.push_back(get());
        return out;
    }

    bool parse_value(TomlValue& out) {
        skip_inline_ws();
        out.line = line;
        out.col = col;
        if (done()) {
            syntax("expected a value");
            return false;
        }
        char c = peek();
        if (c == '"') {
            get();
            std::string s;
            while (!done() && peek() != '"' && peek() != '\n') {
                char ch = get();
                if (ch == '\\' && !done()) {
                    char esc = get();
                    if (esc == 'n')
                        s.push_back('\n');
                    else if (esc == 't')
                        s.push_back('\t');
                    else
                        s.push_back(esc);
                } else {
                    s.push_back(ch);
                }
            }
            if (done() || peek() != '"') {
                syntax("unterminated string");
                return false;
            }
            get();
            out.kind = TomlValue::Kind::str;
            out.s = std::move(s);
            return true;
        }
        if (c == '[') {
            get();
            out.kind = TomlValue::Kind::array;
            skip_ws_and_comments();
            if (!done() && peek() == ']') {
                get();
                return true;
            }
            for (;;) {
                TomlValue item;
                if (!parse_value(item)) return false;
                out.items.push_back(std::move(item));
                skip_ws_and_comments();
                if (!done() && peek() == ',') {
                    get();
                    skip_ws_and_comments();
                    if (!done() && peek() == ']') { // trailing comma
                        get();
                        return true;
                    }
                    continue;
                }
                if (!done() && peek() == ']') {
                    get();
                    return true;
                }
                syntax("expected ',' or ']' in array");
                return false;
            }
        }
        std::string tok = read_bare_token();
        if (tok.empty()) {
            syntax(std::string("unexpected character '") + c + "'");
            return false;
        }
        if (tok == "true" || tok == "false") {
            out.kind = TomlValue::Kind::boolean;
            out.b = (tok == "true");
            return true;
        }
        try {
            size_t endp = 0;
            double v = std::stod(tok, &endp);
            if (endp != tok.size()) throw std::invalid_argument(tok);
            out.kind = TomlValue::Kind::num;
            out.d = v;
            return true;
        } catch (const std::exception&) {
            syntax("cannot parse value '" + tok + "'");
            return false;
        }
    }

    TomlDoc parse() {
        TomlDoc doc;
        TomlSection* current = nullptr;
        for (;;) {
            skip_ws_and_comments();
            if (done()) break;
            if (peek() == '[') {
                get();
                int at_line = line;
                std::string name;
                while (!done() && peek() != ']' && peek() != '\n') name.push_back(get());
                if (done() || peek() != ']') {
                    syntax("unterminated section header");
                    break;
                }
                get();
                doc.sections.push_back(TomlSection{name, at_line, {}});
                current = &doc.sections.back();
                continue;
            }
            int key_line = line, key_col = col;
            std::string key = read_bare_token();
            if (key.empty()) {
                syntax(std::string("unexpected character '") + peek() + "'");
                break;
            }
            skip_inline_ws();
            if (done() || peek() != '=') {
                issues.push_back({"", "expected '=' after key '" + key + "'", key_line, key_col});
                break;
            }
            get();
            TomlValue value;
            if (!parse_value(value)) break;
            if (!current) {
                issues.push_back({"", "key '" + key + "' appears before any [section]", key_line, key_col});
                break;
            }
            current->values.emplace_back(key, std::move(value));
        }
        return doc;
    }
};

// ---------------------------------------------------------------------------
// typed readers collecting issues
// ---------------------------------------------------------------------------

struct Reader {
    const TomlDoc& doc;
    std::vector<ConfigIssue>& issues;

    void issue(const std::string& path, const std::string& msg, const TomlValue* v = nullptr) {
        issues.push_back({path, msg, v ? v->line : 0, v ? v->col : 0});
    }

    const TomlValue* lookup(const std::string& section, const std::string& key) {
        const TomlSection* s = doc.find(section);
        if (!s) return nullptr;
        return s->find(key);
    }

    std::string str(const std::string& section, const std::string& key, std::string fallback) {
        const TomlValue* v = lookup(section, key);
        if (!v) return fallback;
        if (v->kind != TomlValue::Kind::str) {
            issue(section + "." + key, "expected a string", v);
            return fallback;
        }
        return v->s;
    }
    double num(const std::string& section, const std::string& key, double fallback) {
        const TomlValue* v = lookup(section, key);
        if (!v) return fallback;
        if (v->kind != TomlValue::Kind::num) {
            issue(section + "." + key, "expected a number", v);
            return fallback;
        }
        return v->d;
    }
    int integer(const std::string& section, const std::string& key, int fallback) {
        const TomlValue* v = lookup(section, key);
        if (!v) return fallback;
        if (v->kind != TomlValue::Kind::num || v->d != std::floor(v->d)) {
            issue(section + "." + key, "expected an integer", v);
            return fallback;
        }
        return static_cast<int>(v->d);
    }
    std::vector<double> num_list(const std::string& section, const std::string& key) {
        std::vector<double> out;
        const TomlValue* v = lookup(section, key);
        if (!v) return out;
        if (v->kind != TomlValue::Kind::array) {
            issue(section + "." + key, "expected an array of numbers", v);
            return out;
        }
        for (size_t i = 0; i < v->items.size(); ++i) {
            if (v->items[i].kind != TomlValue::Kind::num) {
                issue(section + "." + key + "[" + std::to_string(i) + "]", "expected a number",
                      &v->items[i]);
                continue;
            }
            out.push_back(v->items[i].d);
        }
        return out;
    }
    std::vector<std::string> str_list(const std::string& section, const std::string& key) {
        std::vector<std::string> out;
        const TomlValue* v = lookup(section, key);
        if (!v) return out;
        if (v->kind != TomlValue::Kind::array) {
            issue(section + "." + key, "expected an array of strings", v);
            return out;
        }
        for (size_t i = 0; i < v->items.size(); ++i) {
            if (v->items[i].kind != TomlValue::Kind::str) {
                issue(section + "." + key + "[" + std::to_string(i) + "]", "expected a string",
                      &v->items[i]);
                continue;
            }
            out.push_back(v->items[i].s);
        }
        return out;
    }
    std::vector<TreeEdgeSpec> edge_list(const std::string& section, const std::string& key) {
        std::vector<TreeEdgeSpec> out;
        const TomlValue* v = lookup(section, key);
        if (!v) return out;
        if (v->kind != TomlValue::Kind::array) {
            issue(section + "." + key, "expected an array of [a, b, length] triples", v);
            return out;
        }
        for (size_t i = 0; i < v->items.size(); ++i) {
            const TomlValue& item = v->items[i];
            std::string path = section + "." + key + "[" + std::to_string(i) + "]";
            if (item.kind != TomlValue::Kind::array || item.items.size() != 3 ||
                item.items[0].kind != TomlValue::Kind::str ||
                item.items[1].kind != TomlValue::Kind::str ||
                item.items[2].kind != TomlValue::Kind::num) {
                issue(path, "expected [\"a\", \"b\", length]", &item);
                continue;
            }
            out.push_back({item.items[0].s, item.items[1].s, item.items[2].d});
        }
        return out;
    }
};

MapSpec read_map_spec(Reader& r, const std::string& section, const std::string& fallback_preset) {
    MapSpec spec;
    spec.preset = r.str(section, "preset", fallback_preset);
    spec.value = r.str(section, "value", "");
    spec.table = r.str_list(section, "table");
    spec.exprs = r.str_list(section, "exprs");
    spec.amplitude = r.num(section, "amplitude", 1.0);
    spec.k = r.num(section, "k", 1.0);
    spec.phase = r.num(section, "phase", 0.0);
    spec.offset = r.num(section, "offset", 0.0);
    spec.radius = r.num(section, "radius", 1.0);
    spec.center = r.str(section, "center", "");
    return spec;
}

const std::vector<std::string>& known_presets() {
    static const std::vector<std::string> names{"constant", "table",       "expression",  "coordinate",
                                                "fourier",  "circle",      "tripod-wave", "random-ball",
                                                "from-initial", "none"};
    return names;
}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{
        "energy-monotone", "evi",           "confinement",          "contraction",
        "resolvent-minimality", "oracle-euclidean", "semigroup",    "r-bound",
        "phi-interpolation",    "subsolution",      "distance-subsolution", "lip",
        "mean-value",           "hj",               "bochner",      "ks-profile"};
    return names;
}

void validate_map_spec(const ScenarioConfig& cfg, const MapSpec& spec, const std::string& path,
                       bool is_boundary, std::vector<ConfigIssue>& issues) {
    auto fail = [&](const std::string& msg) { issues.push_back({path, msg, 0, 0}); };
    if (std::find(known_presets().begin(), known_presets().end(), spec.preset) == known_presets().end()) {
        fail("unknown preset '" + spec.preset + "'");
        return;
    }
    if (spec.preset == "none" && !is_boundary) fail("preset 'none' is only valid for the boundary map");
    if (spec.preset == "from-initial" && !is_boundary)
        fail("preset 'from-initial' is only valid for the boundary map");
    if (spec.preset == "constant" && spec.value.empty()) fail("preset 'constant' needs value = \"...\"");
    if (spec.preset == "table" && spec.table.empty()) fail("preset 'table' needs a table of points");
    if (spec.preset == "expression") {
        if (cfg.target.variant != "euclidean")
            fail("preset 'expression' needs a Euclidean target");
        if (spec.exprs.empty()) fail("preset 'expression' needs exprs = [\"...\"]");
        for (size_t i = 0; i < spec.exprs.size(); ++i) {
            try {
                Expression::parse(spec.exprs[i]);
            } catch (const Error& e) {
                issues.push_back({path + ".exprs[" + std::to_string(i) + "]", e.what(), 0, 0});
            }
        }
        if (cfg.target.variant == "euclidean" &&
            static_cast<int>(spec.exprs.size()) != cfg.target.dim)
            fail("preset 'expression' needs one expression per coordinate");
    }
    if ((spec.preset == "coordinate" || spec.preset == "fourier") &&
        !(cfg.target.variant == "euclidean" && cfg.target.dim == 1))
        fail("preset '" + spec.preset + "' needs a 1-D Euclidean target");
    if (spec.preset == "circle" && !(cfg.target.variant == "euclidean" && cfg.target.dim == 2))
        fail("preset 'circle' needs a 2-D Euclidean target");
    if (spec.preset == "tripod-wave" && cfg.target.variant != "tripod" && cfg.target.variant != "tree")
        fail("preset 'tripod-wave' needs a tree target");
}

} // namespace

double CheckSpec::num(const std::string& key, double fallback) const {
    auto it = params.find(key);
    if (it == params.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        return fallback;
    }
}

std::string CheckSpec::str(const std::string& key, const std::string& fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::vector<double> ScenarioConfig::time_grid() const {
    if (!times.empty()) return times;
    std::vector<double> grid;
    for (int k = 0; k <= steps; ++k) grid.push_back(t_end * k / steps);
    return grid;
}

TargetSpace build_target(const TargetSpec& spec) {
    if (spec.variant == "euclidean") return TargetSpace::euclidean(spec.dim);
    if (spec.variant == "tripod") return TargetSpace::tripod(spec.leg);
    if (spec.variant == "tree") return TargetSpace::metric_tree(spec.vertices, spec.edges);
    if (spec.variant == "hyperbolic") return TargetSpace::hyperbolic_plane();
    if (spec.variant == "product") {
        std::vector<TargetSpace> factors;
        for (const auto& f : spec.factors) {
            auto colon = f.find(':');
            std::string kind = f.substr(0, colon);
            std::string arg = colon == std::string::npos ? "" : f.substr(colon + 1);
            if (kind == "euclidean")
                factors.push_back(TargetSpace::euclidean(arg.empty() ? 1 : std::stoi(arg)));
            else if (kind == "tripod")
                factors.push_back(TargetSpace::tripod(arg.empty() ? 1.0 : std::stod(arg)));
            else if (kind == "hyperbolic")
                factors.push_back(TargetSpace::hyperbolic_plane());
            else
                throw Error(Errc::config, "unknown product factor '" + f + "'");
        }
        return TargetSpace::product(std::move(factors));
    }
    throw Error(Errc::config, "unknown target variant '" + spec.variant + "'");
}

std::shared_ptr<const MeshDomain> build_config_domain(const ScenarioConfig& cfg) {
    return build_domain(domain_kind_from_string(cfg.domain_kind), cfg.n, cfg.length);
}

std::vector<Point> build_map_values(const MapSpec& spec, const MeshDomain& dom, const TargetSpace& space,
                                    Rng& rng, const std::vector<Point>* initial_values) {
    const int n = dom.vertex_count();
    std::vector<Point> out;
    out.reserve(n);
    if (spec.preset == "from-initial") {
        if (!initial_values) throw Error(Errc::config, "'from-initial' needs the initial map");
        return *initial_values;
    }
    if (spec.preset == "constant") {
        Point p = space.decode_point(spec.value);
        return std::vector<Point>(n, p);
    }
    if (spec.preset == "table") {
        if (static_cast<int>(spec.table.size()) != n)
            throw Error(Errc::config, "table has " + std::to_string(spec.table.size()) +
                                          " entries for " + std::to_string(n) + " vertices");
        for (const auto& s : spec.table) out.push_back(space.decode_point(s));
        return out;
    }
    if (spec.preset == "expression") {
        std::vector<Expression> exprs;
        for (const auto& e : spec.exprs) exprs.push_back(Expression::parse(e));
        for (int i = 0; i < n; ++i) {
            std::vector<double> coords;
            for (const auto& e : exprs) coords.push_back(e.eval(dom.coords[i][0], dom.coords[i][1]));
            out.push_back(Point::euclidean(std::move(coords)));
        }
        return out;
    }
    if (spec.preset == "coordinate") {
        for (int i = 0; i < n; ++i) out.push_back(Point::euclidean({dom.coords[i][0]}));
        return out;
    }
    if (spec.preset == "fourier") {
        for (int i = 0; i < n; ++i) {
            double x = dom.coords[i][0];
            out.push_back(Point::euclidean(
                {spec.amplitude *
                 std::cos(2.0 * M_PI * spec.k * x / dom.length + spec.phase)}));
        }
        return out;
    }
    if (spec.preset == "circle") {
        for (int i = 0; i < n; ++i) {
            double th = 2.0 * M_PI * spec.k * dom.coords[i][0] / dom.length + spec.phase;
            out.push_back(Point::euclidean({spec.radius * std::cos(th), spec.radius * std::sin(th)}));
        }
        return out;
    }
    if (spec.preset == "tripod-wave") {
        int edges = space.tree_edge_count();
        for (int i = 0; i < n; ++i) {
            double x = dom.coords[i][0];
            int leg = (i + static_cast<int>(spec.phase)) % edges;
            double len = space.tree_edge_length(leg);
            double off = spec.offset + spec.amplitude * std::fabs(std::sin(2.0 * M_PI * spec.k * x / dom.length));
            out.push_back(space.canonical(Point::tree(leg, std::clamp(off, 0.0, len))));
        }
        return out;
    }
    if (spec.preset == "random-ball") {
        Point center = spec.center.empty() ? random_point(space, rng, 0.0) : space.decode_point(spec.center);
        for (int i = 0; i < n; ++i) {
            Point q = random_point(space, rng, spec.radius);
            out.push_back(space.project_to_ball(q, center, spec.radius));
        }
        return out;
    }
    throw Error(Errc::config, "unknown preset '" + spec.preset + "'");
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::vector<ConfigIssue> issues;
    TomlParser parser{text, origin, 0, 1, 1, issues};
    TomlDoc doc = parser.parse();
    if (!issues.empty()) throw ConfigError("syntax error in " + origin, std::move(issues));

    Reader r{doc, issues};
    ScenarioConfig cfg;
    cfg.name = r.str("scenario", "name", "scenario");
    cfg.seed = static_cast<std::uint64_t>(r.num("scenario", "seed", 0.0));
    cfg.out_dir = r.str("scenario", "out_dir", "");

    cfg.domain_kind = r.str("domain", "kind", "cycle");
    cfg.n = r.integer("domain", "n", 8);
    cfg.length = r.num("domain", "length", 8.0);

    cfg.target.variant = r.str("target", "variant", "euclidean");
    cfg.target.dim = r.integer("target", "dim", 1);
    cfg.target.leg = r.num("target", "leg", 1.0);
    cfg.target.vertices = r.str_list("target", "vertices");
    cfg.target.edges = r.edge_list("target", "edges");
    cfg.target.factors = r.str_list("target", "factors");

    cfg.initial = read_map_spec(r, "initial", "constant");
    if (doc.find("initial2")) cfg.initial2 = read_map_spec(r, "initial2", "constant");
    cfg.boundary = read_map_spec(r, "boundary", "none");

    cfg.times = r.num_list("flow", "times");
    cfg.t_end = r.num("flow", "t_end", 1.0);
    cfg.steps = r.integer("flow", "steps", 10);
    cfg.m_per_interval = r.integer("flow", "m_per_interval", 1);
    cfg.h_max = r.num("flow", "h_max", 0.0);
    cfg.tol = r.num("flow", "tol", 1e-10);
    cfg.max_sweeps = r.integer("flow", "max_sweeps", 10000);

    cfg.K = r.num("constants", "K", 0.0);
    cfg.M0 = r.num("constants", "M0", 1.0);
    cfg.P0 = r.str("constants", "P0", "");
    cfg.t_star = r.num("constants", "t_star", 0.0);
    cfg.T = r.num("constants", "T", 1.0);
    cfg.eps = r.num_list("constants", "eps");
    cfg.p.clear();
    for (double v : r.num_list("constants", "p")) cfg.p.push_back(static_cast<int>(v));
    if (cfg.p.empty()) cfg.p = {2};

    for (const auto& section : doc.sections) {
        if (section.name.rfind("check.", 0) != 0) continue;
        CheckSpec check;
        check.name = section.name.substr(6);
        for (const auto& [key, value] : section.values) {
            if (value.kind == TomlValue::Kind::num)
                check.params[key] = format_double(value.d);
            else if (value.kind == TomlValue::Kind::boolean)
                check.params[key] = value.b ? "true" : "false";
            else
                check.params[key] = value.s;
        }
        cfg.checks.push_back(std::move(check));
    }

    // -------------------------------------------------------------------
    // semantic validation; every failure is collected
    // -------------------------------------------------------------------
    auto fail = [&](const std::string& path, const std::string& msg) {
        issues.push_back({path, msg, 0, 0});
    };

    std::shared_ptr<const MeshDomain> dom;
    try {
        dom = build_config_domain(cfg);
    } catch (const Error& e) {
        fail("domain", e.what());
    }
    TargetSpace* target_ptr = nullptr;
    std::optional<TargetSpace> target;
    try {
        target.emplace(build_target(cfg.target));
        target_ptr = &*target;
    } catch (const Error& e) {
        fail("target", e.what());
    }

    validate_map_spec(cfg, cfg.initial, "initial", false, issues);
    if (cfg.initial2) validate_map_spec(cfg, *cfg.initial2, "initial2", false, issues);
    validate_map_spec(cfg, cfg.boundary, "boundary", true, issues);
    if (dom && !dom->boundary.empty() && cfg.boundary.preset == "none")
        fail("boundary", "Dirichlet domains need a boundary map");

    if (target_ptr) {
        if (!cfg.P0.empty()) {
            try {
                target_ptr->decode_point(cfg.P0);
            } catch (const Error& e) {
                fail("constants.P0", e.what());
            }
        }
        if (dom && cfg.initial.preset == "table" &&
            static_cast<int>(cfg.initial.table.size()) == dom->vertex_count()) {
            for (size_t i = 0; i < cfg.initial.table.size(); ++i) {
                try {
                    target_ptr->decode_point(cfg.initial.table[i]);
                } catch (const Error& e) {
                    fail("initial.table[" + std::to_string(i) + "]", e.what());
                }
            }
        }
        if (dom && cfg.initial.preset == "table" &&
            static_cast<int>(cfg.initial.table.size()) != dom->vertex_count())
            fail("initial.table", "needs one entry per vertex");
    }

    auto grid = cfg.time_grid();
    if (grid.empty() || grid.front() < 0.0) fail("flow.times", "time grid must start at t >= 0");
    for (size_t k = 1; k < grid.size(); ++k)
        if (!(grid[k] > grid[k - 1])) fail("flow.times", "time grid must be strictly increasing");
    if (cfg.times.empty() && cfg.steps < 1) fail("flow.steps", "needs steps >= 1");
    if (!(cfg.tol > 0.0)) fail("flow.tol", "needs tol > 0");
    if (cfg.m_per_interval < 1) fail("flow.m_per_interval", "needs m >= 1");
    if (cfg.max_sweeps < 1) fail("flow.max_sweeps", "needs max_sweeps >= 1");

    if (cfg.K > 0.0) fail("constants.K", "the curvature tag must satisfy K <= 0");
    if (!(cfg.M0 > 0.0)) fail("constants.M0", "needs M0 > 0");
    if (!(cfg.T > 0.0)) fail("constants.T", "needs T > 0");
    for (size_t i = 0; i < cfg.p.size(); ++i)
        if (cfg.p[i] < 2) fail("constants.p[" + std::to_string(i) + "]", "needs integer p >= 2");

    if (dom) {
        double R = dom->confinement_radius();
        cfg.eps0 = std::exp(-2.0 * std::fabs(cfg.K) * cfg.T) * R * R / (8.0 * cfg.M0);
        for (size_t i = 0; i < cfg.eps.size(); ++i) {
            if (!(cfg.eps[i] > 0.0) || cfg.eps[i] >= cfg.eps0)
                fail("constants.eps[" + std::to_string(i) + "]",
                     "eps = " + format_double(cfg.eps[i]) +
                         " must lie in (0, eps0) with eps0 = " + format_double(cfg.eps0));
        }
    }

    for (const auto& check : cfg.checks) {
        if (std::find(known_checks().begin(), known_checks().end(), check.name) == known_checks().end())
            fail("check." + check.name, "unknown check");
        if ((check.name == "subsolution" || check.name == "contraction") && !cfg.initial2)
            fail("check." + check.name, "needs an [initial2] section");
        if (check.name == "confinement" && cfg.P0.empty())
            fail("check." + check.name, "needs constants.P0");
        if (check.name == "hj" && cfg.eps.empty())
            fail("check." + check.name, "needs a nonempty constants.eps list");
    }

    if (!issues.empty()) throw ConfigError("invalid configuration in " + origin, std::move(issues));
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

namespace {

void emit_map_spec(std::ostringstream& out, const std::string& section, const MapSpec& spec) {
    out << "[" << section << "]\n";
    out << "preset = \"" << spec.preset << "\"\n";
    if (!spec.value.empty()) out << "value = \"" << spec.value << "\"\n";
    if (!spec.table.empty()) {
        out << "table = [";
        for (size_t i = 0; i < spec.table.size(); ++i) out << (i ? ", " : "") << '"' << spec.table[i] << '"';
        out << "]\n";
    }
    if (!spec.exprs.empty()) {
        out << "exprs = [";
        for (size_t i = 0; i < spec.exprs.size(); ++i) out << (i ? ", " : "") << '"' << spec.exprs[i] << '"';
        out << "]\n";
    }
    out << "amplitude = " << format_double(spec.amplitude) << "\n";
    out << "k = " << format_double(spec.k) << "\n";
    out << "phase = " << format_double(spec.phase) << "\n";
    out << "offset = " << format_double(spec.offset) << "\n";
    out << "radius = " << format_double(spec.radius) << "\n";
    if (!spec.center.empty()) out << "center = \"" << spec.center << "\"\n";
    out << "\n";
}

} // namespace

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "name = \"" << cfg.name << "\"\n";
    out << "seed = " << cfg.seed << "\n";
    if (!cfg.out_dir.empty()) out << "out_dir = \"" << cfg.out_dir << "\"\n";
    out << "\n[domain]\n";
    out << "kind = \"" << cfg.domain_kind << "\"\n";
    out << "n = " << cfg.n << "\n";
    out << "length = " << format_double(cfg.length) << "\n";
    out << "\n[target]\n";
    out << "variant = \"" << cfg.target.variant << "\"\n";
    out << "dim = " << cfg.target.dim << "\n";
    out << "leg = " << format_double(cfg.target.leg) << "\n";
    if (!cfg.target.vertices.empty()) {
        out << "vertices = [";
        for (size_t i = 0; i < cfg.target.vertices.size(); ++i)
            out << (i ? ", " : "") << '"' << cfg.target.vertices[i] << '"';
        out << "]\n";
    }
    if (!cfg.target.edges.empty()) {
        out << "edges = [";
        for (size_t i = 0; i < cfg.target.edges.size(); ++i) {
            const auto& e = cfg.target.edges[i];
            out << (i ? ", " : "") << "[\"" << e.a << "\", \"" << e.b << "\", " << format_double(e.length)
                << "]";
        }
        out << "]\n";
    }
    if (!cfg.target.factors.empty()) {
        out << "factors = [";
        for (size_t i = 0; i < cfg.target.factors.size(); ++i)
            out << (i ? ", " : "") << '"' << cfg.target.factors[i] << '"';
        out << "]\n";
    }
    out << "\n";
    emit_map_spec(out, "initial", cfg.initial);
    if (cfg.initial2) emit_map_spec(out, "initial2", *cfg.initial2);
    emit_map_spec(out, "boundary", cfg.boundary);
    out << "[flow]\n";
    if (!cfg.times.empty()) {
        out << "times = [";
        for (size_t i = 0; i < cfg.times.size(); ++i) out << (i ? ", " : "") << format_double(cfg.times[i]);
        out << "]\n";
    }
    out << "t_end = " << format_double(cfg.t_end) << "\n";
    out << "steps = " << cfg.steps << "\n";
    out << "m_per_interval = " << cfg.m_per_interval << "\n";
    out << "h_max = " << format_double(cfg.h_max) << "\n";
    out << "tol = " << format_double(cfg.tol) << "\n";
    out << "max_sweeps = " << cfg.max_sweeps << "\n";
    out << "\n[constants]\n";
    out << "K = " << format_double(cfg.K) << "\n";
    out << "M0 = " << format_double(cfg.M0) << "\n";
    if (!cfg.P0.empty()) out << "P0 = \"" << cfg.P0 << "\"\n";
    out << "t_star = " << format_double(cfg.t_star) << "\n";
    out << "T = " << format_double(cfg.T) << "\n";
    if (!cfg.eps.empty()) {
        out << "eps = [";
        for (size_t i = 0; i < cfg.eps.size(); ++i) out << (i ? ", " : "") << format_double(cfg.eps[i]);
        out << "]\n";
    }
    out << "p = [";
    for (size_t i = 0; i < cfg.p.size(); ++i) out << (i ? ", " : "") << cfg.p[i];
    out << "]\n";
    for (const auto& check : cfg.checks) {
        out << "\n[check." << check.name << "]\n";
        for (const auto& [key, value] : check.params) {
            char* endp = nullptr;
            std::strtod(value.c_str(), &endp);
            bool numeric = endp && *endp == '\0' && !value.empty();
            if (numeric)
                out << key << " = " << value << "\n";
            else
                out << key << " = \"" << value << "\"\n";
        }
    }
    return out.str();
}

std::string config_hash(const ScenarioConfig& cfg) {
    std::string text = serialize_config(cfg);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const char* tool_version() { return "1.0.0"; }

} // namespace hmf

#include "tailscore/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace tailscore {

namespace {

template <typename... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <typename... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string with_offset(const std::string& message, std::size_t position) {
    return message + " (at offset " + std::to_string(position) + ")";
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Cursor {
    const std::string& s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& message) const { throw parse_error(message, pos); }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    std::string ident() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
            ++pos;
        }
        if (pos == start) fail("expected a name");
        return s.substr(start, pos - start);
    }

    double number() {
        skip_ws();
        std::size_t start = pos;
        // from_chars accepts a leading minus but not plus.
        if (pos < s.size() && s[pos] == '+') ++pos;
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
        if (ec != std::errc()) {
            pos = start;
            fail("expected a number");
        }
        pos = static_cast<std::size_t>(ptr - s.data());
        if (std::isnan(v)) {
            pos = start;
            fail("nan is not a valid value");
        }
        return v;
    }

    // Everything up to ',' or ')', trimmed; used for file paths.
    std::string raw_until_delim() {
        skip_ws();
        const std::size_t start = pos;
        while (pos < s.size() && s[pos] != ',' && s[pos] != ')') ++pos;
        std::size_t end = pos;
        while (end > start && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
        if (end == start) fail("expected a file path");
        return s.substr(start, end - start);
    }

    void expect_end() {
        skip_ws();
        if (pos != s.size()) fail("unexpected trailing input");
    }
};

// name=value pairs in any order; every listed name exactly once.
std::vector<double> kwargs(Cursor& c, const std::vector<const char*>& names) {
    c.expect('(');
    std::vector<std::optional<double>> vals(names.size());
    while (true) {
        const std::size_t at = c.pos;
        const std::string key = c.ident();
        std::size_t slot = names.size();
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (key == names[i]) slot = i;
        }
        if (slot == names.size()) {
            throw parse_error("unknown argument '" + key + "'", at);
        }
        if (vals[slot]) {
            throw parse_error("duplicate argument '" + key + "'", at);
        }
        c.expect('=');
        vals[slot] = c.number();
        if (c.eat(',')) continue;
        c.expect(')');
        break;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!vals[i]) c.fail(std::string("missing argument '") + names[i] + "'");
        out.push_back(*vals[i]);
    }
    return out;
}

std::vector<double> load_sample(const std::string& path, std::size_t at) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open sample file '" + path + "'", at);
    std::vector<double> xs;
    double v = 0.0;
    while (in >> v) {
        if (!std::isfinite(v)) {
            throw parse_error("sample file '" + path + "' holds a non-finite value", at);
        }
        xs.push_back(v);
    }
    if (!in.eof()) {
        throw parse_error("sample file '" + path + "' holds a non-numeric token", at);
    }
    if (xs.empty()) throw parse_error("sample file '" + path + "' is empty", at);
    return xs;
}

void parse_spec(Cursor& c, std::vector<WeightedFamily>& parts, double scale);

void parse_mix(Cursor& c, std::vector<WeightedFamily>& parts, double scale) {
    c.expect('(');
    do {
        const std::size_t at = c.pos;
        const double w = c.number();
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw parse_error("mixture weight must be positive and finite", at);
        }
        c.expect(':');
        parse_spec(c, parts, scale * w);
    } while (c.eat(','));
    c.expect(')');
}

void parse_spec(Cursor& c, std::vector<WeightedFamily>& parts, double scale) {
    const std::size_t at = c.pos;
    const std::string name = c.ident();
    const auto push = [&](Family f) { parts.push_back({scale, std::move(f)}); };
    if (name == "pareto") {
        const auto v = kwargs(c, {"alpha", "scale"});
        push(Pareto{v[0], v[1]});
    } else if (name == "gpd") {
        const auto v = kwargs(c, {"gamma", "sigma", "mu"});
        push(GeneralizedPareto{v[0], v[1], v[2]});
    } else if (name == "gev") {
        const auto v = kwargs(c, {"gamma", "mu", "sigma"});
        push(GeneralizedExtremeValue{v[0], v[1], v[2]});
    } else if (name == "exp") {
        const auto v = kwargs(c, {"rate"});
        push(Exponential{v[0]});
    } else if (name == "unif") {
        const auto v = kwargs(c, {"a", "b"});
        push(Uniform{v[0], v[1]});
    } else if (name == "norm") {
        const auto v = kwargs(c, {"mu", "sigma"});
        push(Normal{v[0], v[1]});
    } else if (name == "point") {
        const auto v = kwargs(c, {"c"});
        push(PointMass{v[0]});
    } else if (name == "emp") {
        c.expect('(');
        const std::size_t key_at = c.pos;
        if (c.ident() != "file") throw parse_error("emp takes a single 'file' argument", key_at);
        c.expect('=');
        const std::size_t path_at = c.pos;
        const std::string path = c.raw_until_delim();
        c.expect(')');
        push(Empirical{load_sample(path, path_at), path});
    } else if (name == "mix") {
        parse_mix(c, parts, scale);
    } else {
        throw parse_error("unknown distribution '" + name + "'", at);
    }
}

}  // namespace

parse_error::parse_error(const std::string& message, std::size_t position)
    : std::runtime_error(with_offset(message, position)), position_(position) {}

Distribution parse_distribution(const std::string& spec) {
    Cursor c{spec};
    std::vector<WeightedFamily> parts;
    parse_spec(c, parts, 1.0);
    c.expect_end();
    return Distribution(std::move(parts));
}

ScoringRule parse_scoring_rule(const std::string& spec) {
    Cursor c{spec};
    const std::size_t at = c.pos;
    const std::string name = c.ident();
    if (name == "crps") {
        c.expect_end();
        return Crps{};
    }
    if (name == "wcrps") {
        const auto v = kwargs(c, {"q"});
        c.expect_end();
        return WeightedCrps{v[0]};
    }
    throw parse_error("unknown scoring rule '" + name + "' (try crps or wcrps)", at);
}

ScoringFunction parse_scoring_function(const std::string& spec) {
    Cursor c{spec};
    const std::size_t at = c.pos;
    const std::string name = c.ident();
    if (name == "se") {
        const std::size_t arg_at = c.pos;
        const auto v = kwargs(c, {"k"});
        c.expect_end();
        if (v[0] != std::floor(v[0]) || std::abs(v[0]) > 8.0) {
            throw parse_error("se power k must be a small integer", arg_at);
        }
        return SquaredError{static_cast<int>(v[0])};
    }
    if (name == "pinball") {
        const auto v = kwargs(c, {"alpha"});
        c.expect_end();
        return Pinball{v[0]};
    }
    throw parse_error("unknown scoring function '" + name + "' (try se or pinball)", at);
}

Functional parse_functional(const std::string& name) {
    Cursor c{name};
    const std::size_t at = c.pos;
    const std::string id = c.ident();
    c.expect_end();
    for (const Functional f : {Functional::Mean, Functional::UpperEndpoint, Functional::Evi,
                               Functional::RvIndex, Functional::MIndex}) {
        if (id == functional_name(f)) return f;
    }
    throw parse_error("unknown functional '" + id +
                          "' (try mean, upper_endpoint, evi, rv_index, m_index)",
                      at);
}

namespace {

std::string format_family(const Family& f) {
    return std::visit(
        overloaded{
            [](const Pareto& p) {
                return "pareto(alpha=" + fmt(p.alpha) + ",scale=" + fmt(p.scale) + ")";
            },
            [](const GeneralizedPareto& g) {
                return "gpd(gamma=" + fmt(g.gamma) + ",sigma=" + fmt(g.sigma) +
                       ",mu=" + fmt(g.mu) + ")";
            },
            [](const GeneralizedExtremeValue& g) {
                return "gev(gamma=" + fmt(g.gamma) + ",mu=" + fmt(g.mu) +
                       ",sigma=" + fmt(g.sigma) + ")";
            },
            [](const Exponential& e) { return "exp(rate=" + fmt(e.rate) + ")"; },
            [](const Uniform& u) { return "unif(a=" + fmt(u.lower) + ",b=" + fmt(u.upper) + ")"; },
            [](const Normal& n) { return "norm(mu=" + fmt(n.mu) + ",sigma=" + fmt(n.sigma) + ")"; },
            [](const PointMass& p) { return "point(c=" + fmt(p.c) + ")"; },
            [](const Empirical& e) { return "emp(file=" + e.source + ")"; }},
        f);
}

}  // namespace

std::string format_distribution(const Distribution& d) {
    if (!d.is_mixture()) return format_family(d.parts()[0].family);
    std::string out = "mix(";
    bool first = true;
    for (const auto& part : d.parts()) {
        if (!first) out += ',';
        first = false;
        out += fmt(part.weight) + ":" + format_family(part.family);
    }
    return out + ")";
}

std::string format_scoring_rule(const ScoringRule& rule) {
    return std::visit(overloaded{[](const Crps&) { return std::string("crps"); },
                                 [](const WeightedCrps& w) {
                                     return "wcrps(q=" + fmt(w.threshold) + ")";
                                 }},
                      rule);
}

std::string format_scoring_function(const ScoringFunction& fn) {
    return std::visit(overloaded{[](const SquaredError& se) {
                                     return "se(k=" + std::to_string(se.power) + ")";
                                 },
                                 [](const Pinball& pb) {
                                     return "pinball(alpha=" + fmt(pb.level) + ")";
                                 }},
                      fn);
}

}  // namespace tailscore

#pragma once

// Scenario configuration: line-oriented sections of `key = value` pairs.
//
//   [system]          N, J
//   [flow]            n, f            (f_0..f_d, comma separated)
//   [constants]       alpha_<i>       (diagonal entries of alpha_i)
//   [grid]            x_min, x_max, nx, t
//   [potential]       kind (zero | gaussian | soliton), amplitude, center, width
//   [darboux]         lambda, mixing_<k>, kappa0, c0, second_lambda, second_shift, t_window
//   [tolerances]      check thresholds, dt_over_h, t_center, refine
//   [output]          directory, formats
//
// Complex values are written a, bi, a+bi or a-bi. `#` starts a comment.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nisakns/error.hpp"
#include "nisakns/matrix.hpp"

namespace nisakns {

struct Diagnostic {
    std::size_t line;  // 0 when the problem is not tied to one line
    std::string message;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<Diagnostic> diags)
        : Error(ErrorKind::config, join(diags)), diags_(std::move(diags)) {}
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diags_; }

private:
    static std::string join(const std::vector<Diagnostic>& d) {
        std::string out;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (i) out += "; ";
            if (d[i].line) out += "line " + std::to_string(d[i].line) + ": ";
            out += d[i].message;
        }
        return out;
    }
    std::vector<Diagnostic> diags_;
};

struct SystemSection {
    std::size_t n = 0;
    std::vector<cplx> j;
    bool operator==(const SystemSection&) const = default;
};

struct FlowSection {
    std::size_t order = 0;
    std::vector<cplx> f;
    bool operator==(const FlowSection&) const = default;
};

struct ConstantsSection {
    std::map<std::size_t, std::vector<cplx>> alphas;  // level -> diagonal entries
    bool operator==(const ConstantsSection&) const = default;
};

struct GridSection {
    double x_min = -10.0;
    double x_max = 10.0;
    std::size_t nx = 2001;
    std::vector<double> t{0.0, 0.05, 0.1};
    bool operator==(const GridSection&) const = default;
};

struct PotentialSection {
    std::string kind = "zero";
    double amplitude = 0.5;
    double center = 0.0;
    double width = 1.0;
    bool operator==(const PotentialSection&) const = default;
};

struct DarbouxSection {
    std::vector<cplx> lambdas;               // lambda_k(0); empty -> (lambda_0, -lambda_0)
    std::vector<std::vector<cplx>> mixing;   // one vector per frame column
    double kappa0 = 1.0;
    double c0 = -4.0;
    std::optional<cplx> second_lambda;
    double second_shift = 0.0;
    double t_lo = -0.4;
    double t_hi = 0.4;
    bool operator==(const DarbouxSection&) const = default;
};

struct ToleranceSection {
    double dressing = 1e-12;     // S against its closed form
    double dual_route = 1e-10;   // Darboux-route u against 2 lambda_0 sech 2 xi
    double flow = 1e-10;         // lambda(t)^2 (kappa - 2t) - 1
    double rk4 = 1e-8;           // rk4 against closed form
    double shift = 1e-6;         // constants recovered at the left edge
    double similarity = 1e-8;    // spec(S) against Lambda
    double governing = 1e-8;     // V'(l)(l - S) relation
    double reduction = 1e-10;    // p + q of the 2-soliton
    double asymptotic = 1e-8;    // |S(x_min) - Lambda| and right-edge off-diagonal
    double rate = 0.1;           // relative error of fitted decay rates
    double order_lo = 1.8;
    double order_hi = 2.2;
    double dt_over_h = 1.0;      // time step of order studies, in units of h
    double two_soliton_dt_over_h = 0.25;
    double t_center = 0.05;      // time the order studies are centred on
    std::size_t refine = 3;      // nested grid levels
    bool operator==(const ToleranceSection&) const = default;
};

struct OutputSection {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
    bool operator==(const OutputSection&) const = default;
};

struct ScenarioConfig {
    SystemSection system;
    FlowSection flow;
    ConstantsSection constants;
    GridSection grid;
    PotentialSection potential;
    DarbouxSection darboux;
    ToleranceSection tolerances;
    OutputSection output;
    bool operator==(const ScenarioConfig&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

inline std::string nearest(std::string_view word, const std::vector<std::string>& candidates) {
    std::string best;
    std::size_t dist = static_cast<std::size_t>(-1);
    for (const auto& c : candidates) {
        const std::size_t d = levenshtein(word, c);
        if (d < dist) {
            dist = d;
            best = c;
        }
    }
    return best;
}

inline std::optional<double> parse_real(std::string_view s) {
    const std::string t = trim(s);
    if (t.empty()) return std::nullopt;
    const char* b = t.data();
    if (*b == '+') ++b;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(b, t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
    return v;
}

inline std::optional<cplx> parse_complex(std::string_view s) {
    std::string t;
    for (char c : s)
        if (c != ' ' && c != '\t') t += c;
    if (t.empty()) return std::nullopt;
    if (t.back() != 'i') {
        const auto r = parse_real(t);
        if (!r) return std::nullopt;
        return cplx(*r, 0.0);
    }
    t.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = t.size(); k-- > 1;) {
        if ((t[k] == '+' || t[k] == '-') && t[k - 1] != 'e' && t[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string re = split == std::string::npos ? "" : t.substr(0, split);
    std::string im = split == std::string::npos ? t : t.substr(split);
    if (im.empty() || im == "+") im = "1";
    if (im == "-") im = "-1";
    const auto iv = parse_real(im);
    if (!iv) return std::nullopt;
    double rv = 0.0;
    if (!re.empty()) {
        const auto r = parse_real(re);
        if (!r) return std::nullopt;
        rv = *r;
    }
    return cplx(rv, *iv);
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline std::string format_real(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string format_complex(cplx v) {
    if (v.imag() == 0.0) return format_real(v.real());
    std::string im = format_real(v.imag());
    if (im.front() != '-') im = "+" + im;
    if (v.real() == 0.0) return (im.front() == '+' ? im.substr(1) : im) + "i";
    return format_real(v.real()) + im + "i";
}

template <typename T, typename F>
std::string format_list(const std::vector<T>& v, F&& fmt) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out;
}

}  // namespace detail

namespace detail {

inline const std::map<std::string, std::vector<std::string>>& known_keys() {
    static const std::map<std::string, std::vector<std::string>> keys{
        {"system", {"N", "J"}},
        {"flow", {"n", "f"}},
        {"constants", {"alpha_<i>"}},
        {"grid", {"x_min", "x_max", "nx", "t"}},
        {"potential", {"kind", "amplitude", "center", "width"}},
        {"darboux", {"lambda", "mixing_<k>", "kappa0", "c0", "second_lambda", "second_shift", "t_window"}},
        {"tolerances",
         {"dressing", "dual_route", "flow", "rk4", "shift", "similarity", "governing", "reduction", "asymptotic",
          "rate", "order_lo", "order_hi", "dt_over_h", "two_soliton_dt_over_h", "t_center", "refine"}},
        {"output", {"directory", "formats"}},
    };
    return keys;
}

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ScenarioConfig run() {
        std::string section;
        std::size_t line_no = 0;
        std::istringstream in{std::string(text_)};
        std::string raw;
        while (std::getline(in, raw)) {
            ++line_no;
            const auto hash = raw.find('#');
            const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    diag(line_no, "malformed section header '" + line + "'");
                    continue;
                }
                section = trim(line.substr(1, line.size() - 2));
                if (!known_keys().count(section)) {
                    std::vector<std::string> names;
                    for (const auto& [k, v] : known_keys()) names.push_back(k);
                    diag(line_no, "unknown section [" + section + "]; did you mean [" + nearest(section, names) + "]?");
                    section = "?";
                    continue;
                }
                if (!seen_.insert(section).second) diag(line_no, "duplicate section [" + section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                diag(line_no, "expected 'key = value'");
                continue;
            }
            if (section.empty()) {
                diag(line_no, "key outside of any section");
                continue;
            }
            if (section == "?") continue;
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (!keys_seen_.insert(section + "." + key).second) {
                diag(line_no, "duplicate key '" + key + "' in [" + section + "]");
                continue;
            }
            assign(section, key, value, line_no);
        }
        if (!seen_.count("system")) diag(0, "missing section: system");
        if (seen_.count("system") && !seen_.count("flow")) diag(0, "missing section: flow");
        if (seen_.count("system") && !seen_.count("grid")) diag(0, "missing section: grid");
        if (diags_.empty()) validate();
        if (!diags_.empty()) throw ConfigError(diags_);
        return cfg_;
    }

private:
    void diag(std::size_t line, std::string msg) { diags_.push_back({line, std::move(msg)}); }

    std::size_t line_of(const std::string& key) const {
        const auto it = lines_.find(key);
        return it == lines_.end() ? 0 : it->second;
    }

    std::optional<double> real(const std::string& v, std::size_t line, const std::string& key) {
        const auto r = parse_real(v);
        if (!r) diag(line, key + ": '" + v + "' is not a real number");
        return r;
    }

    std::optional<std::size_t> count(const std::string& v, std::size_t line, const std::string& key) {
        const auto r = parse_real(v);
        if (!r || *r < 0 || std::floor(*r) != *r) {
            diag(line, key + ": '" + v + "' is not a non-negative integer");
            return std::nullopt;
        }
        return static_cast<std::size_t>(*r);
    }

    std::optional<std::vector<cplx>> complex_list(const std::string& v, std::size_t line, const std::string& key) {
        std::vector<cplx> out;
        for (const auto& item : split_list(v)) {
            const auto c = parse_complex(item);
            if (!c) {
                diag(line, key + ": '" + item + "' is not a complex number (use a, bi or a+bi)");
                return std::nullopt;
            }
            out.push_back(*c);
        }
        return out;
    }

    std::optional<std::vector<double>> real_list(const std::string& v, std::size_t line, const std::string& key) {
        std::vector<double> out;
        for (const auto& item : split_list(v)) {
            const auto r = real(item, line, key);
            if (!r) return std::nullopt;
            out.push_back(*r);
        }
        return out;
    }

    static std::optional<std::size_t> suffix_index(const std::string& key, const std::string& prefix) {
        if (key.rfind(prefix, 0) != 0 || key.size() == prefix.size()) return std::nullopt;
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(key.data() + prefix.size(), key.data() + key.size(), v);
        if (ec != std::errc() || p != key.data() + key.size()) return std::nullopt;
        return v;
    }

    void unknown(const std::string& section, const std::string& key, std::size_t line) {
        diag(line, "unknown key '" + key + "' in [" + section + "]; did you mean '" +
                       nearest(key, known_keys().at(section)) + "'?");
    }

    void assign(const std::string& section, const std::string& key, const std::string& v, std::size_t line) {
        lines_[section + "." + key] = line;
        const std::string where = section + "." + key;
        if (section == "system") {
            if (key == "N") {
                if (auto c = count(v, line, where)) cfg_.system.n = *c;
            } else if (key == "J") {
                if (auto l = complex_list(v, line, where)) cfg_.system.j = *l;
            } else {
                unknown(section, key, line);
            }
        } else if (section == "flow") {
            if (key == "n") {
                if (auto c = count(v, line, where)) cfg_.flow.order = *c;
            } else if (key == "f") {
                if (auto l = complex_list(v, line, where)) cfg_.flow.f = *l;
            } else {
                unknown(section, key, line);
            }
        } else if (section == "constants") {
            const auto idx = suffix_index(key, "alpha_");
            if (!idx) return unknown(section, key, line);
            if (auto l = complex_list(v, line, where)) cfg_.constants.alphas[*idx] = *l;
        } else if (section == "grid") {
            if (key == "x_min") {
                if (auto r = real(v, line, where)) cfg_.grid.x_min = *r;
            } else if (key == "x_max") {
                if (auto r = real(v, line, where)) cfg_.grid.x_max = *r;
            } else if (key == "nx") {
                if (auto c = count(v, line, where)) cfg_.grid.nx = *c;
            } else if (key == "t") {
                if (auto l = real_list(v, line, where)) cfg_.grid.t = *l;
            } else {
                unknown(section, key, line);
            }
        } else if (section == "potential") {
            if (key == "kind") {
                cfg_.potential.kind = v;
            } else if (key == "amplitude") {
                if (auto r = real(v, line, where)) cfg_.potential.amplitude = *r;
            } else if (key == "center") {
                if (auto r = real(v, line, where)) cfg_.potential.center = *r;
            } else if (key == "width") {
                if (auto r = real(v, line, where)) cfg_.potential.width = *r;
            } else {
                unknown(section, key, line);
            }
        } else if (section == "darboux") {
            auto& d = cfg_.darboux;
            if (key == "lambda") {
                if (auto l = complex_list(v, line, where)) d.lambdas = *l;
            } else if (auto idx = suffix_index(key, "mixing_")) {
                if (*idx == 0 || *idx > 64) return diag(line, where + ": column index must be in 1..64");
                if (auto l = complex_list(v, line, where)) {
                    if (d.mixing.size() < *idx) d.mixing.resize(*idx);
                    d.mixing[*idx - 1] = *l;
                }
            } else if (key == "kappa0") {
                if (auto r = real(v, line, where)) d.kappa0 = *r;
            } else if (key == "c0") {
                if (auto r = real(v, line, where)) d.c0 = *r;
            } else if (key == "second_lambda") {
                if (auto l = complex_list(v, line, where)) {
                    if (l->size() != 1) return diag(line, where + ": expected a single value");
                    d.second_lambda = l->front();
                }
            } else if (key == "second_shift") {
                if (auto r = real(v, line, where)) d.second_shift = *r;
            } else if (key == "t_window") {
                if (auto l = real_list(v, line, where)) {
                    if (l->size() != 2) return diag(line, where + ": expected 't_lo, t_hi'");
                    d.t_lo = (*l)[0];
                    d.t_hi = (*l)[1];
                }
            } else {
                unknown(section, key, line);
            }
        } else if (section == "tolerances") {
            auto& t = cfg_.tolerances;
            const std::map<std::string, double*> reals{
                {"dressing", &t.dressing},   {"dual_route", &t.dual_route}, {"flow", &t.flow},
                {"rk4", &t.rk4},             {"shift", &t.shift},           {"similarity", &t.similarity},
                {"governing", &t.governing}, {"reduction", &t.reduction},   {"asymptotic", &t.asymptotic},
                {"rate", &t.rate},           {"order_lo", &t.order_lo},     {"order_hi", &t.order_hi},
                {"dt_over_h", &t.dt_over_h}, {"two_soliton_dt_over_h", &t.two_soliton_dt_over_h},
                {"t_center", &t.t_center}};
            if (const auto it = reals.find(key); it != reals.end()) {
                if (auto r = real(v, line, where)) *it->second = *r;
            } else if (key == "refine") {
                if (auto c = count(v, line, where)) t.refine = *c;
            } else {
                unknown(section, key, line);
            }
        } else if (section == "output") {
            if (key == "directory") {
                cfg_.output.directory = v;
            } else if (key == "formats") {
                cfg_.output.formats = split_list(v);
            } else {
                unknown(section, key, line);
            }
        }
    }

    void validate() {
        const auto& s = cfg_.system;
        if (s.n < 2) diag(line_of("system.N"), "N must be at least 2");
        if (s.j.size() != s.n) {
            diag(line_of("system.J"), "J has " + std::to_string(s.j.size()) + " entries, N = " + std::to_string(s.n));
        } else {
            cplx sum = 0.0;
            for (const cplx v : s.j) sum += v;
            if (std::abs(sum) > 1e-12) {
                diag(line_of("system.J"), "J entries must sum to zero (J is trace-free), got " + format_complex(sum));
            }
            for (std::size_t a = 0; a < s.j.size(); ++a)
                for (std::size_t b = a + 1; b < s.j.size(); ++b)
                    if (std::abs(s.j[a] - s.j[b]) <= 1e-12) {
                        diag(line_of("system.J"), "J entries " + std::to_string(a + 1) + " and " +
                                                      std::to_string(b + 1) +
                                                      " coincide; J entries must be pairwise distinct");
                    }
        }
        const auto& f = cfg_.flow;
        if (f.f.empty()) diag(line_of("flow.f"), "flow.f needs at least one coefficient");
        int deg = -1;
        for (std::size_t i = 0; i < f.f.size(); ++i)
            if (f.f[i] != cplx{}) deg = static_cast<int>(i);
        if (deg > static_cast<int>(f.order) + 2) {
            diag(line_of("flow.f"), "deg f = " + std::to_string(deg) + " exceeds n + 2 = " + std::to_string(f.order + 2));
        }
        for (const auto& [i, a] : cfg_.constants.alphas) {
            const std::size_t line = line_of("constants.alpha_" + std::to_string(i));
            if (i > f.order) diag(line, "alpha_" + std::to_string(i) + " exceeds the hierarchy order n");
            if (a.size() != s.n) {
                diag(line, "alpha_" + std::to_string(i) + " needs N diagonal entries");
                continue;
            }
            cplx tr = 0.0;
            for (const cplx v : a) tr += v;
            if (std::abs(tr) > 1e-12) diag(line, "alpha_" + std::to_string(i) + " must be trace-free");
        }
        const auto& g = cfg_.grid;
        if (g.nx < 8) diag(line_of("grid.nx"), "nx must be at least 8 for the 5-point stencils");
        if (!(g.x_min < g.x_max)) diag(line_of("grid.x_max"), "x_min must be less than x_max");
        if (g.t.empty()) diag(line_of("grid.t"), "at least one t sample is required");
        for (std::size_t k = 1; k < g.t.size(); ++k)
            if (!(g.t[k] > g.t[k - 1])) diag(line_of("grid.t"), "t samples must be strictly increasing");
        const auto& p = cfg_.potential;
        if (p.kind != "zero" && p.kind != "gaussian" && p.kind != "soliton") {
            diag(line_of("potential.kind"), "kind must be zero, gaussian or soliton");
        }
        if (!(p.width > 0)) diag(line_of("potential.width"), "width must be positive");
        const auto& d = cfg_.darboux;
        if (!d.lambdas.empty() && d.lambdas.size() != s.n) {
            diag(line_of("darboux.lambda"), "darboux.lambda needs N values");
        }
        if (!d.mixing.empty()) {
            if (d.mixing.size() != s.n) diag(0, "darboux needs mixing_1..mixing_N");
            for (std::size_t k = 0; k < d.mixing.size(); ++k)
                if (d.mixing[k].size() != s.n) {
                    diag(line_of("darboux.mixing_" + std::to_string(k + 1)),
                         "mixing_" + std::to_string(k + 1) + " needs N entries");
                }
        }
        if (!(d.kappa0 > 0)) diag(line_of("darboux.kappa0"), "kappa0 must be positive");
        if (!(d.t_lo <= 0.0 && 0.0 <= d.t_hi)) diag(line_of("darboux.t_window"), "t_window must contain 0");
        const auto& t = cfg_.tolerances;
        if (t.refine < 2) diag(line_of("tolerances.refine"), "refine needs at least 2 grid levels");
        if (!(t.dt_over_h > 0)) diag(line_of("tolerances.dt_over_h"), "dt_over_h must be positive");
        if (!(t.two_soliton_dt_over_h > 0)) {
            diag(line_of("tolerances.two_soliton_dt_over_h"), "two_soliton_dt_over_h must be positive");
        }
        if (!(t.order_lo < t.order_hi)) diag(line_of("tolerances.order_hi"), "order_lo must be below order_hi");
        for (const auto& fmt : cfg_.output.formats)
            if (fmt != "csv" && fmt != "json") diag(line_of("output.formats"), "unknown format '" + fmt + "'");
    }

    std::string_view text_;
    ScenarioConfig cfg_;
    std::vector<Diagnostic> diags_;
    std::set<std::string> seen_;
    std::set<std::string> keys_seen_;
    std::map<std::string, std::size_t> lines_;
};

}  // namespace detail

inline ScenarioConfig parse_config(std::string_view text) { return detail::Parser(text).run(); }

/// Canonical text: every section and key in a fixed order, defaults written out.
inline std::string emit_config(const ScenarioConfig& c) {
    using detail::format_complex;
    using detail::format_list;
    using detail::format_real;
    const auto cl = [](const std::vector<cplx>& v) { return format_list(v, format_complex); };
    std::ostringstream o;
    o << "[system]\nN = " << c.system.n << "\nJ = " << cl(c.system.j) << "\n\n";
    o << "[flow]\nn = " << c.flow.order << "\nf = " << cl(c.flow.f) << "\n\n";
    o << "[constants]\n";
    for (const auto& [i, a] : c.constants.alphas) o << "alpha_" << i << " = " << cl(a) << "\n";
    o << "\n[grid]\nx_min = " << format_real(c.grid.x_min) << "\nx_max = " << format_real(c.grid.x_max)
      << "\nnx = " << c.grid.nx << "\nt = " << format_list(c.grid.t, format_real) << "\n\n";
    o << "[potential]\nkind = " << c.potential.kind << "\namplitude = " << format_real(c.potential.amplitude)
      << "\ncenter = " << format_real(c.potential.center) << "\nwidth = " << format_real(c.potential.width) << "\n\n";
    const auto& d = c.darboux;
    o << "[darboux]\n";
    if (!d.lambdas.empty()) o << "lambda = " << cl(d.lambdas) << "\n";
    for (std::size_t k = 0; k < d.mixing.size(); ++k) o << "mixing_" << k + 1 << " = " << cl(d.mixing[k]) << "\n";
    o << "kappa0 = " << format_real(d.kappa0) << "\nc0 = " << format_real(d.c0) << "\n";
    if (d.second_lambda) o << "second_lambda = " << format_complex(*d.second_lambda) << "\n";
    o << "second_shift = " << format_real(d.second_shift) << "\nt_window = " << format_real(d.t_lo) << ", "
      << format_real(d.t_hi) << "\n\n";
    const auto& t = c.tolerances;
    o << "[tolerances]\n";
    const std::pair<const char*, double> reals[] = {
        {"dressing", t.dressing},   {"dual_route", t.dual_route}, {"flow", t.flow},
        {"rk4", t.rk4},             {"shift", t.shift},           {"similarity", t.similarity},
        {"governing", t.governing}, {"reduction", t.reduction},   {"asymptotic", t.asymptotic},
        {"rate", t.rate},           {"order_lo", t.order_lo},     {"order_hi", t.order_hi},
        {"dt_over_h", t.dt_over_h}, {"two_soliton_dt_over_h", t.two_soliton_dt_over_h},
        {"t_center", t.t_center}};
    for (const auto& [k, v] : reals) o << k << " = " << format_real(v) << "\n";
    o << "refine = " << t.refine << "\n\n";
    o << "[output]\ndirectory = " << c.output.directory
      << "\nformats = " << format_list(c.output.formats, [](const std::string& s) { return s; }) << "\n";
    return o.str();
}

}  // namespace nisakns

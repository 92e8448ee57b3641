#include "softqos/semiring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace softqos {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const char* kind_name(SemiringKind k) {
    switch (k) {
    case SemiringKind::Weighted: return "weighted";
    case SemiringKind::Fuzzy: return "fuzzy";
    case SemiringKind::Probabilistic: return "probabilistic";
    case SemiringKind::Classical: return "classical";
    case SemiringKind::SetBased: return "set";
    case SemiringKind::Product: return "product";
    }
    return "?";
}

std::string format_number(double v) {
    if (std::isinf(v)) return "inf";
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

[[noreturn]] void bad_payload(const SemiringSpec& spec, const std::string& what) {
    throw Error("invalid " + spec.to_string() + " value: " + what);
}

} // namespace

SpecPtr SemiringSpec::weighted() {
    static SpecPtr s(new SemiringSpec(SemiringKind::Weighted, {}, {}));
    return s;
}

SpecPtr SemiringSpec::fuzzy() {
    static SpecPtr s(new SemiringSpec(SemiringKind::Fuzzy, {}, {}));
    return s;
}

SpecPtr SemiringSpec::probabilistic() {
    static SpecPtr s(new SemiringSpec(SemiringKind::Probabilistic, {}, {}));
    return s;
}

SpecPtr SemiringSpec::classical() {
    static SpecPtr s(new SemiringSpec(SemiringKind::Classical, {}, {}));
    return s;
}

SpecPtr SemiringSpec::set_based(std::vector<std::string> universe) {
    if (universe.empty()) throw Error("set-based semiring needs a non-empty universe");
    std::sort(universe.begin(), universe.end());
    if (std::adjacent_find(universe.begin(), universe.end()) != universe.end())
        throw Error("set-based universe has duplicate symbols");
    return SpecPtr(new SemiringSpec(SemiringKind::SetBased, std::move(universe), {}));
}

SpecPtr SemiringSpec::product(std::vector<SpecPtr> components) {
    if (components.size() < 2) throw Error("product semiring needs at least two components");
    for (const auto& c : components)
        if (!c) throw Error("product semiring has a null component");
    return SpecPtr(new SemiringSpec(SemiringKind::Product, {}, std::move(components)));
}

bool SemiringSpec::operator==(const SemiringSpec& other) const {
    if (kind_ != other.kind_) return false;
    if (kind_ == SemiringKind::SetBased) return universe_ == other.universe_;
    if (kind_ == SemiringKind::Product) {
        if (components_.size() != other.components_.size()) return false;
        for (std::size_t i = 0; i < components_.size(); ++i)
            if (*components_[i] != *other.components_[i]) return false;
    }
    return true;
}

std::string SemiringSpec::to_string() const {
    if (kind_ == SemiringKind::SetBased) {
        std::string out = "set{";
        for (std::size_t i = 0; i < universe_.size(); ++i) {
            if (i) out += ",";
            out += universe_[i];
        }
        return out + "}";
    }
    if (kind_ == SemiringKind::Product) {
        std::string out = "product(";
        for (std::size_t i = 0; i < components_.size(); ++i) {
            if (i) out += ", ";
            out += components_[i]->to_string();
        }
        return out + ")";
    }
    return kind_name(kind_);
}

bool same_spec(const SpecPtr& a, const SpecPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

static void require_same_spec(const SemiringValue& a, const SemiringValue& b) {
    if (!same_spec(a.spec(), b.spec()))
        throw Error("semiring spec mismatch: " + a.spec()->to_string() + " vs " + b.spec()->to_string());
}

SemiringKind SemiringValue::kind() const { return spec_->kind(); }

SemiringValue SemiringValue::number(SpecPtr spec, double v) {
    if (std::isnan(v)) bad_payload(*spec, "NaN");
    switch (spec->kind()) {
    case SemiringKind::Weighted:
        if (v < 0) bad_payload(*spec, "negative cost " + format_number(v));
        break;
    case SemiringKind::Fuzzy:
    case SemiringKind::Probabilistic:
        if (v < 0.0 || v > 1.0) bad_payload(*spec, format_number(v) + " outside [0,1]");
        break;
    default:
        bad_payload(*spec, "numeric payload for non-numeric instance");
    }
    return SemiringValue(std::move(spec), v);
}

SemiringValue SemiringValue::boolean(SpecPtr spec, bool v) {
    if (spec->kind() != SemiringKind::Classical) bad_payload(*spec, "boolean payload");
    return SemiringValue(std::move(spec), v);
}

SemiringValue SemiringValue::symbols(SpecPtr spec, const std::vector<std::string>& syms) {
    if (spec->kind() != SemiringKind::SetBased) bad_payload(*spec, "symbol-set payload");
    const auto& uni = spec->universe();
    std::vector<bool> mask(uni.size(), false);
    for (const auto& s : syms) {
        auto it = std::lower_bound(uni.begin(), uni.end(), s);
        if (it == uni.end() || *it != s) bad_payload(*spec, "symbol '" + s + "' not in universe");
        mask[static_cast<std::size_t>(it - uni.begin())] = true;
    }
    return SemiringValue(std::move(spec), std::move(mask));
}

SemiringValue SemiringValue::tuple(SpecPtr spec, std::vector<SemiringValue> parts) {
    if (spec->kind() != SemiringKind::Product) bad_payload(*spec, "tuple payload");
    const auto& comps = spec->components();
    if (parts.size() != comps.size())
        bad_payload(*spec, "tuple arity " + std::to_string(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (!same_spec(parts[i].spec(), comps[i]))
            bad_payload(*spec, "component " + std::to_string(i) + " has spec " + parts[i].spec()->to_string());
    return SemiringValue(std::move(spec), std::move(parts));
}

double SemiringValue::num() const { return std::get<double>(payload_); }
bool SemiringValue::truth() const { return std::get<bool>(payload_); }
const std::vector<bool>& SemiringValue::mask() const { return std::get<std::vector<bool>>(payload_); }
const std::vector<SemiringValue>& SemiringValue::parts() const {
    return std::get<std::vector<SemiringValue>>(payload_);
}

std::vector<std::string> SemiringValue::symbol_list() const {
    const auto& m = mask();
    const auto& uni = spec_->universe();
    std::vector<std::string> out;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i]) out.push_back(uni[i]);
    return out;
}

std::string SemiringValue::to_literal() const {
    switch (kind()) {
    case SemiringKind::Weighted:
    case SemiringKind::Fuzzy:
    case SemiringKind::Probabilistic:
        return format_number(num());
    case SemiringKind::Classical:
        return truth() ? "true" : "false";
    case SemiringKind::SetBased: {
        std::string out = "{";
        auto syms = symbol_list();
        for (std::size_t i = 0; i < syms.size(); ++i) {
            if (i) out += ",";
            out += syms[i];
        }
        return out + "}";
    }
    case SemiringKind::Product: {
        std::string out = "(";
        const auto& ps = parts();
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (i) out += ", ";
            out += ps[i].to_literal();
        }
        return out + ")";
    }
    }
    return "?";
}

std::string SemiringValue::display() const {
    if (kind() == SemiringKind::Probabilistic) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", num());
        return buf;
    }
    if (kind() == SemiringKind::Product) {
        std::string out = "(";
        const auto& ps = parts();
        for (std::size_t i = 0; i < ps.size(); ++i) {
            if (i) out += ", ";
            out += ps[i].display();
        }
        return out + ")";
    }
    return to_literal();
}

SemiringValue zero(const SpecPtr& spec) {
    switch (spec->kind()) {
    case SemiringKind::Weighted: return SemiringValue::number(spec, kInf);
    case SemiringKind::Fuzzy:
    case SemiringKind::Probabilistic: return SemiringValue::number(spec, 0.0);
    case SemiringKind::Classical: return SemiringValue::boolean(spec, false);
    case SemiringKind::SetBased: return SemiringValue::symbols(spec, {});
    case SemiringKind::Product: {
        std::vector<SemiringValue> parts;
        for (const auto& c : spec->components()) parts.push_back(zero(c));
        return SemiringValue::tuple(spec, std::move(parts));
    }
    }
    throw Error("unreachable");
}

SemiringValue one(const SpecPtr& spec) {
    switch (spec->kind()) {
    case SemiringKind::Weighted: return SemiringValue::number(spec, 0.0);
    case SemiringKind::Fuzzy:
    case SemiringKind::Probabilistic: return SemiringValue::number(spec, 1.0);
    case SemiringKind::Classical: return SemiringValue::boolean(spec, true);
    case SemiringKind::SetBased: return SemiringValue::symbols(spec, spec->universe());
    case SemiringKind::Product: {
        std::vector<SemiringValue> parts;
        for (const auto& c : spec->components()) parts.push_back(one(c));
        return SemiringValue::tuple(spec, std::move(parts));
    }
    }
    throw Error("unreachable");
}

SemiringValue plus(const SemiringValue& a, const SemiringValue& b) {
    require_same_spec(a, b);
    const auto& spec = a.spec();
    switch (spec->kind()) {
    case SemiringKind::Weighted: return SemiringValue::number(spec, std::min(a.num(), b.num()));
    case SemiringKind::Fuzzy:
    case SemiringKind::Probabilistic: return SemiringValue::number(spec, std::max(a.num(), b.num()));
    case SemiringKind::Classical: return SemiringValue::boolean(spec, a.truth() || b.truth());
    case SemiringKind::SetBased: {
        std::vector<std::string> syms;
        const auto& ma = a.mask();
        const auto& mb = b.mask();
        const auto& uni = spec->universe();
        for (std::size_t i = 0; i < ma.size(); ++i)
            if (ma[i] || mb[i]) syms.push_back(uni[i]);
        return SemiringValue::symbols(spec, syms);
    }
    case SemiringKind::Product: {
        std::vector<SemiringValue> parts;
        for (std::size_t i = 0; i < a.parts().size(); ++i)
            parts.push_back(plus(a.parts()[i], b.parts()[i]));
        return SemiringValue::tuple(spec, std::move(parts));
    }
    }
    throw Error("unreachable");
}

SemiringValue times(const SemiringValue& a, const SemiringValue& b) {
    require_same_spec(a, b);
    const auto& spec = a.spec();
    switch (spec->kind()) {
    case SemiringKind::Weighted: return SemiringValue::number(spec, a.num() + b.num());
    case SemiringKind::Fuzzy: return SemiringValue::number(spec, std::min(a.num(), b.num()));
    case SemiringKind::Probabilistic: return SemiringValue::number(spec, a.num() * b.num());
    case SemiringKind::Classical: return SemiringValue::boolean(spec, a.truth() && b.truth());
    case SemiringKind::SetBased: {
        std::vector<std::string> syms;
        const auto& ma = a.mask();
        const auto& mb = b.mask();
        const auto& uni = spec->universe();
        for (std::size_t i = 0; i < ma.size(); ++i)
            if (ma[i] && mb[i]) syms.push_back(uni[i]);
        return SemiringValue::symbols(spec, syms);
    }
    case SemiringKind::Product: {
        std::vector<SemiringValue> parts;
        for (std::size_t i = 0; i < a.parts().size(); ++i)
            parts.push_back(times(a.parts()[i], b.parts()[i]));
        return SemiringValue::tuple(spec, std::move(parts));
    }
    }
    throw Error("unreachable");
}

SemiringValue residual(const SemiringValue& a, const SemiringValue& b) {
    require_same_spec(a, b);
    const auto& spec = a.spec();
    switch (spec->kind()) {
    case SemiringKind::Weighted: {
        // max(a - b, 0); any division by the bottom cost (inf) yields the
        // top (0), including inf / inf.
        if (std::isinf(b.num())) return SemiringValue::number(spec, 0.0);
        if (std::isinf(a.num())) return SemiringValue::number(spec, kInf);
        return SemiringValue::number(spec, std::max(a.num() - b.num(), 0.0));
    }
    case SemiringKind::Fuzzy:
        return SemiringValue::number(spec, b.num() <= a.num() ? 1.0 : a.num());
    case SemiringKind::Probabilistic: {
        if (b.num() <= a.num()) return SemiringValue::number(spec, 1.0);
        double q = a.num() / b.num();
        return SemiringValue::number(spec, std::clamp(q, 0.0, 1.0));
    }
    case SemiringKind::Classical:
        return SemiringValue::boolean(spec, !b.truth() || a.truth());
    case SemiringKind::SetBased: {
        std::vector<std::string> syms;
        const auto& ma = a.mask();
        const auto& mb = b.mask();
        const auto& uni = spec->universe();
        for (std::size_t i = 0; i < ma.size(); ++i)
            if (ma[i] || !mb[i]) syms.push_back(uni[i]);
        return SemiringValue::symbols(spec, syms);
    }
    case SemiringKind::Product: {
        std::vector<SemiringValue> parts;
        for (std::size_t i = 0; i < a.parts().size(); ++i)
            parts.push_back(residual(a.parts()[i], b.parts()[i]));
        return SemiringValue::tuple(spec, std::move(parts));
    }
    }
    throw Error("unreachable");
}

bool equal(const SemiringValue& a, const SemiringValue& b) {
    if (!same_spec(a.spec(), b.spec())) return false;
    switch (a.kind()) {
    case SemiringKind::Weighted:
    case SemiringKind::Fuzzy:
        return a.num() == b.num();
    case SemiringKind::Probabilistic:
        return std::abs(a.num() - b.num()) <= kProbTolerance;
    case SemiringKind::Classical:
        return a.truth() == b.truth();
    case SemiringKind::SetBased:
        return a.mask() == b.mask();
    case SemiringKind::Product: {
        for (std::size_t i = 0; i < a.parts().size(); ++i)
            if (!equal(a.parts()[i], b.parts()[i])) return false;
        return true;
    }
    }
    return false;
}

bool leq(const SemiringValue& a, const SemiringValue& b) {
    require_same_spec(a, b);
    return equal(plus(a, b), b);
}

bool lt(const SemiringValue& a, const SemiringValue& b) {
    return leq(a, b) && !equal(a, b);
}

// ---------------------------------------------------------------------------
// Literal parsing. A small hand parser over the shared literal syntax; the
// file-format lexer reuses these by slicing out the balanced literal text.

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!consume(c))
            throw Error(std::string("expected '") + c + "' in literal: " + std::string(text));
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_' || text[pos] == '\''))
            ++pos;
        if (start == pos) throw Error("expected identifier in literal: " + std::string(text));
        return std::string(text.substr(start, pos - start));
    }
    double number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' || text[pos] == 'e' ||
                text[pos] == 'E' || text[pos] == '+' || text[pos] == '-'))
            ++pos;
        double v = 0;
        auto res = std::from_chars(text.data() + start, text.data() + pos, v);
        if (res.ec != std::errc() || res.ptr == text.data() + start)
            throw Error("expected number in literal: " + std::string(text));
        pos = static_cast<std::size_t>(res.ptr - text.data());
        return v;
    }
};

SpecPtr parse_spec(Cursor& c) {
    std::string name = c.ident();
    if (name == "weighted") return SemiringSpec::weighted();
    if (name == "fuzzy") return SemiringSpec::fuzzy();
    if (name == "probabilistic") return SemiringSpec::probabilistic();
    if (name == "classical") return SemiringSpec::classical();
    if (name == "set") {
        c.expect('{');
        std::vector<std::string> uni;
        if (c.peek() != '}') {
            uni.push_back(c.ident());
            while (c.consume(',')) uni.push_back(c.ident());
        }
        c.expect('}');
        return SemiringSpec::set_based(std::move(uni));
    }
    if (name == "product") {
        c.expect('(');
        std::vector<SpecPtr> comps;
        comps.push_back(parse_spec(c));
        while (c.consume(',')) comps.push_back(parse_spec(c));
        c.expect(')');
        return SemiringSpec::product(std::move(comps));
    }
    throw Error("unknown semiring '" + name + "'");
}

SemiringValue parse_value(Cursor& c, const SpecPtr& spec) {
    switch (spec->kind()) {
    case SemiringKind::Weighted: {
        if (std::isalpha(static_cast<unsigned char>(c.peek()))) {
            std::string w = c.ident();
            if (w == "inf") return SemiringValue::number(spec, kInf);
            throw Error("bad weighted literal '" + w + "'");
        }
        return SemiringValue::number(spec, c.number());
    }
    case SemiringKind::Fuzzy:
    case SemiringKind::Probabilistic:
        return SemiringValue::number(spec, c.number());
    case SemiringKind::Classical: {
        std::string w = c.ident();
        if (w == "true") return SemiringValue::boolean(spec, true);
        if (w == "false") return SemiringValue::boolean(spec, false);
        throw Error("bad classical literal '" + w + "'");
    }
    case SemiringKind::SetBased: {
        c.expect('{');
        std::vector<std::string> syms;
        if (c.peek() != '}') {
            syms.push_back(c.ident());
            while (c.consume(',')) syms.push_back(c.ident());
        }
        c.expect('}');
        return SemiringValue::symbols(spec, syms);
    }
    case SemiringKind::Product: {
        c.expect('(');
        std::vector<SemiringValue> parts;
        const auto& comps = spec->components();
        for (std::size_t i = 0; i < comps.size(); ++i) {
            if (i) c.expect(',');
            parts.push_back(parse_value(c, comps[i]));
        }
        c.expect(')');
        return SemiringValue::tuple(spec, std::move(parts));
    }
    }
    throw Error("unreachable");
}

} // namespace

SpecPtr parse_spec_literal(std::string_view text) {
    Cursor c{text};
    SpecPtr spec = parse_spec(c);
    if (!c.eof()) throw Error("trailing characters in semiring literal: " + std::string(text));
    return spec;
}

SemiringValue parse_value_literal(const SpecPtr& spec, std::string_view text) {
    Cursor c{text};
    SemiringValue v = parse_value(c, spec);
    if (!c.eof()) throw Error("trailing characters in value literal: " + std::string(text));
    return v;
}

} // namespace softqos

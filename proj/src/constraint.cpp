#include "softqos/constraint.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace softqos {

std::string domain_value_to_string(const DomainValue& v) {
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    return std::get<std::string>(v);
}

bool domain_value_equal(const DomainValue& a, const DomainValue& b) { return a == b; }

// ---------------------------------------------------------------------------
// ConstraintSpace

SpacePtr ConstraintSpace::create(SpecPtr spec, std::vector<VariableDecl> variables) {
    if (!spec) throw Error("constraint space needs a semiring spec");
    auto space = std::shared_ptr<ConstraintSpace>(new ConstraintSpace());
    space->spec_ = std::move(spec);
    space->vars_ = std::move(variables);
    for (std::size_t i = 0; i < space->vars_.size(); ++i) {
        const auto& v = space->vars_[i];
        if (v.domain.empty()) throw Error("variable '" + v.name + "' has an empty domain");
        for (std::size_t j = 0; j < v.domain.size(); ++j)
            for (std::size_t k = j + 1; k < v.domain.size(); ++k)
                if (v.domain[j] == v.domain[k])
                    throw Error("variable '" + v.name + "' has duplicate domain value " +
                                domain_value_to_string(v.domain[j]));
        if (!space->by_name_.emplace(v.name, static_cast<int>(i)).second)
            throw Error("duplicate variable '" + v.name + "'");
        if (v.fresh) space->fresh_pool_.push_back(static_cast<int>(i));
    }
    return space;
}

int ConstraintSpace::index_of(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw Error("unknown variable '" + name + "'");
    return it->second;
}

std::optional<int> ConstraintSpace::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

std::size_t ConstraintSpace::domain_index(int var, const DomainValue& value) const {
    const auto& dom = vars_[static_cast<std::size_t>(var)].domain;
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (dom[i] == value) return i;
    throw Error("value " + domain_value_to_string(value) + " not in domain of '" +
                vars_[static_cast<std::size_t>(var)].name + "'");
}

bool ConstraintSpace::operator==(const ConstraintSpace& other) const {
    if (!same_spec(spec_, other.spec_)) return false;
    if (vars_.size() != other.vars_.size()) return false;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i].name != other.vars_[i].name) return false;
        if (vars_[i].domain != other.vars_[i].domain) return false;
        if (vars_[i].fresh != other.vars_[i].fresh) return false;
    }
    return true;
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

static void require_same_space(const Constraint& a, const Constraint& b) {
    if (!same_space(a.space(), b.space())) throw Error("constraint space mismatch");
}

// ---------------------------------------------------------------------------
// Assignment

void Assignment::bind(const std::string& name, DomainValue value) {
    bindings_[name] = std::move(value);
}

std::optional<DomainValue> Assignment::get(const std::string& name) const {
    auto it = bindings_.find(name);
    if (it == bindings_.end()) return std::nullopt;
    return it->second;
}

std::string Assignment::to_string() const {
    std::string out;
    for (const auto& [name, value] : bindings_) {
        if (!out.empty()) out += ", ";
        out += name + "=" + domain_value_to_string(value);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Table shape helpers: mixed-radix indexing over a sorted support.

namespace {

struct Shape {
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> strides; // last variable fastest
    std::size_t total = 1;

    Shape(const ConstraintSpace& space, const std::vector<int>& support) {
        sizes.reserve(support.size());
        for (int v : support) sizes.push_back(space.variable(v).domain.size());
        strides.assign(sizes.size(), 1);
        std::size_t acc = 1;
        for (std::size_t i = sizes.size(); i-- > 0;) {
            strides[i] = acc;
            acc *= sizes[i];
        }
        total = acc;
    }

    std::vector<std::size_t> decode(std::size_t idx) const {
        std::vector<std::size_t> tuple(sizes.size());
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            tuple[i] = (idx / strides[i]) % sizes[i];
        }
        return tuple;
    }
};

std::vector<int> sorted_union(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// For operand support s within union support u: positions of s's variables
// inside u, used to pick operand sub-tuples out of union tuples.
std::vector<std::size_t> positions_in(const std::vector<int>& s, const std::vector<int>& u) {
    std::vector<std::size_t> pos;
    pos.reserve(s.size());
    for (int v : s) {
        auto it = std::lower_bound(u.begin(), u.end(), v);
        pos.push_back(static_cast<std::size_t>(it - u.begin()));
    }
    return pos;
}

std::size_t sub_index(const std::vector<std::size_t>& unionTuple, const std::vector<std::size_t>& positions,
                      const Shape& shape) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        idx += unionTuple[positions[i]] * shape.strides[i];
    return idx;
}

Constraint pointwise(const Constraint& a, const Constraint& b,
                     const std::function<SemiringValue(const SemiringValue&, const SemiringValue&)>& op) {
    require_same_space(a, b);
    const auto& space = *a.space();
    std::vector<int> u = sorted_union(a.support(), b.support());
    Shape us(space, u);
    Shape as(space, a.support());
    Shape bs(space, b.support());
    auto apos = positions_in(a.support(), u);
    auto bpos = positions_in(b.support(), u);
    std::vector<SemiringValue> table;
    table.reserve(us.total);
    for (std::size_t idx = 0; idx < us.total; ++idx) {
        auto tuple = us.decode(idx);
        table.push_back(op(a.value_at(sub_index(tuple, apos, as)), b.value_at(sub_index(tuple, bpos, bs))));
    }
    return Constraint(a.space(), std::move(u), std::move(table));
}

} // namespace

// ---------------------------------------------------------------------------
// Constraint

Constraint::Constraint(SpacePtr space, std::vector<int> support, std::vector<SemiringValue> table)
    : space_(std::move(space)), support_(std::move(support)), table_(std::move(table)) {
    if (!space_) throw Error("constraint needs a space");
    if (!std::is_sorted(support_.begin(), support_.end()) ||
        std::adjacent_find(support_.begin(), support_.end()) != support_.end())
        throw Error("constraint support must be sorted and duplicate-free");
    for (int v : support_)
        if (v < 0 || static_cast<std::size_t>(v) >= space_->variable_count())
            throw Error("constraint support references an unknown variable");
    Shape shape(*space_, support_);
    if (table_.size() != shape.total)
        throw Error("constraint table has " + std::to_string(table_.size()) + " entries; expected " +
                    std::to_string(shape.total));
    for (const auto& v : table_)
        if (!same_spec(v.spec(), space_->spec()))
            throw Error("constraint table value spec differs from the space's semiring");
}

Constraint Constraint::constant(SpacePtr space, SemiringValue value) {
    std::vector<SemiringValue> table;
    table.push_back(std::move(value));
    return Constraint(std::move(space), {}, std::move(table));
}

Constraint Constraint::diagonal(SpacePtr space, const std::string& x, const std::string& y) {
    int ix = space->index_of(x);
    int iy = space->index_of(y);
    if (ix == iy) throw Error("diagonal constraint needs two distinct variables");
    if (space->variable(ix).domain != space->variable(iy).domain)
        throw Error("diagonal constraint: '" + x + "' and '" + y + "' have different domains");
    const SemiringValue o = one(space->spec());
    const SemiringValue z = zero(space->spec());
    std::vector<int> support = {std::min(ix, iy), std::max(ix, iy)};
    const auto& dom = space->variable(ix).domain;
    std::vector<SemiringValue> table;
    table.reserve(dom.size() * dom.size());
    for (std::size_t i = 0; i < dom.size(); ++i)
        for (std::size_t j = 0; j < dom.size(); ++j)
            table.push_back(i == j ? o : z);
    return Constraint(std::move(space), std::move(support), std::move(table));
}

Constraint Constraint::build(SpacePtr space, const std::vector<std::string>& support,
                             const std::function<SemiringValue(const std::vector<DomainValue>&)>& row) {
    std::vector<int> idxs;
    idxs.reserve(support.size());
    for (const auto& name : support) idxs.push_back(space->index_of(name));
    std::vector<int> sorted = idxs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("constraint support has duplicate variables");
    Shape shape(*space, sorted);
    // map from sorted position back to the caller's parameter order
    std::vector<std::size_t> order(sorted.size());
    for (std::size_t i = 0; i < idxs.size(); ++i) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), idxs[i]);
        order[static_cast<std::size_t>(it - sorted.begin())] = i;
    }
    std::vector<SemiringValue> table;
    table.reserve(shape.total);
    std::vector<DomainValue> args(sorted.size());
    for (std::size_t idx = 0; idx < shape.total; ++idx) {
        auto tuple = shape.decode(idx);
        for (std::size_t i = 0; i < sorted.size(); ++i)
            args[order[i]] = space->variable(sorted[i]).domain[tuple[i]];
        table.push_back(row(args));
    }
    return Constraint(std::move(space), std::move(sorted), std::move(table));
}

std::vector<std::string> Constraint::support_names() const {
    std::vector<std::string> out;
    out.reserve(support_.size());
    for (int v : support_) out.push_back(space_->variable(v).name);
    return out;
}

bool Constraint::has_in_support(int var) const {
    return std::binary_search(support_.begin(), support_.end(), var);
}

std::vector<DomainValue> Constraint::tuple_at(std::size_t idx) const {
    Shape shape(*space_, support_);
    auto tuple = shape.decode(idx);
    std::vector<DomainValue> out;
    out.reserve(tuple.size());
    for (std::size_t i = 0; i < tuple.size(); ++i)
        out.push_back(space_->variable(support_[i]).domain[tuple[i]]);
    return out;
}

SemiringValue Constraint::eval(const Assignment& eta) const {
    Shape shape(*space_, support_);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < support_.size(); ++i) {
        const auto& name = space_->variable(support_[i]).name;
        auto bound = eta.get(name);
        if (!bound) throw Error("assignment does not bind support variable '" + name + "'");
        idx += space_->domain_index(support_[i], *bound) * shape.strides[i];
    }
    return table_[idx];
}

Constraint Constraint::rename(const std::map<std::string, std::string>& renames) const {
    bool relevant = false;
    for (const auto& [from, to] : renames) {
        auto idx = space_->find(from);
        if (idx && has_in_support(*idx) && from != to) relevant = true;
    }
    if (!relevant) return *this;

    std::vector<int> newSupport;
    newSupport.reserve(support_.size());
    for (int v : support_) {
        const auto& name = space_->variable(v).name;
        auto it = renames.find(name);
        if (it == renames.end()) {
            newSupport.push_back(v);
            continue;
        }
        int target = space_->index_of(it->second);
        if (space_->variable(target).domain != space_->variable(v).domain)
            throw Error("cannot rename '" + name + "' to '" + it->second + "': domains differ");
        newSupport.push_back(target);
    }
    std::vector<int> sorted = newSupport;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("constraint rename collides on a support variable");

    Shape oldShape(*space_, support_);
    Shape newShape(*space_, sorted);
    // position of each old support slot inside the new sorted support
    std::vector<std::size_t> slot(newSupport.size());
    for (std::size_t i = 0; i < newSupport.size(); ++i) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), newSupport[i]);
        slot[i] = static_cast<std::size_t>(it - sorted.begin());
    }
    std::vector<SemiringValue> table;
    table.reserve(newShape.total);
    for (std::size_t idx = 0; idx < newShape.total; ++idx) {
        auto tuple = newShape.decode(idx);
        std::size_t oldIdx = 0;
        for (std::size_t i = 0; i < newSupport.size(); ++i)
            oldIdx += tuple[slot[i]] * oldShape.strides[i];
        table.push_back(table_[oldIdx]);
    }
    return Constraint(space_, std::move(sorted), std::move(table));
}

// ---------------------------------------------------------------------------
// Operator algebra

Constraint combine(const Constraint& a, const Constraint& b) {
    return pointwise(a, b, [](const SemiringValue& x, const SemiringValue& y) { return times(x, y); });
}

Constraint divide(const Constraint& a, const Constraint& b) {
    return pointwise(a, b, [](const SemiringValue& x, const SemiringValue& y) { return residual(x, y); });
}

Constraint combine_all(const SpacePtr& space, const std::vector<Constraint>& cs) {
    Constraint acc = Constraint::constant(space, one(space->spec()));
    for (const auto& c : cs) acc = combine(acc, c);
    return acc;
}

Constraint project(const Constraint& c, const std::vector<std::string>& keep) {
    const auto& space = *c.space();
    std::set<int> keepSet;
    for (const auto& name : keep) keepSet.insert(space.index_of(name));

    std::vector<int> kept;
    std::vector<int> gone;
    for (int v : c.support())
        (keepSet.count(v) ? kept : gone).push_back(v);
    if (gone.empty()) return c;

    Shape oldShape(space, c.support());
    Shape keptShape(space, kept);
    Shape goneShape(space, gone);
    auto keptPos = positions_in(kept, c.support());
    auto gonePos = positions_in(gone, c.support());

    std::vector<SemiringValue> table;
    table.reserve(keptShape.total);
    for (std::size_t ki = 0; ki < keptShape.total; ++ki) {
        auto kt = keptShape.decode(ki);
        std::optional<SemiringValue> acc;
        for (std::size_t gi = 0; gi < goneShape.total; ++gi) {
            auto gt = goneShape.decode(gi);
            std::size_t idx = 0;
            for (std::size_t i = 0; i < kt.size(); ++i) idx += kt[i] * oldShape.strides[keptPos[i]];
            for (std::size_t i = 0; i < gt.size(); ++i) idx += gt[i] * oldShape.strides[gonePos[i]];
            const auto& v = c.value_at(idx);
            acc = acc ? plus(*acc, v) : v;
        }
        table.push_back(std::move(*acc));
    }
    return Constraint(c.space(), std::move(kept), std::move(table));
}

Constraint hide(const Constraint& c, const std::string& x) {
    int ix = c.space()->index_of(x);
    std::vector<std::string> keep;
    for (const auto& v : c.space()->variables())
        if (c.space()->index_of(v.name) != ix) keep.push_back(v.name);
    return project(c, keep);
}

bool leq_constraint(const Constraint& a, const Constraint& b) {
    require_same_space(a, b);
    const auto& space = *a.space();
    std::vector<int> u = sorted_union(a.support(), b.support());
    Shape us(space, u);
    Shape as(space, a.support());
    Shape bs(space, b.support());
    auto apos = positions_in(a.support(), u);
    auto bpos = positions_in(b.support(), u);
    for (std::size_t idx = 0; idx < us.total; ++idx) {
        auto tuple = us.decode(idx);
        if (!leq(a.value_at(sub_index(tuple, apos, as)), b.value_at(sub_index(tuple, bpos, bs))))
            return false;
    }
    return true;
}

bool lt_constraint(const Constraint& a, const Constraint& b) {
    if (!leq_constraint(a, b)) return false;
    // strict: below and not pointwise-equal on the union support
    const auto& space = *a.space();
    std::vector<int> u = sorted_union(a.support(), b.support());
    Shape us(space, u);
    Shape as(space, a.support());
    Shape bs(space, b.support());
    auto apos = positions_in(a.support(), u);
    auto bpos = positions_in(b.support(), u);
    for (std::size_t idx = 0; idx < us.total; ++idx) {
        auto tuple = us.decode(idx);
        if (!equal(a.value_at(sub_index(tuple, apos, as)), b.value_at(sub_index(tuple, bpos, bs))))
            return true;
    }
    return false;
}

bool equal_constraint(const Constraint& a, const Constraint& b) {
    if (!same_space(a.space(), b.space())) return false;
    if (a.support() != b.support()) return false;
    for (std::size_t i = 0; i < a.table_size(); ++i)
        if (!equal(a.value_at(i), b.value_at(i))) return false;
    return true;
}

bool entails(const std::vector<Constraint>& cs, const Constraint& c) {
    return leq_constraint(combine_all(c.space(), cs), c);
}

SemiringValue scalar(const Constraint& c) {
    if (!c.support().empty()) throw Error("scalar() needs an empty-support constraint");
    return c.value_at(0);
}

SemiringValue blevel_of(const Constraint& c) { return scalar(project(c, {})); }

std::string table_to_string(const Constraint& c) {
    std::ostringstream out;
    auto names = c.support_names();
    for (std::size_t idx = 0; idx < c.table_size(); ++idx) {
        auto tuple = c.tuple_at(idx);
        out << "(";
        for (std::size_t i = 0; i < tuple.size(); ++i) {
            if (i) out << ",";
            out << domain_value_to_string(tuple[i]);
        }
        out << ") -> " << c.value_at(idx).display() << "\n";
    }
    return out.str();
}

} // namespace softqos

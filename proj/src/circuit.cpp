#include "pitgen/circuit.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace pitgen {

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t s = a + b;
    return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b)
{
    if (a == 0 || b == 0) {
        return 0;
    }
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    if (p > std::numeric_limits<std::uint64_t>::max()) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(p);
}

} // namespace

NodeId Circuit::output() const
{
    if (!output_) {
        throw std::logic_error("Circuit: no output node set");
    }
    return *output_;
}

void Circuit::check_children(const std::vector<NodeId>& children) const
{
    if (children.empty()) {
        throw std::invalid_argument("Circuit: gate needs at least one child");
    }
    for (NodeId c : children) {
        if (c >= gates_.size()) {
            throw std::invalid_argument("Circuit: child " + std::to_string(c)
                                        + " does not exist yet (DAG order violated)");
        }
    }
}

NodeId Circuit::add_input(VarId v)
{
    if (v >= arena_->size()) {
        throw std::invalid_argument("Circuit::add_input: variable id not in arena");
    }
    gates_.push_back({ GateKind::input, v, 0, {}, {} });
    return static_cast<NodeId>(gates_.size() - 1);
}

NodeId Circuit::add_const(std::uint64_t value)
{
    gates_.push_back({ GateKind::constant, 0, field_->reduce(value), {}, {} });
    return static_cast<NodeId>(gates_.size() - 1);
}

NodeId Circuit::add_sum(std::vector<NodeId> children)
{
    check_children(children);
    gates_.push_back({ GateKind::add, 0, 0, std::move(children), {} });
    return static_cast<NodeId>(gates_.size() - 1);
}

NodeId Circuit::add_product(std::vector<NodeId> children)
{
    check_children(children);
    gates_.push_back({ GateKind::mul, 0, 0, std::move(children), {} });
    return static_cast<NodeId>(gates_.size() - 1);
}

NodeId Circuit::add_pow_product(std::vector<NodeId> children, std::vector<std::uint32_t> labels)
{
    check_children(children);
    if (labels.size() != children.size()) {
        throw std::invalid_argument("Circuit: power-product needs one label per child");
    }
    for (std::uint32_t e : labels) {
        if (e == 0) {
            throw std::invalid_argument("Circuit: power-product labels must be >= 1");
        }
    }
    gates_.push_back({ GateKind::pow_product, 0, 0, std::move(children), std::move(labels) });
    return static_cast<NodeId>(gates_.size() - 1);
}

void Circuit::set_output(NodeId id)
{
    if (id >= gates_.size()) {
        throw std::invalid_argument("Circuit::set_output: unknown node");
    }
    output_ = id;
}

std::uint64_t Circuit::eval(const std::vector<std::uint64_t>& point) const
{
    if (point.size() != arena_->size()) {
        throw std::invalid_argument("Circuit::eval: point arity " + std::to_string(point.size())
                                    + " does not match arena size "
                                    + std::to_string(arena_->size()));
    }
    std::vector<std::uint64_t> val(gates_.size(), 0);
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        switch (g.kind) {
        case GateKind::input:
            val[i] = field_->reduce(point[g.var]);
            break;
        case GateKind::constant:
            val[i] = g.value;
            break;
        case GateKind::add: {
            std::uint64_t acc = 0;
            for (NodeId c : g.children) {
                acc = field_->add(acc, val[c]);
            }
            val[i] = acc;
            break;
        }
        case GateKind::mul: {
            std::uint64_t acc = 1;
            for (NodeId c : g.children) {
                acc = field_->mul(acc, val[c]);
            }
            val[i] = acc;
            break;
        }
        case GateKind::pow_product: {
            std::uint64_t acc = 1;
            for (std::size_t j = 0; j < g.children.size(); ++j) {
                acc = field_->mul(acc, field_->pow(val[g.children[j]],
                                                   static_cast<std::uint64_t>(g.labels[j])));
            }
            val[i] = acc;
            break;
        }
        }
    }
    return val[output()];
}

SparsePoly Circuit::expand(std::size_t budget) const
{
    std::vector<SparsePoly> val(gates_.size(), SparsePoly(*field_, arena_));
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        switch (g.kind) {
        case GateKind::input:
            val[i] = SparsePoly::variable(*field_, arena_, g.var);
            break;
        case GateKind::constant:
            val[i] = SparsePoly::constant(*field_, arena_, g.value);
            break;
        case GateKind::add: {
            SparsePoly acc(*field_, arena_);
            for (NodeId c : g.children) {
                acc += val[c];
            }
            val[i] = std::move(acc);
            break;
        }
        case GateKind::mul: {
            SparsePoly acc = SparsePoly::constant(*field_, arena_, 1);
            for (NodeId c : g.children) {
                acc = acc.mul_budgeted(val[c], budget);
            }
            val[i] = std::move(acc);
            break;
        }
        case GateKind::pow_product: {
            SparsePoly acc = SparsePoly::constant(*field_, arena_, 1);
            for (std::size_t j = 0; j < g.children.size(); ++j) {
                acc = acc.mul_budgeted(val[g.children[j]].pow(g.labels[j], budget), budget);
            }
            val[i] = std::move(acc);
            break;
        }
        }
    }
    return val[output()];
}

SparsePoly Circuit::eval_poly(const std::vector<SparsePoly>& point, std::size_t budget) const
{
    if (point.size() != arena_->size()) {
        throw std::invalid_argument("Circuit::eval_poly: one polynomial per variable required");
    }
    const PrimeField& f = point.empty() ? *field_ : point[0].field();
    ArenaPtr target = point.empty() ? arena_ : point[0].arena();
    std::vector<SparsePoly> val(gates_.size(), SparsePoly(f, target));
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        switch (g.kind) {
        case GateKind::input:
            val[i] = point[g.var];
            break;
        case GateKind::constant:
            val[i] = SparsePoly::constant(f, target, g.value);
            break;
        case GateKind::add: {
            SparsePoly acc(f, target);
            for (NodeId c : g.children) {
                acc += val[c];
            }
            val[i] = std::move(acc);
            break;
        }
        case GateKind::mul: {
            SparsePoly acc = SparsePoly::constant(f, target, 1);
            for (NodeId c : g.children) {
                acc = acc.mul_budgeted(val[c], budget);
            }
            val[i] = std::move(acc);
            break;
        }
        case GateKind::pow_product: {
            SparsePoly acc = SparsePoly::constant(f, target, 1);
            for (std::size_t j = 0; j < g.children.size(); ++j) {
                acc = acc.mul_budgeted(val[g.children[j]].pow(g.labels[j], budget), budget);
            }
            val[i] = std::move(acc);
            break;
        }
        }
    }
    return val[output()];
}

std::size_t Circuit::size() const
{
    std::size_t wires = 0;
    for (const Gate& g : gates_) {
        if (g.kind == GateKind::pow_product) {
            for (std::uint32_t e : g.labels) {
                wires += e;
            }
        } else {
            wires += g.children.size();
        }
    }
    return wires;
}

unsigned Circuit::depth() const
{
    std::vector<unsigned> d(gates_.size(), 0);
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        for (NodeId c : gates_[i].children) {
            d[i] = std::max(d[i], d[c] + 1);
        }
    }
    return d[output()];
}

std::uint64_t Circuit::degree_bound() const
{
    std::vector<std::uint64_t> d(gates_.size(), 0);
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        switch (g.kind) {
        case GateKind::input:
            d[i] = 1;
            break;
        case GateKind::constant:
            d[i] = 0;
            break;
        case GateKind::add:
            for (NodeId c : g.children) {
                d[i] = std::max(d[i], d[c]);
            }
            break;
        case GateKind::mul:
            for (NodeId c : g.children) {
                d[i] = saturating_add(d[i], d[c]);
            }
            break;
        case GateKind::pow_product:
            for (std::size_t j = 0; j < g.children.size(); ++j) {
                d[i] = saturating_add(d[i], saturating_mul(g.labels[j], d[g.children[j]]));
            }
            break;
        }
    }
    return d[output()];
}

namespace {

const char* kind_name(GateKind k)
{
    switch (k) {
    case GateKind::input: return "input";
    case GateKind::constant: return "const";
    case GateKind::add: return "add";
    case GateKind::mul: return "mul";
    case GateKind::pow_product: return "powprod";
    }
    return "?";
}

GateKind kind_from_name(const std::string& s, std::size_t node_pos)
{
    if (s == "input") return GateKind::input;
    if (s == "const") return GateKind::constant;
    if (s == "add") return GateKind::add;
    if (s == "mul") return GateKind::mul;
    if (s == "powprod") return GateKind::pow_product;
    throw std::invalid_argument("circuit json: node " + std::to_string(node_pos)
                                + " has unknown kind '" + s + "'");
}

} // namespace

nlohmann::ordered_json Circuit::to_json() const
{
    nlohmann::ordered_json j;
    j["type"] = "circuit";
    j["field"] = { { "p", field_->modulus() } };
    nlohmann::ordered_json vars = nlohmann::ordered_json::array();
    for (VarId v = 0; v < arena_->size(); ++v) {
        vars.push_back(arena_->name(v));
    }
    j["vars"] = std::move(vars);
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < gates_.size(); ++i) {
        const Gate& g = gates_[i];
        nlohmann::ordered_json node;
        node["id"] = i;
        node["kind"] = kind_name(g.kind);
        switch (g.kind) {
        case GateKind::input:
            node["var"] = arena_->name(g.var);
            break;
        case GateKind::constant:
            node["value"] = g.value;
            break;
        case GateKind::pow_product:
            node["children"] = g.children;
            node["labels"] = g.labels;
            break;
        default:
            node["children"] = g.children;
            break;
        }
        nodes.push_back(std::move(node));
    }
    j["nodes"] = std::move(nodes);
    j["output"] = output();
    return j;
}

Circuit Circuit::from_json(const nlohmann::json& j, const PrimeField& field)
{
    if (!j.is_object() || !j.contains("nodes") || !j.contains("output")) {
        throw std::invalid_argument("circuit json: expected an object with 'nodes' and 'output'");
    }
    if (j.contains("field") && j["field"].value("p", field.modulus()) != field.modulus()) {
        throw std::invalid_argument("circuit json: field mismatch (file says p = "
                                    + j["field"]["p"].dump() + ")");
    }
    auto arena = std::make_shared<VarArena>();
    if (j.contains("vars")) {
        for (const auto& v : j["vars"]) {
            arena->intern(v.get<std::string>());
        }
    }
    Circuit c(field, arena);
    std::size_t pos = 0;
    for (const auto& node : j["nodes"]) {
        std::size_t id = node.value("id", pos);
        if (id != pos) {
            throw std::invalid_argument("circuit json: node " + std::to_string(pos)
                                        + " carries id " + std::to_string(id)
                                        + "; ids must be dense and ordered");
        }
        GateKind kind = kind_from_name(node.at("kind").get<std::string>(), pos);
        try {
            switch (kind) {
            case GateKind::input: {
                std::string name = node.at("var").get<std::string>();
                auto v = arena->find(name);
                c.add_input(v ? *v : arena->intern(name));
                break;
            }
            case GateKind::constant:
                c.add_const(node.at("value").get<std::uint64_t>());
                break;
            case GateKind::add:
                c.add_sum(node.at("children").get<std::vector<NodeId>>());
                break;
            case GateKind::mul:
                c.add_product(node.at("children").get<std::vector<NodeId>>());
                break;
            case GateKind::pow_product:
                c.add_pow_product(node.at("children").get<std::vector<NodeId>>(),
                                  node.at("labels").get<std::vector<std::uint32_t>>());
                break;
            }
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("circuit json: node " + std::to_string(pos) + ": "
                                        + e.what());
        }
        ++pos;
    }
    NodeId out = j.at("output").get<NodeId>();
    if (out >= c.gates_.size()) {
        throw std::invalid_argument("circuit json: output references unknown node "
                                    + std::to_string(out));
    }
    c.set_output(out);
    return c;
}

// --- RoAbp -------------------------------------------------------------

void RoAbp::validate() const
{
    if (width == 0 || layers.empty()) {
        throw std::invalid_argument("roabp: needs positive width and at least one layer");
    }
    if (order.size() != layers.size()) {
        throw std::invalid_argument("roabp: one order variable per layer required");
    }
    std::set<VarId> seen;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (!seen.insert(order[i]).second) {
            throw std::invalid_argument("roabp: variable " + arena->name(order[i])
                                        + " read by more than one layer");
        }
        if (layers[i].size() != std::size_t(width) * width) {
            throw std::invalid_argument("roabp: layer " + std::to_string(i)
                                        + " is not a width x width matrix");
        }
        for (const SparsePoly& p : layers[i]) {
            for (VarId v : p.support()) {
                if (v != order[i]) {
                    throw std::invalid_argument("roabp: layer " + std::to_string(i)
                                                + " entry depends on " + arena->name(v)
                                                + ", expected only " + arena->name(order[i]));
                }
            }
            if (p.degree() > deg_bound) {
                throw std::invalid_argument("roabp: layer " + std::to_string(i)
                                            + " entry exceeds degree bound");
            }
        }
    }
}

std::uint64_t RoAbp::eval(const std::vector<std::uint64_t>& point) const
{
    // row vector e_1^T * M_1 * ... * M_L, then first component
    std::vector<std::uint64_t> row(width, 0);
    bool first = true;
    std::vector<std::uint64_t> next(width, 0);
    for (std::size_t i = 0; i < layers.size(); ++i) {
        std::fill(next.begin(), next.end(), 0);
        for (unsigned c = 0; c < width; ++c) {
            if (first) {
                next[c] = entry(i, 0, c).eval(point);
            } else {
                std::uint64_t acc = 0;
                for (unsigned r = 0; r < width; ++r) {
                    if (row[r] != 0) {
                        acc = field->add(acc, field->mul(row[r], entry(i, r, c).eval(point)));
                    }
                }
                next[c] = acc;
            }
        }
        row.swap(next);
        first = false;
    }
    return row[0];
}

SparsePoly RoAbp::expand(std::size_t budget) const
{
    std::vector<SparsePoly> row(width, SparsePoly(*field, arena));
    bool first = true;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        std::vector<SparsePoly> next(width, SparsePoly(*field, arena));
        for (unsigned c = 0; c < width; ++c) {
            if (first) {
                next[c] = entry(i, 0, c);
            } else {
                SparsePoly acc(*field, arena);
                for (unsigned r = 0; r < width; ++r) {
                    if (!row[r].is_zero()) {
                        acc += row[r].mul_budgeted(entry(i, r, c), budget);
                    }
                }
                next[c] = std::move(acc);
            }
        }
        row = std::move(next);
        first = false;
    }
    return row[0];
}

std::uint64_t RoAbp::degree_bound_total() const
{
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        unsigned layer_deg = 0;
        for (const SparsePoly& p : layers[i]) {
            layer_deg = std::max(layer_deg, p.degree());
        }
        d = saturating_add(d, layer_deg);
    }
    return d;
}

nlohmann::ordered_json RoAbp::to_json() const
{
    nlohmann::ordered_json j;
    j["type"] = "roabp";
    j["field"] = { { "p", field->modulus() } };
    j["width"] = width;
    j["deg_bound"] = deg_bound;
    nlohmann::ordered_json vars = nlohmann::ordered_json::array();
    for (VarId v = 0; v < arena->size(); ++v) {
        vars.push_back(arena->name(v));
    }
    j["vars"] = std::move(vars);
    nlohmann::ordered_json jlayers = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        nlohmann::ordered_json layer;
        layer["var"] = arena->name(order[i]);
        nlohmann::ordered_json matrix = nlohmann::ordered_json::array();
        for (unsigned r = 0; r < width; ++r) {
            nlohmann::ordered_json mrow = nlohmann::ordered_json::array();
            for (unsigned c = 0; c < width; ++c) {
                const SparsePoly& p = entry(i, r, c);
                // univariate coefficient list a0..ad in the layer variable
                std::vector<std::uint64_t> coeffs(deg_bound + 1, 0);
                for (const auto& [m, cf] : p.terms()) {
                    coeffs[m.is_one() ? 0 : m.powers[0].second] = cf;
                }
                mrow.push_back(coeffs);
            }
            matrix.push_back(std::move(mrow));
        }
        layer["matrix"] = std::move(matrix);
        jlayers.push_back(std::move(layer));
    }
    j["layers"] = std::move(jlayers);
    return j;
}

RoAbp RoAbp::from_json(const nlohmann::json& j, const PrimeField& field)
{
    if (!j.is_object() || j.value("type", "") != "roabp") {
        throw std::invalid_argument("roabp json: expected an object with type 'roabp'");
    }
    if (j.contains("field") && j["field"].value("p", field.modulus()) != field.modulus()) {
        throw std::invalid_argument("roabp json: field mismatch");
    }
    RoAbp a;
    a.field = &field;
    a.arena = std::make_shared<VarArena>();
    for (const auto& v : j.at("vars")) {
        a.arena->intern(v.get<std::string>());
    }
    a.width = j.at("width").get<unsigned>();
    a.deg_bound = j.at("deg_bound").get<unsigned>();
    for (const auto& layer : j.at("layers")) {
        std::string name = layer.at("var").get<std::string>();
        auto v = a.arena->find(name);
        if (!v) {
            throw std::invalid_argument("roabp json: layer variable '" + name
                                        + "' missing from vars");
        }
        a.order.push_back(*v);
        std::vector<SparsePoly> mat;
        const auto& rows = layer.at("matrix");
        for (const auto& row : rows) {
            for (const auto& cell : row) {
                SparsePoly p(field, a.arena);
                auto coeffs = cell.get<std::vector<std::uint64_t>>();
                for (std::size_t e = 0; e < coeffs.size(); ++e) {
                    p.add_term(Monomial::var(*v, static_cast<std::uint32_t>(e)), coeffs[e]);
                }
                mat.push_back(std::move(p));
            }
        }
        a.layers.push_back(std::move(mat));
    }
    a.validate();
    return a;
}

std::uint64_t member_eval(const ClassMember& m, const std::vector<std::uint64_t>& point)
{
    return std::visit([&](const auto& v) { return v.eval(point); }, m);
}

SparsePoly member_expand(const ClassMember& m, std::size_t budget)
{
    return std::visit([&](const auto& v) { return v.expand(budget); }, m);
}

std::uint64_t member_degree_bound(const ClassMember& m)
{
    if (const auto* c = std::get_if<Circuit>(&m)) {
        return c->degree_bound();
    }
    return std::get<RoAbp>(m).degree_bound_total();
}

nlohmann::ordered_json member_to_json(const ClassMember& m)
{
    return std::visit([](const auto& v) { return v.to_json(); }, m);
}

ClassMember member_from_json(const nlohmann::json& j, const PrimeField& field)
{
    if (j.is_object() && j.value("type", "") == "roabp") {
        return RoAbp::from_json(j, field);
    }
    return Circuit::from_json(j, field);
}

const ArenaPtr& member_arena(const ClassMember& m)
{
    if (const auto* c = std::get_if<Circuit>(&m)) {
        return c->arena();
    }
    return std::get<RoAbp>(m).arena;
}

// --- descriptors ---------------------------------------------------------

std::string class_name(const ClassDescriptor& desc)
{
    struct Namer {
        std::string operator()(const SigmaPiClass& c) const
        {
            return "sparse(s=" + std::to_string(c.s) + ",d=" + std::to_string(c.max_degree) + ")";
        }
        std::string operator()(const SigmaKPiSigmaClass& c) const
        {
            return "spsk(k=" + std::to_string(c.k) + ",d=" + std::to_string(c.d) + ")";
        }
        std::string operator()(const SmespClass& c) const
        {
            return "smesp(t=" + std::to_string(c.t) + ",s=" + std::to_string(c.s) + ")";
        }
        std::string operator()(const OccurKClass& c) const
        {
            return "occur(D=" + std::to_string(c.depth) + ",k=" + std::to_string(c.k)
                   + ",s=" + std::to_string(c.s) + ")";
        }
        std::string operator()(const CommRoAbpClass& c) const
        {
            return "commroabp(w=" + std::to_string(c.w) + ",d=" + std::to_string(c.d) + ")";
        }
        std::string operator()(const RoAbpClass& c) const
        {
            return "roabp(w=" + std::to_string(c.w) + ",d=" + std::to_string(c.d) + ")";
        }
    };
    return std::visit(Namer{}, desc);
}

nlohmann::ordered_json class_to_json(const ClassDescriptor& desc)
{
    nlohmann::ordered_json j;
    if (const auto* c = std::get_if<SigmaPiClass>(&desc)) {
        j["class"] = "sparse";
        j["s"] = c->s;
        j["max_degree"] = c->max_degree;
    } else if (const auto* c = std::get_if<SigmaKPiSigmaClass>(&desc)) {
        j["class"] = "spsk";
        j["k"] = c->k;
        j["d"] = c->d;
    } else if (const auto* c = std::get_if<SmespClass>(&desc)) {
        j["class"] = "smesp";
        j["t"] = c->t;
        j["s"] = c->s;
    } else if (const auto* c = std::get_if<OccurKClass>(&desc)) {
        j["class"] = "occur";
        j["D"] = c->depth;
        j["k"] = c->k;
        j["s"] = c->s;
    } else if (const auto* c = std::get_if<CommRoAbpClass>(&desc)) {
        j["class"] = "commroabp";
        j["w"] = c->w;
        j["d"] = c->d;
    } else if (const auto* c = std::get_if<RoAbpClass>(&desc)) {
        j["class"] = "roabp";
        j["w"] = c->w;
        j["d"] = c->d;
        if (!c->order.empty()) {
            j["order"] = c->order;
        }
    }
    return j;
}

// --- samplers --------------------------------------------------------------
//
// The source classes define no distribution, so each sampler below documents
// its own scheme. All draw through the supplied stream only.

namespace {

ArenaPtr fresh_x_arena(unsigned N)
{
    auto arena = std::make_shared<VarArena>();
    for (unsigned i = 1; i <= N; ++i) {
        arena->intern("X" + std::to_string(i));
    }
    return arena;
}

// random monomial of total degree <= max_deg: degree drawn uniformly, then
// that many variable picks with repetition
Monomial random_monomial(unsigned N, unsigned max_deg, Rng& rng)
{
    Monomial m;
    unsigned deg = static_cast<unsigned>(rng.below(max_deg + 1));
    for (unsigned i = 0; i < deg; ++i) {
        m = m.times(Monomial::var(static_cast<VarId>(rng.below(N))));
    }
    return m;
}

// monomial as a gate: bare power-product over the participating inputs,
// scaled by a constant gate when coeff != 1
NodeId monomial_gate(Circuit& c, const std::vector<NodeId>& inputs, const Monomial& m,
                     std::uint64_t coeff)
{
    NodeId body = 0;
    bool have_body = false;
    if (!m.is_one()) {
        std::vector<NodeId> children;
        std::vector<std::uint32_t> labels;
        for (const auto& [v, e] : m.powers) {
            children.push_back(inputs[v]);
            labels.push_back(e);
        }
        body = c.add_pow_product(std::move(children), std::move(labels));
        have_body = true;
    }
    if (!have_body) {
        return c.add_const(coeff);
    }
    if (coeff == 1) {
        return body;
    }
    return c.add_product({ c.add_const(coeff), body });
}

// Scheme: s terms; term monomials of total degree <= max_degree as above,
// coefficients uniform nonzero. Equal monomials merge, so the result may
// have fewer distinct terms.
Circuit sample_sparse(const SigmaPiClass& desc, unsigned N, const PrimeField& field, Rng& rng)
{
    auto arena = fresh_x_arena(N);
    Circuit c(field, arena);
    std::vector<NodeId> inputs;
    for (VarId v = 0; v < N; ++v) {
        inputs.push_back(c.add_input(v));
    }
    std::vector<NodeId> terms;
    for (std::uint64_t i = 0; i < desc.s; ++i) {
        terms.push_back(monomial_gate(c, inputs, random_monomial(N, desc.max_degree, rng),
                                      field.random_nonzero(rng)));
    }
    c.set_output(c.add_sum(std::move(terms)));
    return c;
}

// Scheme: k products of exactly d affine forms; form coefficients uniform,
// redrawn if the whole form is zero.
Circuit sample_spsk(const SigmaKPiSigmaClass& desc, unsigned N, const PrimeField& field, Rng& rng)
{
    auto arena = fresh_x_arena(N);
    Circuit c(field, arena);
    std::vector<NodeId> inputs;
    for (VarId v = 0; v < N; ++v) {
        inputs.push_back(c.add_input(v));
    }
    std::vector<NodeId> prods;
    for (unsigned j = 0; j < desc.k; ++j) {
        std::vector<NodeId> factors;
        for (unsigned f = 0; f < desc.d; ++f) {
            std::vector<std::uint64_t> coeff(N + 1, 0);
            bool nonzero = false;
            while (!nonzero) {
                for (auto& x : coeff) {
                    x = field.random_element(rng);
                    nonzero = nonzero || x != 0;
                }
            }
            std::vector<NodeId> parts;
            if (coeff[0] != 0) {
                parts.push_back(c.add_const(coeff[0]));
            }
            for (unsigned i = 0; i < N; ++i) {
                if (coeff[i + 1] == 0) {
                    continue;
                }
                if (coeff[i + 1] == 1) {
                    parts.push_back(inputs[i]);
                } else {
                    parts.push_back(c.add_product({ c.add_const(coeff[i + 1]), inputs[i] }));
                }
            }
            factors.push_back(parts.size() == 1 ? parts[0] : c.add_sum(std::move(parts)));
        }
        prods.push_back(factors.size() == 1 ? factors[0] : c.add_product(std::move(factors)));
    }
    c.set_output(c.add_sum(std::move(prods)));
    return c;
}

// sparse subcircuit used for SMESP inner polynomials and occur-k leaves:
// add of term_count monomial gates (or the bare gate when term_count = 1)
NodeId sparse_subcircuit(Circuit& c, const std::vector<NodeId>& inputs,
                         const std::vector<VarId>& vars, unsigned term_count, unsigned max_deg,
                         const PrimeField& field, Rng& rng)
{
    std::vector<NodeId> terms;
    for (unsigned t = 0; t < term_count; ++t) {
        Monomial m;
        unsigned deg = static_cast<unsigned>(rng.below(max_deg + 1));
        for (unsigned i = 0; i < deg && !vars.empty(); ++i) {
            m = m.times(Monomial::var(vars[rng.below(vars.size())]));
        }
        terms.push_back(monomial_gate(c, inputs, m, field.random_nonzero(rng)));
    }
    return terms.size() == 1 ? terms[0] : c.add_sum(std::move(terms));
}

// Scheme: s summands X^a * F_i^{e_i}; the outer monomial has support <= 2 and
// individual degree <= 2, F_i is a random <= 4-term polynomial of total
// degree <= t, and e_i is uniform in [1, 3].
Circuit sample_smesp(const SmespClass& desc, unsigned N, const PrimeField& field, Rng& rng)
{
    auto arena = fresh_x_arena(N);
    Circuit c(field, arena);
    std::vector<NodeId> inputs;
    std::vector<VarId> vars;
    for (VarId v = 0; v < N; ++v) {
        inputs.push_back(c.add_input(v));
        vars.push_back(v);
    }
    std::vector<NodeId> summands;
    for (unsigned i = 0; i < desc.s; ++i) {
        NodeId inner = sparse_subcircuit(c, inputs, vars, 1 + static_cast<unsigned>(rng.below(4)),
                                         desc.t, field, rng);
        auto e = static_cast<std::uint32_t>(1 + rng.below(3));
        NodeId powered = c.add_pow_product({ inner }, { e });
        Monomial outer;
        for (int pick = 0; pick < 2; ++pick) {
            if (rng.below(2)) {
                outer = outer.times(
                    Monomial::var(static_cast<VarId>(rng.below(N)),
                                  static_cast<std::uint32_t>(1 + rng.below(2))));
            }
        }
        if (outer.is_one()) {
            summands.push_back(powered);
        } else {
            summands.push_back(c.add_product({ monomial_gate(c, inputs, outer, 1), powered }));
        }
    }
    c.set_output(c.add_sum(std::move(summands)));
    return c;
}

// Scheme: alternating +/power-product tree starting with + at the root,
// fan-in 2, D-2 gate layers over depth-2 sparse leaves. Variables are dealt
// from a pool with k copies each, so no variable lands in more than k
// leaves; every leaf spends at most a (size-budget / leaf-count) share.
Circuit sample_occur(const OccurKClass& desc, unsigned N, const PrimeField& field, Rng& rng)
{
    if (desc.depth < 3) {
        throw std::invalid_argument("occur-k sampler: depth must be >= 3");
    }
    unsigned gate_layers = desc.depth - 2;
    auto arena = fresh_x_arena(N);
    Circuit c(field, arena);
    std::vector<NodeId> inputs;
    for (VarId v = 0; v < N; ++v) {
        inputs.push_back(c.add_input(v));
    }

    std::size_t leaf_count = std::size_t(1) << (gate_layers - 1);
    if (gate_layers == 1) {
        leaf_count = std::min<std::size_t>(std::max(2u, N / 2), 4);
    } else {
        leaf_count *= 2;
    }

    // deal k copies of each variable across leaves
    std::vector<VarId> pool;
    for (VarId v = 0; v < N; ++v) {
        for (unsigned copy = 0; copy < desc.k; ++copy) {
            pool.push_back(v);
        }
    }
    for (std::size_t i = pool.size(); i > 1; --i) {
        std::swap(pool[i - 1], pool[rng.below(i)]);
    }
    std::vector<std::vector<VarId>> leaf_vars(leaf_count);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        auto& lv = leaf_vars[i % leaf_count];
        if (std::find(lv.begin(), lv.end(), pool[i]) == lv.end()) {
            lv.push_back(pool[i]);
        }
    }

    // budget per the occur-k size rule: + costs 1, power-product costs the
    // label sum, a leaf costs its own wire count
    std::uint64_t gate_cost = 0;
    std::size_t plus_gates = 0;
    std::size_t pow_gates = 0;
    {
        std::size_t nodes_at = 1;
        for (unsigned layer = 0; layer < gate_layers; ++layer) {
            if (layer % 2 == 0) {
                plus_gates += nodes_at;
            } else {
                pow_gates += nodes_at;
            }
            nodes_at *= 2;
        }
        gate_cost = plus_gates + 2 * pow_gates; // labels kept at 1 below
    }
    if (desc.s < gate_cost + leaf_count) {
        throw std::invalid_argument("occur-k sampler: size budget s = " + std::to_string(desc.s)
                                    + " cannot fit " + std::to_string(gate_layers)
                                    + " gate layers (need >= "
                                    + std::to_string(gate_cost + leaf_count) + ")");
    }
    std::uint64_t leaf_budget = (desc.s - gate_cost) / std::max<std::size_t>(leaf_count, 1);

    std::vector<NodeId> leaves;
    for (std::size_t i = 0; i < leaf_count; ++i) {
        const auto& lv = leaf_vars[i];
        if (lv.empty() || leaf_budget < 3) {
            // minimal leaf: one bare variable (or constant when none left)
            leaves.push_back(lv.empty()
                                 ? c.add_const(field.random_nonzero(rng))
                                 : c.add_pow_product({ inputs[lv[rng.below(lv.size())]] }, { 1 }));
            continue;
        }
        unsigned terms = 1 + static_cast<unsigned>(rng.below(2));
        leaves.push_back(sparse_subcircuit(c, inputs, lv, terms, 2, field, rng));
    }

    // collapse bottom-up in pairs; the root takes whatever is left. Layer
    // parity counts from the root: layer 1 is +, layer 2 power-product, ...
    std::vector<NodeId> level = std::move(leaves);
    for (unsigned layer = gate_layers; layer >= 1; --layer) {
        bool is_plus = (layer % 2 == 1);
        if (layer == 1) {
            if (level.size() > 1 || !is_plus) {
                level = { is_plus ? c.add_sum(level)
                                  : c.add_pow_product(
                                        level, std::vector<std::uint32_t>(level.size(), 1)) };
            }
            break;
        }
        std::vector<NodeId> up;
        for (std::size_t i = 0; i < level.size(); i += 2) {
            std::vector<NodeId> kids = { level[i] };
            if (i + 1 < level.size()) {
                kids.push_back(level[i + 1]);
            }
            up.push_back(is_plus
                             ? c.add_sum(kids)
                             : c.add_pow_product(kids,
                                                 std::vector<std::uint32_t>(kids.size(), 1)));
        }
        level = std::move(up);
    }
    c.set_output(level[0]);
    return c;
}

SparsePoly random_univariate(const PrimeField& field, const ArenaPtr& arena, VarId v, unsigned d,
                             Rng& rng, bool force_nonzero)
{
    SparsePoly p(field, arena);
    do {
        p = SparsePoly(field, arena);
        for (unsigned e = 0; e <= d; ++e) {
            p.add_term(Monomial::var(v, e), field.random_element(rng));
        }
    } while (force_nonzero && p.is_zero());
    return p;
}

// Scheme: general width-w roABP; every matrix entry an independent uniform
// univariate of degree <= d in the layer variable.
RoAbp sample_roabp(const RoAbpClass& desc, unsigned N, const PrimeField& field, Rng& rng)
{
    RoAbp a;
    a.field = &field;
    a.arena = fresh_x_arena(N);
    a.width = desc.w;
    a.deg_bound = desc.d;
    std::vector<unsigned> order = desc.order;
    if (order.empty()) {
        order.resize(N);
        std::iota(order.begin(), order.end(), 1u);
    }
    if (order.size() != N) {
        throw std::invalid_argument("roabp sampler: order length must equal N");
    }
    for (unsigned pos : order) {
        VarId v = pos - 1;
        a.order.push_back(v);
        std::vector<SparsePoly> mat;
        for (unsigned i = 0; i < desc.w * desc.w; ++i) {
            mat.push_back(random_univariate(field, a.arena, v, desc.d, rng, false));
        }
        a.layers.push_back(std::move(mat));
    }
    a.validate();
    return a;
}

} // namespace

CommFamily sample_comm_family(unsigned w, unsigned d, unsigned N, const PrimeField& field,
                              Rng& rng)
{
    // Scheme: F = sum_m c_m prod_i u_{m,i}(X_i), c_m uniform nonzero,
    // u_{m,i} uniform nonzero univariates of degree <= d.
    CommFamily fam;
    fam.field = &field;
    fam.arena = fresh_x_arena(N);
    fam.w = w;
    fam.d = d;
    for (unsigned m = 0; m < w; ++m) {
        fam.c.push_back(field.random_nonzero(rng));
        std::vector<SparsePoly> us;
        for (VarId v = 0; v < N; ++v) {
            us.push_back(random_univariate(field, fam.arena, v, d, rng, true));
        }
        fam.univariate.push_back(std::move(us));
    }
    return fam;
}

RoAbp comm_family_roabp(const CommFamily& fam, const std::vector<unsigned>& order)
{
    unsigned N = static_cast<unsigned>(fam.univariate.at(0).size());
    if (order.size() != N) {
        throw std::invalid_argument("comm_family_roabp: order length must equal N");
    }
    RoAbp a;
    a.field = fam.field;
    a.arena = fam.arena;
    a.width = fam.w;
    a.deg_bound = fam.d;
    const PrimeField& f = *fam.field;

    if (N == 1) {
        // single layer: the whole sum sits in the (1,1) entry
        VarId v = order[0] - 1;
        std::vector<SparsePoly> mat(std::size_t(fam.w) * fam.w, SparsePoly(f, fam.arena));
        SparsePoly acc(f, fam.arena);
        for (unsigned m = 0; m < fam.w; ++m) {
            acc += fam.univariate[m][v].scaled(fam.c[m]);
        }
        mat[0] = std::move(acc);
        a.order.push_back(v);
        a.layers.push_back(std::move(mat));
        a.validate();
        return a;
    }

    for (unsigned i = 0; i < N; ++i) {
        VarId v = order[i] - 1;
        a.order.push_back(v);
        std::vector<SparsePoly> mat(std::size_t(fam.w) * fam.w, SparsePoly(f, fam.arena));
        for (unsigned m = 0; m < fam.w; ++m) {
            SparsePoly u = fam.univariate[m][v];
            if (i == 0) {
                mat[m] = u.scaled(fam.c[m]); // row 1: branch selector
            } else if (i + 1 == N) {
                mat[std::size_t(m) * fam.w] = std::move(u); // column 1: collect
            } else {
                mat[std::size_t(m) * fam.w + m] = std::move(u); // diagonal
            }
        }
        a.layers.push_back(std::move(mat));
    }
    a.validate();
    return a;
}

ClassMember sample_class(const ClassDescriptor& desc, unsigned N, const PrimeField& field,
                         Rng& rng)
{
    for (int attempt = 0; attempt < 64; ++attempt) {
        ClassMember m = std::visit(
            [&](const auto& d) -> ClassMember {
                using T = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<T, SigmaPiClass>) {
                    return sample_sparse(d, N, field, rng);
                } else if constexpr (std::is_same_v<T, SigmaKPiSigmaClass>) {
                    return sample_spsk(d, N, field, rng);
                } else if constexpr (std::is_same_v<T, SmespClass>) {
                    return sample_smesp(d, N, field, rng);
                } else if constexpr (std::is_same_v<T, OccurKClass>) {
                    return sample_occur(d, N, field, rng);
                } else if constexpr (std::is_same_v<T, CommRoAbpClass>) {
                    std::vector<unsigned> identity(N);
                    std::iota(identity.begin(), identity.end(), 1u);
                    return comm_family_roabp(sample_comm_family(d.w, d.d, N, field, rng),
                                             identity);
                } else {
                    return sample_roabp(d, N, field, rng);
                }
            },
            desc);
        // nonzero screen: randomized evaluation
        for (int probe = 0; probe < 8; ++probe) {
            std::vector<std::uint64_t> pt(N);
            for (auto& x : pt) {
                x = field.random_element(rng);
            }
            if (member_eval(m, pt) != 0) {
                return m;
            }
        }
    }
    throw std::runtime_error("sample_class: 64 consecutive zero samples for "
                             + class_name(desc) + " (degenerate parameters)");
}

// --- validators --------------------------------------------------------

namespace {

bool is_monomial_gate(const Circuit& c, NodeId id);

bool children_are(const Circuit& c, const Gate& g, bool (*pred)(const Circuit&, NodeId))
{
    for (NodeId ch : g.children) {
        if (!pred(c, ch)) {
            return false;
        }
    }
    return true;
}

bool is_input_like(const Circuit& c, NodeId id)
{
    GateKind k = c.gates()[id].kind;
    return k == GateKind::input || k == GateKind::constant;
}

// constant * product of variable powers, in any of the shapes the builders emit
bool is_monomial_gate(const Circuit& c, NodeId id)
{
    const Gate& g = c.gates()[id];
    switch (g.kind) {
    case GateKind::input:
    case GateKind::constant:
        return true;
    case GateKind::pow_product:
        return children_are(c, g, +[](const Circuit& cc, NodeId n) {
            return cc.gates()[n].kind == GateKind::input;
        });
    case GateKind::mul:
        return children_are(c, g, +[](const Circuit& cc, NodeId n) {
            const Gate& gg = cc.gates()[n];
            if (gg.kind == GateKind::input || gg.kind == GateKind::constant) {
                return true;
            }
            return gg.kind == GateKind::pow_product
                   && children_are(cc, gg, +[](const Circuit& c3, NodeId n3) {
                          return c3.gates()[n3].kind == GateKind::input;
                      });
        });
    default:
        return false;
    }
}

// depth-2 sparse formula: a monomial or an add of monomials
bool is_sparse_leaf(const Circuit& c, NodeId id)
{
    const Gate& g = c.gates()[id];
    if (is_monomial_gate(c, id)) {
        return true;
    }
    return g.kind == GateKind::add && children_are(c, g, &is_monomial_gate);
}

// affine form: constant, variable, const*variable, or an add of those
bool is_affine_gate(const Circuit& c, NodeId id)
{
    const Gate& g = c.gates()[id];
    auto atom = +[](const Circuit& cc, NodeId n) {
        const Gate& gg = cc.gates()[n];
        if (gg.kind == GateKind::input || gg.kind == GateKind::constant) {
            return true;
        }
        return gg.kind == GateKind::mul && gg.children.size() == 2
               && ((cc.gates()[gg.children[0]].kind == GateKind::constant
                    && cc.gates()[gg.children[1]].kind == GateKind::input)
                   || (cc.gates()[gg.children[1]].kind == GateKind::constant
                       && cc.gates()[gg.children[0]].kind == GateKind::input));
    };
    if (atom(c, id)) {
        return true;
    }
    return g.kind == GateKind::add && children_are(c, g, atom);
}

std::set<VarId> gate_support(const Circuit& c, NodeId id)
{
    std::set<VarId> out;
    std::vector<NodeId> stack = { id };
    std::set<NodeId> seen;
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) {
            continue;
        }
        const Gate& g = c.gates()[n];
        if (g.kind == GateKind::input) {
            out.insert(g.var);
        }
        for (NodeId ch : g.children) {
            stack.push_back(ch);
        }
    }
    return out;
}

// wire count of the sub-dag rooted at id (power-product edges weigh their label)
std::uint64_t subcircuit_size(const Circuit& c, NodeId id)
{
    std::uint64_t wires = 0;
    std::vector<NodeId> stack = { id };
    std::set<NodeId> seen;
    while (!stack.empty()) {
        NodeId n = stack.back();
        stack.pop_back();
        if (!seen.insert(n).second) {
            continue;
        }
        const Gate& g = c.gates()[n];
        if (g.kind == GateKind::pow_product) {
            for (std::uint32_t e : g.labels) {
                wires += e;
            }
        } else {
            wires += g.children.size();
        }
        for (NodeId ch : g.children) {
            stack.push_back(ch);
        }
    }
    return wires;
}

ValidationReport fail(std::string detail)
{
    return { false, std::move(detail) };
}

ValidationReport validate_sparse(const Circuit& c, const SigmaPiClass& desc)
{
    const Gate& out = c.gates()[c.output()];
    std::size_t terms = 0;
    if (is_monomial_gate(c, c.output())) {
        terms = 1;
    } else if (out.kind == GateKind::add) {
        for (NodeId ch : out.children) {
            if (!is_monomial_gate(c, ch)) {
                return fail("term " + std::to_string(ch) + " is not a monomial gate");
            }
        }
        terms = out.children.size();
    } else {
        return fail("output is neither a monomial nor a sum of monomials");
    }
    if (terms > desc.s) {
        return fail("term count " + std::to_string(terms) + " exceeds s = "
                    + std::to_string(desc.s));
    }
    return {};
}

ValidationReport validate_spsk(const Circuit& c, const SigmaKPiSigmaClass& desc)
{
    const Gate& out = c.gates()[c.output()];
    std::vector<NodeId> prods;
    if (out.kind == GateKind::add) {
        prods = out.children;
    } else {
        prods = { c.output() };
    }
    if (prods.size() > desc.k) {
        return fail("top fan-in " + std::to_string(prods.size()) + " exceeds k = "
                    + std::to_string(desc.k));
    }
    for (NodeId p : prods) {
        const Gate& g = c.gates()[p];
        std::vector<NodeId> factors;
        if (g.kind == GateKind::mul) {
            factors = g.children;
        } else {
            factors = { p };
        }
        if (factors.size() > desc.d) {
            return fail("product " + std::to_string(p) + " has "
                        + std::to_string(factors.size()) + " factors, degree bound is "
                        + std::to_string(desc.d));
        }
        for (NodeId f : factors) {
            if (!is_affine_gate(c, f)) {
                return fail("factor " + std::to_string(f) + " is not an affine form");
            }
        }
    }
    return {};
}

ValidationReport validate_smesp(const Circuit& c, const SmespClass& desc)
{
    const Gate& out = c.gates()[c.output()];
    std::vector<NodeId> summands =
        out.kind == GateKind::add ? out.children : std::vector<NodeId>{ c.output() };
    if (summands.size() > desc.s) {
        return fail("top fan-in " + std::to_string(summands.size()) + " exceeds s = "
                    + std::to_string(desc.s));
    }
    for (NodeId sm : summands) {
        const Gate& g = c.gates()[sm];
        NodeId powered = sm;
        if (g.kind == GateKind::mul) {
            // monomial * powered-sparse
            if (g.children.size() != 2 || !is_monomial_gate(c, g.children[0])) {
                return fail("summand " + std::to_string(sm)
                            + " is not monomial * power of a sparse polynomial");
            }
            powered = g.children[1];
        }
        const Gate& pg = c.gates()[powered];
        NodeId inner;
        if (pg.kind == GateKind::pow_product && pg.children.size() == 1) {
            inner = pg.children[0];
        } else if (is_monomial_gate(c, powered)) {
            continue; // pure monomial summand; no inner polynomial to bound
        } else if (is_sparse_leaf(c, powered)) {
            inner = powered; // unwrapped sparse part, exponent 1
        } else {
            return fail("summand " + std::to_string(sm) + " lacks a powered sparse part");
        }
        if (!is_sparse_leaf(c, inner)) {
            return fail("inner polynomial at node " + std::to_string(inner) + " is not sparse");
        }
        Circuit probe = c; // degree via the syntactic bound of the inner node
        probe.set_output(inner);
        if (probe.degree_bound() > desc.t) {
            return fail("inner polynomial at node " + std::to_string(inner)
                        + " has degree bound " + std::to_string(probe.degree_bound())
                        + " > t = " + std::to_string(desc.t));
        }
    }
    return {};
}

ValidationReport validate_occur(const Circuit& c, const OccurKClass& desc)
{
    // tree check: every internal gate feeds at most one parent
    std::vector<unsigned> parents(c.gates().size(), 0);
    for (const Gate& g : c.gates()) {
        for (NodeId ch : g.children) {
            if (!is_input_like(c, ch)) {
                ++parents[ch];
            }
        }
    }
    for (std::size_t i = 0; i < parents.size(); ++i) {
        if (parents[i] > 1) {
            return fail("node " + std::to_string(i) + " has fan-out "
                        + std::to_string(parents[i]) + "; occur-k formulas are trees");
        }
    }

    // peel +/power-product layers until sparse leaves
    std::vector<NodeId> leaves;
    std::uint64_t size_total = 0;
    unsigned max_gate_depth = 0;
    struct Item {
        NodeId id;
        unsigned depth;
    };
    std::vector<Item> stack = { { c.output(), 0 } };
    while (!stack.empty()) {
        auto [id, depth] = stack.back();
        stack.pop_back();
        if (is_sparse_leaf(c, id)) {
            leaves.push_back(id);
            size_total += subcircuit_size(c, id);
            max_gate_depth = std::max(max_gate_depth, depth);
            continue;
        }
        const Gate& g = c.gates()[id];
        if (g.kind == GateKind::add) {
            size_total += 1;
        } else if (g.kind == GateKind::pow_product) {
            for (std::uint32_t e : g.labels) {
                size_total += e;
            }
        } else {
            return fail("node " + std::to_string(id)
                        + " is neither +, power-product, nor a sparse leaf");
        }
        for (NodeId ch : g.children) {
            stack.push_back({ ch, depth + 1 });
        }
    }

    unsigned formula_depth = max_gate_depth + 2;
    if (formula_depth > desc.depth) {
        return fail("formula depth " + std::to_string(formula_depth) + " exceeds D = "
                    + std::to_string(desc.depth));
    }
    if (size_total > desc.s) {
        return fail("formula size " + std::to_string(size_total) + " exceeds s = "
                    + std::to_string(desc.s));
    }

    std::map<VarId, unsigned> occur;
    for (NodeId leaf : leaves) {
        for (VarId v : gate_support(c, leaf)) {
            ++occur[v];
        }
    }
    for (const auto& [v, count] : occur) {
        if (count > desc.k) {
            return fail("variable " + c.arena()->name(v) + " occurs in " + std::to_string(count)
                        + " leaves, limit is k = " + std::to_string(desc.k));
        }
    }
    return {};
}

ValidationReport validate_roabp_shape(const RoAbp& a, unsigned w, unsigned d,
                                      const std::vector<unsigned>& order)
{
    try {
        a.validate();
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    if (a.width != w) {
        return fail("width " + std::to_string(a.width) + " != " + std::to_string(w));
    }
    if (a.deg_bound > d) {
        return fail("degree bound " + std::to_string(a.deg_bound) + " > " + std::to_string(d));
    }
    if (a.order.size() != a.arena->size()) {
        return fail("program does not read every variable exactly once");
    }
    if (!order.empty()) {
        if (order.size() != a.order.size()) {
            return fail("order length mismatch");
        }
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (a.order[i] != order[i] - 1) {
                return fail("layer " + std::to_string(i) + " reads "
                            + a.arena->name(a.order[i]) + ", expected position "
                            + std::to_string(order[i]));
            }
        }
    }
    return {};
}

} // namespace

ValidationReport validate_class(const ClassMember& member, const ClassDescriptor& desc)
{
    if (const auto* cd = std::get_if<CommRoAbpClass>(&desc)) {
        if (!std::holds_alternative<RoAbp>(member)) {
            return fail("expected a roabp member");
        }
        return validate_roabp_shape(std::get<RoAbp>(member), cd->w, cd->d, {});
    }
    if (const auto* rd = std::get_if<RoAbpClass>(&desc)) {
        if (!std::holds_alternative<RoAbp>(member)) {
            return fail("expected a roabp member");
        }
        return validate_roabp_shape(std::get<RoAbp>(member), rd->w, rd->d, rd->order);
    }
    if (!std::holds_alternative<Circuit>(member)) {
        return fail("expected a circuit member");
    }
    const Circuit& c = std::get<Circuit>(member);
    if (const auto* d = std::get_if<SigmaPiClass>(&desc)) {
        return validate_sparse(c, *d);
    }
    if (const auto* d = std::get_if<SigmaKPiSigmaClass>(&desc)) {
        return validate_spsk(c, *d);
    }
    if (const auto* d = std::get_if<SmespClass>(&desc)) {
        return validate_smesp(c, *d);
    }
    return validate_occur(c, std::get<OccurKClass>(desc));
}

} // namespace pitgen

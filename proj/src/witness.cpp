#include "pitgen/witness.hpp"

#include <algorithm>
#include <memory>
#include <span>
#include <stdexcept>

namespace pitgen {

namespace {

// The witness circuit is one top-level sum of product blocks. Each block is
// scalar * prod_j (c_j x_j + b_j) with the affine factor built as
// add(const b, mul(const c, input x)): 4 wires per factor, m+1 wires for the
// product (scalar child included), so a block over n variables costs 5n + 2
// wires and the top sum adds one wire per block. The shift block of sssv uses
// add(input, const 1): 2 wires per factor.
struct CircuitSketch {
    Circuit circuit;
    std::vector<NodeId> x_inputs;             // aligned with spec.x_block
    std::vector<NodeId> blocks;

    CircuitSketch(const PrimeField& field, const GeneratorSpec& spec)
        : circuit(field, std::make_shared<VarArena>())
    {
        for (VarId v : spec.x_block) {
            x_inputs.push_back(
                circuit.add_input(circuit.arena()->intern(spec.arena->name(v))));
        }
    }

    // scalar * prod_j (coef_j x_j + offset_j)
    void add_block(std::uint64_t scalar, const std::vector<std::uint64_t>& coefs,
                   const std::vector<std::uint64_t>& offsets)
    {
        if (scalar == 0) {
            return;
        }
        std::vector<NodeId> children;
        children.push_back(circuit.add_const(scalar));
        for (std::size_t j = 0; j < x_inputs.size(); ++j) {
            NodeId lin = circuit.add_product({ circuit.add_const(coefs[j]), x_inputs[j] });
            children.push_back(circuit.add_sum({ circuit.add_const(offsets[j]), lin }));
        }
        blocks.push_back(circuit.add_product(std::move(children)));
    }

    void add_all_ones_shift()
    {
        std::vector<NodeId> factors;
        for (NodeId x : x_inputs) {
            factors.push_back(circuit.add_sum({ x, circuit.add_const(1) }));
        }
        blocks.push_back(factors.size() == 1 ? factors[0]
                                             : circuit.add_product(std::move(factors)));
    }

    void finish()
    {
        if (blocks.empty()) {
            circuit.set_output(circuit.add_const(0));
        } else {
            circuit.set_output(circuit.add_sum(std::move(blocks)));
        }
    }
};

std::span<const std::uint64_t> slice(const std::vector<std::uint64_t>& alpha,
                                     std::size_t offset, std::size_t count)
{
    return std::span<const std::uint64_t>(alpha).subspan(offset, count);
}

// One block per outer index j: scalar y_j t_0^j, factor coefficients t_k^j
// (or the Vandermonde powers t^{2^{k-1} j} when the spec was specialized).
void emit_rc_blocks(CircuitSketch& sk, const GeneratorSpec& spec,
                    std::span<const std::uint64_t> alpha)
{
    const PrimeField& f = *spec.field;
    unsigned r = spec.params.at("r").get<unsigned>();
    unsigned n = spec.n;
    bool specialized = spec.params.contains("specialized_t");
    for (unsigned j = 1; j <= r; ++j) {
        std::uint64_t yj = alpha[j - 1];
        std::uint64_t scalar;
        std::vector<std::uint64_t> coefs(n);
        if (specialized) {
            std::uint64_t t = alpha[r];
            scalar = f.mul(yj, f.pow(t, std::uint64_t(j)));
            for (unsigned k = 1; k <= n; ++k) {
                unsigned __int128 e = static_cast<unsigned __int128>(j) << (k - 1);
                coefs[k - 1] = f.pow(t, e);
            }
        } else {
            scalar = f.mul(yj, f.pow(alpha[r], std::uint64_t(j))); // t_0 = alpha[r]
            for (unsigned k = 1; k <= n; ++k) {
                coefs[k - 1] = f.pow(alpha[r + k], std::uint64_t(j));
            }
        }
        sk.add_block(scalar, coefs, std::vector<std::uint64_t>(n, 1));
    }
}

// One block per summand i: scalar y_i, factors z_ij x_j + (1 - z_ij).
void emit_ssv_blocks(CircuitSketch& sk, const GeneratorSpec& spec,
                     std::span<const std::uint64_t> alpha, bool with_shift)
{
    const PrimeField& f = *spec.field;
    unsigned k = spec.params.at("k").get<unsigned>();
    unsigned n = spec.n;
    for (unsigned i = 1; i <= k; ++i) {
        std::vector<std::uint64_t> coefs(n), offsets(n);
        for (unsigned j = 1; j <= n; ++j) {
            std::uint64_t z = alpha[k + std::size_t(i - 1) * n + (j - 1)];
            coefs[j - 1] = z;
            offsets[j - 1] = f.sub(1, z);
        }
        sk.add_block(alpha[i - 1], coefs, offsets);
    }
    if (with_shift) {
        sk.add_all_ones_shift();
    }
}

void emit_blocks(CircuitSketch& sk, const GeneratorSpec& spec,
                 std::span<const std::uint64_t> alpha)
{
    switch (spec.kind) {
        case GenKind::rc:
            emit_rc_blocks(sk, spec, alpha);
            return;
        case GenKind::ssv:
            emit_ssv_blocks(sk, spec, alpha, false);
            return;
        case GenKind::sssv:
            emit_ssv_blocks(sk, spec, alpha, true);
            return;
        case GenKind::trdeg:
        case GenKind::bms:
        case GenKind::asss: {
            std::size_t offset = 0;
            for (const GeneratorSpec& part : spec.parts) {
                std::size_t len = part.seed_block.size();
                emit_blocks(sk, part, alpha.subspan(offset, len));
                offset += len;
            }
            return;
        }
        case GenKind::fs:
            throw std::invalid_argument(
                "witness_circuit: fs witnesses are branching programs; "
                "call witness_fs_roabp");
    }
    throw std::logic_error("witness_circuit: unhandled generator kind");
}

// roABP "size": total term count over all edge labels (each label is a
// univariate of at most 2 terms here), a wire-count analogue for matrix form.
std::size_t roabp_size(const RoAbp& r)
{
    std::size_t total = 0;
    for (const auto& layer : r.layers) {
        for (const SparsePoly& e : layer) {
            total += e.terms().size();
        }
    }
    return total;
}

} // namespace

nlohmann::ordered_json WitnessArtifact::to_json() const
{
    nlohmann::ordered_json j;
    j["kind"] = kind;
    j["size"] = declared_size;
    j["generator"] = spec.to_json();
    j["alpha"] = alpha;
    j["artifact"] = member_to_json(artifact);
    return j;
}

WitnessArtifact witness_circuit(const GeneratorSpec& spec,
                                const std::vector<std::uint64_t>& alpha)
{
    if (spec.kind == GenKind::fs) {
        throw std::invalid_argument(
            "witness_circuit: fs witnesses are branching programs; call witness_fs_roabp");
    }
    if (!spec.materialized) {
        spec.witness_poly(); // throws with the R-override guidance
    }
    if (alpha.size() != spec.seed_block.size()) {
        throw std::invalid_argument("witness_circuit: alpha length must match seed arity");
    }
    CircuitSketch sk(*spec.field, spec);
    emit_blocks(sk, spec, slice(alpha, 0, alpha.size()));
    sk.finish();

    std::size_t size = sk.circuit.size();
    return WitnessArtifact{ "sps-circuit", ClassMember(std::move(sk.circuit)), size, spec,
                            alpha };
}

WitnessArtifact witness_fs_roabp(const GeneratorSpec& spec,
                                 const std::vector<std::uint64_t>& alpha)
{
    if (spec.kind != GenKind::fs) {
        throw std::invalid_argument("witness_fs_roabp: spec kind must be fs");
    }
    if (alpha.size() != spec.seed_block.size()) {
        throw std::invalid_argument("witness_fs_roabp: alpha length must be n + 1");
    }
    const PrimeField& f = *spec.field;
    const FsData& data = *spec.fs;
    unsigned n = spec.n;
    unsigned w2 = data.w * data.w;

    RoAbp r;
    r.field = &f;
    r.arena = std::make_shared<VarArena>();
    r.width = w2;
    r.deg_bound = 1;
    std::vector<VarId> xs;
    for (VarId v : spec.x_block) {
        xs.push_back(r.arena->intern(spec.arena->name(v)));
    }
    auto layer_x = [&](unsigned i) {
        return xs[(data.order.empty() ? i : data.order[i - 1]) - 1];
    };
    auto lagrange_at = [&](unsigned l, std::uint64_t v) { // p_l(v), 1-based l
        std::uint64_t acc = 0;
        for (unsigned e = w2; e-- > 0;) {
            acc = f.add(f.mul(acc, v), data.lagrange[l - 1][e]);
        }
        return acc;
    };
    auto layer_exponent = [&](unsigned i) {
        return static_cast<unsigned __int128>(std::uint64_t(1) << (i - 1)) * data.d * w2;
    };
    // edge sink_c = p_c(alpha_{n+1}), folded into the last layer's column 0
    std::vector<std::uint64_t> sink(w2);
    for (unsigned c = 1; c <= w2; ++c) {
        sink[c - 1] = lagrange_at(c, alpha[n]);
    }

    for (unsigned i = 1; i <= n; ++i) {
        VarId xv = layer_x(i);
        r.order.push_back(xv);
        unsigned __int128 ei = layer_exponent(i);
        std::vector<std::vector<std::uint64_t>> lab_const(w2, std::vector<std::uint64_t>(w2, 0));
        std::vector<std::vector<std::uint64_t>> lab_lin(w2, std::vector<std::uint64_t>(w2, 0));
        for (unsigned li = 1; li <= w2; ++li) {
            std::uint64_t base = f.mul(f.pow(data.omega, std::uint64_t(li)), alpha[i - 1]);
            std::uint64_t powered = f.pow(base, ei);
            for (unsigned lp = 1; lp <= w2; ++lp) {
                if (i == 1 && lp != 1) {
                    continue; // layer 1 is entered only from the source row
                }
                // p_{lp}(omega^{li} a_i) + x_i p_{lp}((omega^{li} a_i)^{E_i});
                // boundary p_{l_0}(t) = t collapses layer 1 to base + x base^E
                lab_const[lp - 1][li - 1] = (i == 1) ? base : lagrange_at(lp, base);
                lab_lin[lp - 1][li - 1] = (i == 1) ? powered : lagrange_at(lp, powered);
            }
        }
        std::vector<SparsePoly> layer;
        for (unsigned lp = 1; lp <= w2; ++lp) {
            for (unsigned li = 1; li <= w2; ++li) {
                std::uint64_t c0, c1;
                if (i == n) { // fold sink: everything flows to column 0
                    if (li != 1) {
                        layer.push_back(SparsePoly(f, r.arena));
                        continue;
                    }
                    std::uint64_t a0 = 0, a1 = 0;
                    for (unsigned c = 1; c <= w2; ++c) {
                        a0 = f.add(a0, f.mul(lab_const[lp - 1][c - 1], sink[c - 1]));
                        a1 = f.add(a1, f.mul(lab_lin[lp - 1][c - 1], sink[c - 1]));
                    }
                    c0 = a0;
                    c1 = a1;
                } else {
                    c0 = lab_const[lp - 1][li - 1];
                    c1 = lab_lin[lp - 1][li - 1];
                }
                SparsePoly e = SparsePoly::constant(f, r.arena, c0);
                e.add_term(Monomial::var(xv), c1);
                layer.push_back(std::move(e));
            }
        }
        r.layers.push_back(std::move(layer));
    }
    r.validate();

    std::size_t size = roabp_size(r);
    return WitnessArtifact{ "roabp", ClassMember(std::move(r)), size, spec, alpha };
}

WitnessArtifact witness_fs_roabp(unsigned n, unsigned w, unsigned d,
                                 const PrimeField& field,
                                 const std::vector<std::uint64_t>& alpha)
{
    return witness_fs_roabp(build_fs(n, w, d, field), alpha);
}

bool witness_verify(const WitnessArtifact& artifact, std::size_t budget)
{
    const GeneratorSpec& spec = artifact.spec;
    const ArenaPtr& arena = member_arena(artifact.artifact);
    std::vector<VarId> xs;
    for (VarId v : spec.x_block) {
        auto found = arena->find(spec.arena->name(v));
        if (!found) {
            throw std::invalid_argument("witness_verify: artifact is missing variable "
                                        + spec.arena->name(v));
        }
        xs.push_back(*found);
    }
    SparsePoly expanded = member_expand(artifact.artifact, budget);
    std::vector<std::uint64_t> got = coeff_extract(expanded, xs).to_values();
    return got == generator_image(spec, artifact.alpha);
}

GeneratorSpec order_variants(const GeneratorSpec& spec, const std::vector<unsigned>& sigma)
{
    if (spec.kind != GenKind::fs) {
        throw std::invalid_argument("order_variants: spec kind must be fs");
    }
    if (sigma.size() != spec.n) {
        throw std::invalid_argument("order_variants: sigma must be a permutation of 1..n");
    }
    std::vector<bool> seen(spec.n, false);
    bool identity = true;
    for (unsigned i = 0; i < spec.n; ++i) {
        unsigned v = sigma[i];
        if (v < 1 || v > spec.n || seen[v - 1]) {
            throw std::invalid_argument("order_variants: sigma must be a permutation of 1..n");
        }
        seen[v - 1] = true;
        if (v != i + 1) {
            identity = false;
        }
    }
    if (identity) {
        return spec;
    }
    GeneratorSpec out = spec;
    out.fs->order = sigma;
    out.params["order"] = sigma;
    return out;
}

} // namespace pitgen

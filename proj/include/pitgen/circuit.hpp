#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "pitgen/mpoly.hpp"

namespace pitgen {

using NodeId = std::uint32_t;

enum class GateKind { input, constant, add, mul, pow_product };

struct Gate {
    GateKind kind;
    VarId var = 0;                        // input
    std::uint64_t value = 0;              // constant
    std::vector<NodeId> children;         // add / mul / pow_product
    std::vector<std::uint32_t> labels;    // pow_product exponents, all >= 1
};

// Algebraic circuit as a DAG of nodes. Construction only accepts children
// that already exist, so node ids double as a topological order. The
// power-product gate computes g_1^{e_1} * ... * g_m^{e_m}.
class Circuit {
  public:
    Circuit(const PrimeField& field, ArenaPtr arena)
        : field_(&field)
        , arena_(std::move(arena))
    {}

    const PrimeField& field() const { return *field_; }
    const ArenaPtr& arena() const { return arena_; }
    const std::vector<Gate>& gates() const { return gates_; }
    NodeId output() const;

    NodeId add_input(VarId v);
    NodeId add_const(std::uint64_t value);
    NodeId add_sum(std::vector<NodeId> children);
    NodeId add_product(std::vector<NodeId> children);
    NodeId add_pow_product(std::vector<NodeId> children, std::vector<std::uint32_t> labels);
    void set_output(NodeId id);

    std::uint64_t eval(const std::vector<std::uint64_t>& point) const;
    SparsePoly expand(std::size_t budget = kDefaultTermBudget) const;

    // evaluation over polynomial inputs (one per arena variable); used to
    // compose a distinguisher with a symbolic coefficient vector
    SparsePoly eval_poly(const std::vector<SparsePoly>& point,
                         std::size_t budget = kDefaultTermBudget) const;

    // wire count (power-product edges weigh their exponent label) and longest
    // input-to-output path
    std::size_t size() const;
    unsigned depth() const;

    // syntactic total-degree bound: inputs 1, constants 0, add max, mul sum,
    // power-product sum of e_i * bound(child)
    std::uint64_t degree_bound() const;

    nlohmann::ordered_json to_json() const;
    static Circuit from_json(const nlohmann::json& j, const PrimeField& field);

  private:
    const PrimeField* field_;
    ArenaPtr arena_;
    std::vector<Gate> gates_;
    std::optional<NodeId> output_;

    void check_children(const std::vector<NodeId>& children) const;
};

// Read-once (oblivious) algebraic branching program in matrix form: width-w
// square matrices M_1..M_L, entries of M_i univariate of degree <= deg_bound
// in variable order[i]; the program computes (M_1 * ... * M_L)_{1,1}.
struct RoAbp {
    const PrimeField* field = nullptr;
    ArenaPtr arena;
    unsigned width = 0;
    std::vector<VarId> order;                           // one variable per layer
    std::vector<std::vector<SparsePoly>> layers;        // layer i: width*width entries, row-major
    unsigned deg_bound = 0;

    const SparsePoly& entry(std::size_t layer, unsigned row, unsigned col) const
    {
        return layers[layer][std::size_t(row) * width + col];
    }

    void validate() const; // structural invariants; throws on violation
    std::uint64_t eval(const std::vector<std::uint64_t>& point) const;
    SparsePoly expand(std::size_t budget = kDefaultTermBudget) const;
    std::uint64_t degree_bound_total() const;

    nlohmann::ordered_json to_json() const;
    static RoAbp from_json(const nlohmann::json& j, const PrimeField& field);
};

// A testee for the PIT harness: either model.
using ClassMember = std::variant<Circuit, RoAbp>;

std::uint64_t member_eval(const ClassMember& m, const std::vector<std::uint64_t>& point);
SparsePoly member_expand(const ClassMember& m, std::size_t budget = kDefaultTermBudget);
std::uint64_t member_degree_bound(const ClassMember& m);
nlohmann::ordered_json member_to_json(const ClassMember& m);
ClassMember member_from_json(const nlohmann::json& j, const PrimeField& field);
const ArenaPtr& member_arena(const ClassMember& m);

// --- distinguisher classes -------------------------------------------------

// s-sparse polynomials; max_degree only steers the sampler.
struct SigmaPiClass {
    std::uint64_t s = 1;
    unsigned max_degree = 3;
};

// sums of k products of linear forms, product degree d
struct SigmaKPiSigmaClass {
    unsigned k = 1;
    unsigned d = 1;
};

// sums of s terms X^a * F_i(X)^{e_i} with deg(F_i) <= t
struct SmespClass {
    unsigned t = 1;
    unsigned s = 1;
};

// depth-D occur-k formulas of size <= s: alternating +/power-product layers
// over depth-2 sparse leaves, every variable in at most k leaves
struct OccurKClass {
    unsigned depth = 3;
    unsigned k = 1;
    std::uint64_t s = 4;
};

// sums of w products of univariates, individual degree <= d; width-w roABP
// in every variable order
struct CommRoAbpClass {
    unsigned w = 1;
    unsigned d = 1;
};

// general width-w roABP in a fixed order (empty = identity)
struct RoAbpClass {
    unsigned w = 1;
    unsigned d = 1;
    std::vector<unsigned> order; // 1-based variable positions; empty = identity
};

using ClassDescriptor = std::variant<SigmaPiClass, SigmaKPiSigmaClass, SmespClass,
                                     OccurKClass, CommRoAbpClass, RoAbpClass>;

std::string class_name(const ClassDescriptor& desc);
nlohmann::ordered_json class_to_json(const ClassDescriptor& desc);

// Draws a nonzero member of the class on N variables (X1..XN in a fresh
// arena). Sampling schemes are artifact-defined and documented at the
// definition; nonzeroness is checked by randomized evaluation and degenerate
// parameters (64 consecutive zero draws) raise std::runtime_error.
ClassMember sample_class(const ClassDescriptor& desc, unsigned N, const PrimeField& field,
                         Rng& rng);

struct ValidationReport {
    bool ok = true;
    std::string detail;
};

// Structural membership check (shape, occur counts, fan-ins, widths, degree
// bounds) per the class definitions. Never throws; findings go in the report.
ValidationReport validate_class(const ClassMember& member, const ClassDescriptor& desc);

// Sum-of-univariate-products family underlying CommRoAbpClass; kept
// structured so the same sample can be laid out as a roABP in any order.
struct CommFamily {
    const PrimeField* field = nullptr;
    ArenaPtr arena;
    unsigned w = 0;
    unsigned d = 0;
    std::vector<std::uint64_t> c;                    // w top coefficients
    std::vector<std::vector<SparsePoly>> univariate; // [m][i]: u_{m,i}(X_i)
};

CommFamily sample_comm_family(unsigned w, unsigned d, unsigned N, const PrimeField& field,
                              Rng& rng);
// order: 1-based positions, a permutation of [N]
RoAbp comm_family_roabp(const CommFamily& fam, const std::vector<unsigned>& order);

} // namespace pitgen

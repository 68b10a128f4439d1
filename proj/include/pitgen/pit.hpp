#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pitgen/circuit.hpp"
#include "pitgen/generator.hpp"

namespace pitgen {

enum class HitOutcome { input_zero, symbolically_zero, probably_zero, nonzero_witness };

std::string hit_outcome_name(HitOutcome o); // "input-zero", "nonzero-witness", ...

// Result of testing one distinguisher against a generator. nonzero-witness
// carries a replayable seed point with D(G(seed_point)) = value != 0;
// probably-zero carries the evaluation count and the log2 of the
// Schwartz-Zippel failure bound (never upgraded to an exact zero claim).
struct HitVerdict {
    HitOutcome outcome;
    std::vector<std::uint64_t> seed_point;
    std::uint64_t value = 0;
    unsigned trials = 0;
    double failure_log2 = 0.0;

    bool hit() const { return outcome == HitOutcome::nonzero_witness; }
    nlohmann::ordered_json to_json() const;
};

struct HitCheckMode {
    bool symbolic = true;
    unsigned trials = 8; // randomized evaluation count

    static HitCheckMode symbolic_mode() { return { true, 0 }; }
    static HitCheckMode randomized(unsigned trials = 8) { return { false, trials }; }
};

// Tests whether the distinguisher vanishes on the generator's image. The
// distinguisher must read exactly the 2^spec.n coefficient variables, in
// arena order. Symbolic mode expands D(G(seeds)) and is exact; if the
// expansion overruns the budget the error says to rerun randomized.
// Randomized mode evaluates at `mode.trials` independent seed points drawn
// from streams derived off `seed`; its failure bound uses the conservative
// syntactic degree product deg(G) * deg(D).
HitVerdict hit_check(const ClassMember& distinguisher, const GeneratorSpec& spec,
                     const HitCheckMode& mode, std::uint64_t seed = 0,
                     std::size_t budget = kDefaultTermBudget);

// Largest seed-variable degree over the witness terms; the delta in the
// interpolation grid and failure bounds. fs specs use the layer exponent
// formula instead of expanding.
std::uint64_t generator_seed_degree(const GeneratorSpec& spec);

// The grid hitting set: images of S^ell for S = {0, 1, ..., delta*Delta}
// with delta the witness seed degree and ell the seed arity. Hits every
// degree <= Delta member of any class the spec generates for.
std::vector<std::vector<std::uint64_t>> interpolation_hitting_set(const GeneratorSpec& spec,
                                                                  std::uint64_t degree_bound);

// m x N matrix of partials, entry (i, j) = dF_i/dX_j; all polynomials must
// share one arena of N variables.
std::vector<std::vector<SparsePoly>> jacobian(const std::vector<SparsePoly>& polys);

struct JacobianRank {
    unsigned rank = 0;
    // p >= d^rank, the characteristic bound under which numeric rank equals
    // transcendence degree
    bool char_condition_ok = true;
    double failure_log2 = 0.0; // log2 P[rank underestimates], 5-trial bound
};

// Max numeric rank of the Jacobian over 5 random evaluations. Lower-bounds
// the function-field rank; equals it with the reported failure probability
// when the characteristic condition holds.
JacobianRank jacobian_rank(const std::vector<SparsePoly>& polys, Rng& rng);

// Support-k rank concentration at `point`: do the coefficient vectors of the
// shifted entries on support <= k monomials already span all of them? Exact
// linear algebra; at most 12 variables.
bool rank_concentration_check(const std::vector<SparsePoly>& fmat,
                              const std::vector<std::uint64_t>& point, unsigned k);

struct AuditResult {
    bool is_distinguisher = false; // true: vanished on every sample
    std::optional<std::size_t> hit_index;
    std::vector<std::uint64_t> hit_sample;
    std::uint64_t hit_value = 0;
};

// Checks whether a (pre-tested nonzero) distinguisher vanishes on every
// sampled coefficient vector; the first non-vanishing sample is returned as
// the hit witness. Throws if the distinguisher is the zero polynomial.
AuditResult natural_proof_audit(const ClassMember& distinguisher,
                                const std::vector<std::vector<std::uint64_t>>& samples);

// Which (class, generator) pairings carry a proven guarantee at these
// parameters; everything else runs labeled heuristic. The notes record the
// checked preconditions either way.
std::pair<std::string, std::vector<std::string>> guarantee_label(const ClassDescriptor& cls,
                                                                 const GeneratorSpec& spec);

struct TrialRow {
    std::uint64_t trial = 0;
    std::string outcome;
    std::uint64_t value = 0;
    std::vector<std::uint64_t> seed_point;
    std::uint64_t check_seed = 0;          // hit_check seed, for replay
    nlohmann::ordered_json member;         // serialized only for non-hits
};

struct ExperimentOptions {
    bool symbolic = false;
    unsigned evals_per_trial = 8;
    std::size_t budget = kDefaultTermBudget;
};

struct ExperimentReport {
    nlohmann::ordered_json class_desc;
    nlohmann::ordered_json generator;
    std::uint64_t field_p = 0;
    std::uint64_t master_seed = 0;
    std::string mode;                      // "symbolic" | "randomized"
    unsigned evals_per_trial = 0;
    unsigned trials = 0;
    unsigned hits = 0;
    std::string guarantee;                 // "guaranteed" | "heuristic"
    std::vector<std::string> notes;
    std::vector<TrialRow> rows;
    // worst per-evaluation Schwartz-Zippel bound over sampled members
    // (randomized mode; -inf when every composition was constant)
    double per_trial_failure_log2 = -std::numeric_limits<double>::infinity();
    double wall_ms = 0.0;                  // measured; never serialized

    unsigned failures() const { return trials - hits; }
    nlohmann::ordered_json to_json() const;
    std::string to_csv() const;
};

// Samples `trials` fresh nonzero class members and hit-checks each against
// the spec. Per-trial randomness comes from streams derived off master_seed
// by trial index, so reports are reproducible and order-independent.
ExperimentReport run_experiment(const ClassDescriptor& cls, const GeneratorSpec& spec,
                                unsigned trials, std::uint64_t master_seed,
                                const ExperimentOptions& opt = {});

} // namespace pitgen

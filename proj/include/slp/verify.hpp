#pragma once

#include <map>
#include <variant>

#include "slp/infer.hpp"
#include "slp/program.hpp"

namespace slp {

struct VerifyOptions {
  SearchLimits limits;
  SolverCfg solver;
  enum class LeakCheck : uint8_t { Auto, On, Off } leak = LeakCheck::Auto;
};

enum class FailReason : uint8_t {
  MemorySafety,        // a required footprint could not be produced
  FrameSideCondition,  // modified variables leak into a frame / sibling spec
  JoinError,           // join on an unknown or already-joined token
  PostMismatch,        // a post-state does not entail the declared summary
  Leak,                // residual frame not empty under the leak check
};

const char* fail_reason_name(FailReason r);

struct SiteInfo {
  SourcePos pos;
  std::string what;
  std::vector<std::string> frames;  // pretty-printed frames inferred here
};

struct FunctionReport {
  std::string name;
  enum class Status : uint8_t { Verified, Failed, Unknown } status = Status::Verified;
  std::optional<FailReason> reason;
  SourcePos site;
  std::string detail;
  std::vector<SiteInfo> sites;
  int queries = 0;
  double wall_ms = 0;  // reported on stderr only, never in the stable output
};

struct VerificationReport {
  std::vector<FunctionReport> functions;
  bool any_failed() const;
  bool any_unknown() const;
};

// The inconsistency over-approximation: true only when the collected
// arithmetic consequences of the shape are contradictory.
bool unsat_over_approx(const SymbolicHeap& sh, const SolverCfg& cfg = {});

// Built-in instruction summaries over conventional formals (x, v).
SpecPair skip_spec();
SpecPair store_spec(size_t arity, int field);  // requires the full share
SpecPair free_spec(size_t arity);              // requires the full share

class Verifier {
 public:
  Verifier(const SourceFile& file, VerifyOptions opts = {});

  VerificationReport run();  // verifies every function, in declaration order
  FunctionReport verify_function(const FunctionDecl& f);

  struct AbsState {
    SymbolicHeap heap;
    std::map<VarId, SymbolicHeap> pending;  // fork token -> instantiated post
  };
  using States = std::vector<AbsState>;
  struct Error {
    FailReason reason;
    SourcePos site;
    std::string detail;
  };
  using PostResult = std::variant<States, Error>;

  // One statement on one state (exposed for the transformer tests).
  PostResult post(const Stmt& stmt, const AbsState& st, FunctionReport& rep);
  PostResult post_seq(const std::vector<Stmt>& body, States sts, FunctionReport& rep);

 private:
  struct SpecInst {
    SymbolicHeap pre, post;
    std::set<VarId> locals;  // freshened spec variables
  };
  SpecInst instantiate_spec(const FunctionDecl& f, const SpecPair& sp,
                            const std::vector<VarId>& actuals, const std::set<VarId>& avoid);
  struct SummaryResult {
    std::vector<SymbolicHeap> states;  // one per inferred frame
    std::vector<SymbolicHeap> frames;  // the cleaned frames, for the report
  };
  std::optional<SummaryResult> apply_summary(const AbsState& st, const SymbolicHeap& pre,
                                             const SymbolicHeap& post,
                                             const std::set<VarId>& spec_locals,
                                             FunctionReport& rep);

  AbsState rename_assigned(const AbsState& st, const VarId& x, VarId& fresh);
  const std::set<VarId>& modset(const std::string& fname);
  bool body_assigns(const FunctionDecl& f, const VarId& v) const;

  const SourceFile& file_;
  VerifyOptions opts_;
  FreshGen names_;
  std::map<std::string, std::set<VarId>> modsets_;
};

}  // namespace slp
